"""Binary dump of one design's success matrices.

Layout (little endian)::

    magic   4 bytes  b"MSWP"
    version u16
    n       u16      matrix side length
    envs    u8       number of environments
    then, per environment, the n*n success bits in row-major order packed
    MSB-first into ceil(n*n / 8) bytes, zero-padded at the end.
"""
from __future__ import annotations

import os
import struct
from pathlib import Path

import numpy as np

from .errors import MissingMatrixDump

MAGIC = b"MSWP"
VERSION = 1
_HEADER = struct.Struct("<4sHHB")


def pack_matrices(matrices: np.ndarray) -> bytes:
    matrices = np.asarray(matrices)
    if matrices.ndim != 3 or matrices.shape[1] != matrices.shape[2]:
        raise ValueError(f"expected (envs, n, n) array, got shape {matrices.shape}")
    envs, n, _ = matrices.shape
    if np.any((matrices != 0) & (matrices != 1)):
        raise ValueError("success matrices must be binary")
    parts = [_HEADER.pack(MAGIC, VERSION, n, envs)]
    for m in matrices:
        parts.append(np.packbits(m.astype(np.uint8).ravel()).tobytes())
    return b"".join(parts)


def unpack_matrices(data: bytes) -> np.ndarray:
    if len(data) < _HEADER.size:
        raise ValueError("matrix dump truncated")
    magic, version, n, envs = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != VERSION:
        raise ValueError(f"unsupported matrix dump version {version}")
    per_env = (n * n + 7) // 8
    body = data[_HEADER.size:]
    if len(body) != per_env * envs:
        raise ValueError(f"expected {per_env * envs} payload bytes, found {len(body)}")
    out = np.empty((envs, n, n), dtype=np.uint8)
    for k in range(envs):
        chunk = np.frombuffer(body, dtype=np.uint8, count=per_env, offset=k * per_env)
        out[k] = np.unpackbits(chunk, count=n * n).reshape(n, n)
    return out


def dump_path(directory, design_index: int) -> Path:
    return Path(directory) / f"design_{design_index:05d}.mswp"


def write_matrix_dump(path, matrices) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(pack_matrices(matrices))
    os.replace(tmp, path)


def read_matrix_dump(path) -> np.ndarray:
    path = Path(path)
    if not path.is_file():
        raise MissingMatrixDump(f"no matrix dump at {path}")
    return unpack_matrices(path.read_bytes())


def locate_matrix_dump(path, design_index: int | None = None) -> Path:
    """Accept a dump file directly, or a directory plus a design index."""
    path = Path(path)
    if path.is_dir():
        if design_index is None:
            raise MissingMatrixDump(f"{path} is a directory; a design index is required")
        path = dump_path(path, design_index)
    if not path.is_file():
        raise MissingMatrixDump(f"no matrix dump at {path}")
    return path
