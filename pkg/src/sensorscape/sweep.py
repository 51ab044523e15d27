"""Nested grid search: designs x controller weights x environments.

The unit of work is one design.  Designs are farmed out to worker
processes, results come back in design order, and every batch is
appended to a ``.partial`` file and recorded in a JSON manifest so an
interrupted sweep can resume without recomputing finished designs.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .dynamics import ControllerWeights, SensorLayout, SimConfig
from .environments import DesignGrid, Environment, WeightGrid
from .errors import ChecksumMismatch, NumericalDivergence
from .matrixio import dump_path, write_matrix_dump
from .metrics import DesignRecord, overlap, value_counts

log = logging.getLogger(__name__)

MANIFEST_VERSION = 1
CHECKPOINT_EVERY = 64
LANE_BLOCK = 1024


def model_name(cfg: SimConfig) -> str:
    return "theoretical" if cfg.saturation is None else "saturated"


def _integrate_lanes(layout, w1, w2, x0, y0, a0, cfg):
    vmax, wmax = cfg.saturation if cfg.saturation is not None else (math.inf, math.inf)
    return _kernels.run_lanes(
        x0, y0, a0, *layout.flat, w1, w2, cfg.dt, cfg.steps, cfg.success_radius,
        cfg.distance_floor, cfg.early_stop, cfg.saturation is not None, vmax, wmax)


def _env_arrays(envs):
    return (np.array([e.initial_state.x for e in envs]),
            np.array([e.initial_state.y for e in envs]),
            np.array([e.initial_state.alpha for e in envs]))


def evaluate_controller(layout: SensorLayout, weights: ControllerWeights,
                        envs: Sequence[Environment], cfg: SimConfig) -> Tuple[int, ...]:
    """Success bit per environment for one (design, controller) pair."""
    x0, y0, a0 = _env_arrays(envs)
    n = len(envs)
    _, _, _, md, _, status = _integrate_lanes(
        layout, np.full(n, weights.w1), np.full(n, weights.w2), x0, y0, a0, cfg)
    for k in range(n):
        if status[k] == _kernels.DIVERGED:
            raise NumericalDivergence("state became non-finite", layout=layout,
                                      weights=weights, environment=envs[k].id)
    return tuple(int(d <= cfg.success_radius) for d in md)


@dataclass
class DesignResult:
    design_index: int
    layout: SensorLayout
    matrices: np.ndarray  # (envs, n, n) uint8, [k, i, j] for w1 index i, w2 index j
    counts: Tuple[int, ...]

    @property
    def record(self) -> DesignRecord:
        return DesignRecord(self.design_index, self.layout.l1, self.layout.l2, self.counts)

    @property
    def m_l(self) -> float:
        return self.record.m_l

    @property
    def m_cf(self) -> float:
        return self.record.m_cf


def evaluate_design(layout: SensorLayout, weight_grid: WeightGrid,
                    envs: Sequence[Environment], cfg: SimConfig,
                    design_index: int = 0) -> DesignResult:
    n = weight_grid.values_per_axis
    n_env = len(envs)
    w1, w2 = weight_grid.arrays()
    ex, ey, ea = _env_arrays(envs)
    # lane = controller * n_env + env
    lw1 = np.repeat(w1, n_env)
    lw2 = np.repeat(w2, n_env)
    lx = np.tile(ex, w1.size)
    ly = np.tile(ey, w1.size)
    la = np.tile(ea, w1.size)
    md = np.empty(lw1.size)
    for start in range(0, lw1.size, LANE_BLOCK):
        sl = slice(start, start + LANE_BLOCK)
        _, _, _, md_b, _, status = _integrate_lanes(
            layout, lw1[sl], lw2[sl], lx[sl], ly[sl], la[sl], cfg)
        bad = np.flatnonzero(status == _kernels.DIVERGED)
        if bad.size:
            lane = start + int(bad[0])
            c, k = divmod(lane, n_env)
            raise NumericalDivergence(
                "state became non-finite", design_index=design_index, layout=layout,
                weights=(float(w1[c]), float(w2[c])), environment=envs[k].id)
        md[sl] = md_b
    success = (md <= cfg.success_radius).astype(np.uint8)
    matrices = np.ascontiguousarray(success.reshape(n, n, n_env).transpose(2, 0, 1))
    return DesignResult(design_index, layout, matrices, value_counts(overlap(matrices)))


def config_snapshot(design_grid: DesignGrid, weight_grid: WeightGrid,
                    envs: Sequence[Environment], cfg: SimConfig) -> Dict:
    return {
        "model": model_name(cfg),
        "radius": envs[0].radius,
        "bearings": [e.bearing for e in envs],
        "initial_states": [[e.initial_state.x, e.initial_state.y, e.initial_state.alpha]
                           for e in envs],
        "dt": cfg.dt,
        "steps": cfg.steps,
        "success_radius": cfg.success_radius,
        "distance_floor": cfg.distance_floor,
        "early_stop": cfg.early_stop,
        "saturation": list(cfg.saturation) if cfg.saturation is not None else None,
        "design_positions_per_axis": design_grid.positions_per_axis,
        "weight_values_per_axis": weight_grid.values_per_axis,
    }


def snapshot_digest(snapshot: Dict) -> str:
    blob = json.dumps(snapshot, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _to_ranges(indices) -> List[List[int]]:
    """Sorted indices as half-open [start, stop) ranges."""
    ranges: List[List[int]] = []
    for i in sorted(indices):
        if ranges and ranges[-1][1] == i:
            ranges[-1][1] = i + 1
        else:
            ranges.append([i, i + 1])
    return ranges


def _from_ranges(ranges) -> set:
    out = set()
    for start, stop in ranges:
        out.update(range(start, stop))
    return out


@dataclass
class SweepManifest:
    config: Dict
    total_designs: int
    output: str
    partial: str
    matrices: Optional[str] = None
    completed: set = field(default_factory=set)
    complete: bool = False

    @property
    def config_sha256(self) -> str:
        return snapshot_digest(self.config)

    def to_json(self) -> Dict:
        return {
            "version": MANIFEST_VERSION,
            "config": self.config,
            "config_sha256": self.config_sha256,
            "total_designs": self.total_designs,
            "completed": _to_ranges(self.completed),
            "n_completed": len(self.completed),
            "complete": self.complete,
            "output": self.output,
            "partial": self.partial,
            "matrices": self.matrices,
        }

    @classmethod
    def from_json(cls, obj: Dict) -> "SweepManifest":
        if obj.get("version") != MANIFEST_VERSION:
            raise ValueError(f"unsupported manifest version {obj.get('version')}")
        m = cls(config=obj["config"], total_designs=int(obj["total_designs"]),
                output=obj["output"], partial=obj["partial"], matrices=obj.get("matrices"),
                completed=_from_ranges(obj["completed"]), complete=bool(obj["complete"]))
        if m.completed and not (min(m.completed) >= 0 and max(m.completed) < m.total_designs):
            raise ValueError("manifest lists design indices outside the grid")
        if snapshot_digest(m.config) != obj.get("config_sha256"):
            raise ChecksumMismatch("manifest config does not match its recorded checksum")
        return m

    def save(self, path) -> None:
        path = Path(path)
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_text(json.dumps(self.to_json(), indent=2) + "\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "SweepManifest":
        path = Path(path)
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: malformed manifest: {exc}") from exc
        return cls.from_json(obj)


# Worker-process state, installed once per process by the pool initializer.
_CTX: Dict = {}


def _init_worker(design_grid, weight_grid, envs, cfg, matrices_dir):
    _CTX.update(design_grid=design_grid, weight_grid=weight_grid, envs=envs, cfg=cfg,
                matrices_dir=matrices_dir)


def _evaluate_index(index: int) -> str:
    res = evaluate_design(_CTX["design_grid"][index], _CTX["weight_grid"], _CTX["envs"],
                          _CTX["cfg"], design_index=index)
    if _CTX["matrices_dir"] is not None:
        write_matrix_dump(dump_path(_CTX["matrices_dir"], index), res.matrices)
    return res.record.to_json_line()


def _read_partial(path: Path, keep: set) -> Dict[int, str]:
    lines: Dict[int, str] = {}
    if not path.exists():
        return lines
    with path.open() as fh:
        for raw in fh:
            if not raw.endswith("\n"):
                break  # torn write from an interrupted run
            try:
                idx = int(json.loads(raw)["design_index"])
            except (ValueError, KeyError):
                break
            if idx in keep:
                lines[idx] = raw.rstrip("\n")
    return lines


def _write_lines(path: Path, lines: Sequence[str]) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with tmp.open("w") as fh:
        for line in lines:
            fh.write(line + "\n")
    os.replace(tmp, path)


def run_sweep(design_grid: DesignGrid, weight_grid: WeightGrid, envs: Sequence[Environment],
              cfg: SimConfig, workers: int = 1, checkpoint_path=None, output_path="results.jsonl",
              matrices_dir=None, checkpoint_every: int = CHECKPOINT_EVERY,
              stop_after: Optional[int] = None,
              progress: Optional[Callable[[int, int], None]] = None,
              indices: Optional[Sequence[int]] = None) -> SweepManifest:
    """Evaluate every design and write one JSON line per design, in index order.

    ``checkpoint_path`` (default ``<output>.manifest.json``) holds the
    manifest.  An existing manifest is resumed; it must describe the same
    configuration or ChecksumMismatch is raised.  ``stop_after`` bounds the
    number of designs evaluated by this call, leaving the sweep resumable.
    ``indices`` restricts the sweep to a subset of design indices.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if checkpoint_every < 1:
        raise ValueError("checkpoint_every must be >= 1")
    output_path = Path(output_path)
    checkpoint_path = Path(checkpoint_path) if checkpoint_path else \
        output_path.with_name(output_path.name + ".manifest.json")
    partial_path = output_path.with_name(output_path.name + ".partial")
    if matrices_dir is not None:
        matrices_dir = Path(matrices_dir)
        matrices_dir.mkdir(parents=True, exist_ok=True)

    snapshot = config_snapshot(design_grid, weight_grid, envs, cfg)
    if indices is None:
        todo_all = list(range(len(design_grid)))
    else:
        todo_all = sorted(set(int(i) for i in indices))
        if todo_all and not (todo_all[0] >= 0 and todo_all[-1] < len(design_grid)):
            raise IndexError("design index outside the grid")
        snapshot["design_indices"] = _to_ranges(todo_all)

    if checkpoint_path.exists():
        manifest = SweepManifest.load(checkpoint_path)
        if manifest.config_sha256 != snapshot_digest(snapshot):
            raise ChecksumMismatch(
                f"{checkpoint_path}: configuration differs from the one being resumed")
        if manifest.complete and output_path.exists():
            log.info("sweep already complete: %s", output_path)
            return manifest
        manifest.complete = False
    else:
        manifest = SweepManifest(config=snapshot, total_designs=len(design_grid),
                                 output=str(output_path), partial=str(partial_path),
                                 matrices=str(matrices_dir) if matrices_dir else None)

    lines = _read_partial(partial_path, manifest.completed)
    manifest.completed = set(lines)
    _write_lines(partial_path, [lines[i] for i in sorted(lines)])
    manifest.save(checkpoint_path)

    pending = [i for i in todo_all if i not in manifest.completed]
    if stop_after is not None:
        pending = pending[:stop_after]
    total = len(todo_all)
    done = len(manifest.completed)

    pool = None
    init_args = (design_grid, weight_grid, list(envs), cfg, matrices_dir)
    if workers > 1 and len(pending) > 1:
        pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                   initargs=init_args)
    else:
        _init_worker(*init_args)
    try:
        for start in range(0, len(pending), checkpoint_every):
            batch = pending[start:start + checkpoint_every]
            results = pool.map(_evaluate_index, batch) if pool else map(_evaluate_index, batch)
            batch_lines = []
            for line in results:
                batch_lines.append(line)
                done += 1
                if progress is not None:
                    progress(done, total)
            with partial_path.open("a") as fh:
                for line in batch_lines:
                    fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            manifest.completed.update(batch)
            manifest.save(checkpoint_path)
    finally:
        if pool is not None:
            pool.shutdown()

    if all(i in manifest.completed for i in todo_all):
        lines = _read_partial(partial_path, manifest.completed)
        _write_lines(output_path, [lines[i] for i in sorted(lines)])
        partial_path.unlink()
        manifest.complete = True
        manifest.save(checkpoint_path)
    return manifest


CALIBRATION_RADII = (1.5, 2.0, 3.0, 4.0, 5.0)


def scan_radius(layout: SensorLayout, weights: ControllerWeights, cfg: SimConfig,
                radii: Sequence[float] = CALIBRATION_RADII) -> List[Tuple[float, Tuple[int, ...]]]:
    """Success vector of one controller at each candidate light distance."""
    from .environments import make_environments

    return [(float(r), evaluate_controller(layout, weights,
                                           make_environments(r, cfg.success_radius), cfg))
            for r in radii]
