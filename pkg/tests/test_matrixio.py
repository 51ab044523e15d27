import numpy as np
import pytest

from sensorscape.errors import MissingMatrixDump
from sensorscape.matrixio import (locate_matrix_dump, pack_matrices, read_matrix_dump,
                                  unpack_matrices, write_matrix_dump)


@pytest.mark.parametrize("n", [1, 2, 3, 8, 121])
def test_round_trip(n):
    m = np.random.default_rng(n).integers(0, 2, (4, n, n)).astype(np.uint8)
    data = pack_matrices(m)
    assert data[:4] == b"MSWP"
    assert len(data) == 9 + 4 * ((n * n + 7) // 8)
    assert np.array_equal(unpack_matrices(data), m)


def test_bit_layout():
    m = np.zeros((4, 3, 3), np.uint8)
    m[0, 0, 0] = 1  # first bit -> MSB of first byte
    m[1, 2, 2] = 1  # ninth bit -> MSB of the second byte of env 2
    data = pack_matrices(m)
    assert data[4:9] == bytes([1, 0, 3, 0, 4])
    assert data[9:] == bytes([0x80, 0x00, 0x00, 0x80, 0, 0, 0, 0])


def test_bad_inputs(tmp_path):
    with pytest.raises(ValueError):
        pack_matrices(np.full((4, 2, 2), 2))
    with pytest.raises(ValueError):
        unpack_matrices(b"XXXX" + bytes(5))
    with pytest.raises(ValueError):
        unpack_matrices(pack_matrices(np.zeros((4, 3, 3)))[:-1])
    with pytest.raises(MissingMatrixDump):
        read_matrix_dump(tmp_path / "nope.mswp")
    with pytest.raises(MissingMatrixDump):
        locate_matrix_dump(tmp_path, None)
    with pytest.raises(MissingMatrixDump):
        locate_matrix_dump(tmp_path, 3)


def test_file_round_trip(tmp_path):
    m = np.ones((4, 5, 5), np.uint8)
    write_matrix_dump(tmp_path / "design_00003.mswp", m)
    assert np.array_equal(read_matrix_dump(locate_matrix_dump(tmp_path, 3)), m)
