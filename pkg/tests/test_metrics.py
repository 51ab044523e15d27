from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from sensorscape.errors import DimensionMismatch
from sensorscape.metrics import (DesignRecord, cf_resistance, count_values, learnability,
                                 overlap, rank_designs, value_counts)

S1 = [[1, 0], [0, 1]]
S2 = [[1, 1], [0, 0]]
S3 = [[1, 0], [0, 0]]
S4 = [[1, 0], [0, 0]]
O = np.array([[4, 1], [0, 1]])


def test_overlap_hand_sum():
    assert overlap(S1, S2, S3, S4).tolist() == [[4, 1], [0, 1]]
    assert overlap(np.array([S1, S2, S3, S4])).tolist() == [[4, 1], [0, 1]]
    assert not overlap(*[np.zeros((3, 3))] * 4).any()
    assert (overlap(*[np.ones((3, 3))] * 4) == 4).all()


def test_overlap_dimension_checks():
    with pytest.raises(DimensionMismatch):
        overlap(S1, S2, S3)
    with pytest.raises(DimensionMismatch):
        overlap(S1, S2, S3, np.zeros((3, 3)))
    with pytest.raises(DimensionMismatch):
        overlap(*[np.zeros((2, 3))] * 4)


def test_counts_and_metrics_examples():
    assert count_values(O, 4) == 1
    assert count_values(O, 1) == 2
    assert sum(count_values(O, k) for k in range(5)) == 4
    assert learnability(O) == 0.25
    assert cf_resistance(O) == pytest.approx(1 / 3)
    assert learnability(np.full((3, 3), 4)) == 1.0
    assert cf_resistance(np.zeros((3, 3), int)) == 0
    assert cf_resistance(np.array([[4, 0], [0, 4]])) == 1.0
    with pytest.raises(ValueError):
        count_values(O, 5)


@given(st.integers(2, 20).flatmap(lambda n: arrays(np.int64, (n, n), elements=st.integers(0, 4))))
def test_metric_algebra(o):
    n = o.shape[0]
    g = value_counts(o)
    assert sum(g) == n * n
    assert learnability(o) == float(Fraction(g[4], n * n))
    assert 0 <= learnability(o) <= 1 and 0 <= cf_resistance(o) <= 1
    if g[4] > 0:
        assert cf_resistance(o) >= learnability(o)
    # resistance is 1 exactly when every controller that solves anything solves all
    assert (cf_resistance(o) == 1) == (g[4] > 0 and g[1] == g[2] == g[3] == 0)


def test_mirror_invariance_of_metrics():
    rng = np.random.default_rng(3)
    s = rng.integers(0, 2, (4, 7, 7))
    mirrored = np.array([s[k].T for k in (3, 2, 1, 0)])
    assert value_counts(overlap(s)) == value_counts(overlap(mirrored))


def rec(i, g):
    return DesignRecord(i, (0.0, 0.0), (0.0, 0.0), tuple(g))


def test_rank_tie_breaks():
    a, b = rec(5, [6, 1, 0, 0, 2]), rec(3, [6, 1, 0, 0, 2])
    assert [r.design_index for r in rank_designs([a, b])] == [3, 5]
    # equal M_L, higher M_CF first
    c = rec(9, [5, 2, 0, 0, 2])
    assert [r.design_index for r in rank_designs([c, a, b], "M_L")] == [3, 5, 9]


def test_rank_top_and_keys():
    recs = [rec(0, [9, 0, 0, 0, 1]), rec(1, [7, 0, 0, 0, 3]), rec(2, [8, 0, 0, 0, 2])]
    assert rank_designs(recs, "M_L", top=1)[0].design_index == 1
    gen = rec(7, [0, 0, 0, 0, 10])
    top = rank_designs(recs + [gen, rec(8, [0, 5, 0, 0, 5])], "M_CF", top=1)[0]
    assert top.design_index == 7 and top.m_cf == 1.0
    with pytest.raises(ValueError):
        rank_designs([])
    with pytest.raises(ValueError):
        rank_designs(recs, "bogus")


def test_record_json_round_trip():
    r = DesignRecord(12, (-0.5, 0.125), (0.375, -0.25), (100, 10, 5, 3, 3))
    line = r.to_json_line()
    assert '"M_L": 0.024793388429752067' in line  # 3/121 at 17 significant digits
    assert '"M_CF": 0.14285714285714285' in line  # 3/21
    back = DesignRecord.from_json(line)
    assert back == r
    assert back.m_l == r.m_l and back.m_cf == r.m_cf
    assert DesignRecord(0, (0.1, 0), (0, 0), (1, 0, 0, 0, 0)).to_json_line().count("0.10000000000000001") == 1
