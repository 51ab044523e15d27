import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from sensorscape.dynamics import CANONICAL_LAYOUT, SensorLayout
from sensorscape.environments import (BEARINGS, make_design_grid, make_environments,
                                      make_weight_grid, mirror_design, mirror_env_permutation)
from sensorscape.errors import InvalidRadius


def test_environment_start_states():
    envs = make_environments(3.0)
    assert [e.bearing for e in envs] == list(BEARINGS)
    assert [e.id for e in envs] == [1, 2, 3, 4]
    s1, s3 = envs[0].initial_state, envs[2].initial_state
    assert (s1.x, s1.y, s1.alpha) == pytest.approx((-2.1213, -2.1213, 0), abs=1e-4)
    assert (s3.x, s3.y, s3.alpha) == pytest.approx((2.1213, 2.1213, 0), abs=1e-4)
    for e in envs:
        # the light (origin) sits at polar (r, bearing) from the robot
        lx, ly = -e.initial_state.x, -e.initial_state.y
        assert math.hypot(lx, ly) == pytest.approx(3.0, rel=1e-15)
        assert math.degrees(math.atan2(ly, lx)) % 360 == pytest.approx(e.bearing)


def test_degenerate_radius_rejected():
    with pytest.raises(InvalidRadius):
        make_environments(0.1, success_radius=0.2)
    with pytest.raises(InvalidRadius):
        make_environments(0.2, success_radius=0.2)


def test_environments_closed_under_reflection():
    envs = make_environments(2.5)
    perm = mirror_env_permutation(envs)
    assert perm == [3, 2, 1, 0]
    for e, k in zip(envs, perm):
        m = envs[k].initial_state
        assert (m.x, m.y) == (e.initial_state.x, -e.initial_state.y)


def test_design_grid():
    g = make_design_grid(9)
    assert len(g) == 6561
    assert g.axis.tolist() == [-0.5 + 0.125 * i for i in range(9)]
    assert g[0] == SensorLayout((-0.5, -0.5), (-0.5, -0.5))
    assert g[1] == SensorLayout((-0.5, -0.5), (-0.5, -0.375))
    assert g[9] == SensorLayout((-0.5, -0.5), (-0.375, -0.5))
    assert g[len(g) - 1] == SensorLayout((0.5, 0.5), (0.5, 0.5))
    small = make_design_grid(2)
    assert len(small) == 16
    assert {c for d in small for c in d.flat} == {-0.5, 0.5}


def test_design_grid_index_bijection():
    g = make_design_grid(9)
    for i in range(0, len(g), 7):
        assert g.index_of(g[i]) == i
    with pytest.raises(ValueError):
        g.index_of(SensorLayout((0.1, 0), (0, 0)))
    with pytest.raises(IndexError):
        g[len(g)]


@pytest.mark.parametrize("n", [2, 3, 9, 10])
def test_design_grid_closed_under_mirroring(n):
    g = make_design_grid(n)
    for d in g:
        m = mirror_design(d)
        assert g[g.index_of(m)] == m


def test_weight_grid():
    g = make_weight_grid(121)
    assert len(g) == 14641
    assert g.axis[0] == -1.0 and g.axis[-1] == 1.0
    assert g.axis[1] == pytest.approx(-1 + 1 / 60, abs=1e-15)
    np.testing.assert_allclose(np.diff(g.axis), 1 / 60, rtol=1e-12)
    assert make_weight_grid(3).axis.tolist() == [-1.0, 0.0, 1.0]
    w1, w2 = make_weight_grid(3).arrays()
    assert list(zip(w1, w2))[:4] == [(-1, -1), (-1, 0), (-1, 1), (0, -1)]
    assert g[122].w1 == g.axis[1] and g[122].w2 == g.axis[1]


def test_grids_need_two_points():
    with pytest.raises(ValueError):
        make_design_grid(1)
    with pytest.raises(ValueError):
        make_weight_grid(1)


def test_mirror_design_examples():
    assert mirror_design(CANONICAL_LAYOUT) == CANONICAL_LAYOUT
    assert mirror_design(SensorLayout((-0.5, -0.25), (0.5, 0.25))) == \
        SensorLayout((0.5, -0.25), (-0.5, 0.25))


coord = st.sampled_from([-0.5 + 0.125 * i for i in range(9)])


@given(coord, coord, coord, coord)
def test_mirror_is_involution(a, b, c, d):
    layout = SensorLayout((a, b), (c, d))
    assert mirror_design(mirror_design(layout)) == layout
