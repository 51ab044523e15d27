"""Sensing and motion model of the two-sensor light-seeking vehicle.

The light sits at the world origin.  Each sensor reads the inverse square
of its distance to the light; the turning rate is ``w1*s1 - w2*s2`` and the
forward speed is the mean ``(w1*s1 + w2*s2) / 2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .errors import NumericalDivergence

Point = Tuple[float, float]

TRAJECTORY_COLUMNS = ("t", "x", "y", "alpha", "s1", "s2", "v")


@dataclass(frozen=True)
class SensorLayout:
    """Positions of the two sensors in body coordinates, (0, 0) at the centre."""

    l1: Point
    l2: Point

    def __post_init__(self):
        object.__setattr__(self, "l1", (float(self.l1[0]), float(self.l1[1])))
        object.__setattr__(self, "l2", (float(self.l2[0]), float(self.l2[1])))
        for c in self.l1 + self.l2:
            if not -0.5 <= c <= 0.5:
                raise ValueError(f"sensor coordinate {c} outside [-0.5, 0.5]")

    @property
    def flat(self) -> Tuple[float, float, float, float]:
        return self.l1 + self.l2


CANONICAL_LAYOUT = SensorLayout((0.5, 0.5), (0.5, -0.5))


@dataclass(frozen=True)
class ControllerWeights:
    w1: float
    w2: float

    def __post_init__(self):
        object.__setattr__(self, "w1", float(self.w1))
        object.__setattr__(self, "w2", float(self.w2))
        for w in (self.w1, self.w2):
            if not -1.0 <= w <= 1.0:
                raise ValueError(f"weight {w} outside [-1, 1]")


@dataclass(frozen=True)
class RobotState:
    x: float
    y: float
    alpha: float = 0.0
    t: float = 0.0

    def __post_init__(self):
        for name in ("x", "y", "alpha", "t"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"state component {name}={v} is not finite")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class SimConfig:
    """Integration settings.

    ``saturation`` is ``(v_max, omega_max)`` and only used by
    :func:`integrate_saturated`.
    """

    dt: float = 0.01
    steps: int = 100_000
    success_radius: float = 0.2
    distance_floor: float = 1e-3
    early_stop: bool = True
    saturation: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))
        if not self.success_radius > 0:
            raise ValueError("success_radius must be positive")
        if not 0 < self.distance_floor < self.success_radius:
            raise ValueError("distance_floor must lie in (0, success_radius)")
        if self.saturation is not None:
            vmax, wmax = (float(c) for c in self.saturation)
            if not (vmax > 0 and wmax > 0):
                raise ValueError("saturation caps must be positive")
            object.__setattr__(self, "saturation", (vmax, wmax))

    @classmethod
    def saturated_defaults(cls, **overrides) -> "SimConfig":
        """Discrete-time surrogate defaults: 2500 steps of 0.05, caps (1, pi)."""
        kw = dict(dt=0.05, steps=2500, saturation=(1.0, math.pi))
        kw.update(overrides)
        return cls(**kw)


@dataclass
class SimOutcome:
    success: bool
    min_distance: float
    steps_taken: int
    final_state: RobotState
    trajectory: Optional[np.ndarray] = field(default=None, repr=False)


def rotation_matrix(alpha: float) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s], [s, c]])


def sensor_world_position(state: RobotState, l: Point) -> Tuple[float, float]:
    c, s = math.cos(state.alpha), math.sin(state.alpha)
    return (state.x + (c * l[0] - s * l[1]), state.y + (s * l[0] + c * l[1]))


def sensor_value(state: RobotState, l: Point, floor: float = 1e-3) -> float:
    px, py = sensor_world_position(state, l)
    d = max(math.sqrt(px * px + py * py), floor)
    return 1.0 / (d * d)


def derivatives(state: RobotState, layout: SensorLayout, weights: ControllerWeights,
                floor: float = 1e-3) -> Tuple[float, float, float]:
    """Return (dx/dt, dy/dt, dalpha/dt)."""
    return _kernels.rates(state.x, state.y, state.alpha, *layout.flat,
                          weights.w1, weights.w2, floor)


def _check_divergence(status, final, layout, weights):
    if status == _kernels.DIVERGED:
        raise NumericalDivergence("state became non-finite", layout=layout,
                                  weights=weights, state=final)


def _run(initial, layout, weights, cfg, record, every, saturated):
    if every < 1:
        raise ValueError("every must be >= 1")
    vmax, wmax = cfg.saturation if saturated else (math.inf, math.inf)
    tail = (cfg.dt, cfg.steps, cfg.success_radius, cfg.distance_floor,
            cfg.early_stop, saturated, vmax, wmax)
    if record:
        x, y, a, md, taken, status, rows = _kernels.run_recorded(
            initial.x, initial.y, initial.alpha, initial.t, *layout.flat,
            weights.w1, weights.w2, *tail, every)
    else:
        xs, ys, as_, mds, takens, statuses = _kernels.run_lanes(
            np.array([initial.x]), np.array([initial.y]),
            np.array([initial.alpha]), *layout.flat,
            np.array([weights.w1]), np.array([weights.w2]), *tail)
        x, y, a, md = xs[0], ys[0], as_[0], mds[0]
        taken, status, rows = int(takens[0]), int(statuses[0]), None
    final = (float(x), float(y), float(a), initial.t + taken * cfg.dt)
    _check_divergence(status, final, layout, weights)
    return SimOutcome(
        success=bool(md <= cfg.success_radius),
        min_distance=float(md),
        steps_taken=int(taken),
        final_state=RobotState(*final),
        trajectory=rows,
    )


def integrate(initial: RobotState, layout: SensorLayout, weights: ControllerWeights,
              cfg: SimConfig = SimConfig(), record_trajectory: bool = False,
              every: int = 1) -> SimOutcome:
    """Fixed-step classical RK4 run from ``initial``.

    Distance to the light is checked at step endpoints only; success means
    the robot centre came within ``cfg.success_radius`` (inclusive).
    Raises NumericalDivergence if the state stops being finite.
    """
    return _run(initial, layout, weights, cfg, record_trajectory, every, False)


def integrate_saturated(initial: RobotState, layout: SensorLayout,
                        weights: ControllerWeights, cfg: SimConfig,
                        record_trajectory: bool = False, every: int = 1) -> SimOutcome:
    """Explicit Euler run with speed and turn-rate caps from ``cfg.saturation``."""
    if cfg.saturation is None:
        raise ValueError("integrate_saturated needs cfg.saturation")
    return _run(initial, layout, weights, cfg, record_trajectory, every, True)


def simulate(initial, layout, weights, cfg, record_trajectory=False, every=1):
    """Dispatch on ``cfg.saturation``: capped Euler when set, RK4 otherwise."""
    if cfg.saturation is None:
        return integrate(initial, layout, weights, cfg, record_trajectory, every)
    return integrate_saturated(initial, layout, weights, cfg, record_trajectory, every)
