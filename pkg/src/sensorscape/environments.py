"""Task environments and the design / weight discretisation grids."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .dynamics import ControllerWeights, RobotState, SensorLayout
from .errors import InvalidRadius

BEARINGS = (45.0, 135.0, 225.0, 315.0)
DEFAULT_RADIUS = 3.0


@dataclass(frozen=True)
class Environment:
    id: int
    bearing: float
    radius: float
    initial_state: RobotState


def _unit_vector(bearing_deg: float) -> Tuple[float, float]:
    # Folded onto [0, 90] so that reflected bearings give exactly negated
    # components; plain cos(radians(315)) differs from cos(radians(45)).
    phi = bearing_deg % 360.0
    if phi > 180.0:
        c, s = _unit_vector(360.0 - phi)
        return c, -s
    if phi > 90.0:
        c, s = _unit_vector(180.0 - phi)
        return -c, s
    rad = math.radians(phi)
    return math.cos(rad), math.sin(rad)


def make_environments(r: float = DEFAULT_RADIUS, success_radius: float = 0.2,
                      bearings: Sequence[float] = BEARINGS) -> List[Environment]:
    """Four start poses with the light at polar (r, bearing) from the robot.

    The robot always starts facing +x; the world is shifted so the light
    stays at the origin.
    """
    if not r > success_radius:
        raise InvalidRadius(f"radius {r} must exceed the success radius {success_radius}")
    envs = []
    for k, phi in enumerate(bearings, start=1):
        c, s = _unit_vector(phi)
        envs.append(Environment(k, float(phi), float(r), RobotState(-r * c, -r * s, 0.0, 0.0)))
    return envs


def mirror_env_permutation(envs: Sequence[Environment]) -> List[int]:
    """Index of the x-axis reflection of each environment within ``envs``."""
    bearings = [e.bearing % 360.0 for e in envs]
    return [bearings.index((360.0 - b) % 360.0) for b in bearings]


def symmetric_axis(n: int, half_width: float) -> np.ndarray:
    """n evenly spaced values on [-half_width, half_width], exactly sign-symmetric."""
    if n < 2:
        raise ValueError("need at least 2 values per axis")
    i = np.arange(n, dtype=np.float64)
    return (2.0 * i - (n - 1)) * half_width / (n - 1)


def reflect(p):
    return (p[0], -p[1])


def mirror_design(layout: SensorLayout) -> SensorLayout:
    """Reflect a design about the body's long axis, swapping sensor roles."""
    return SensorLayout(reflect(layout.l2), reflect(layout.l1))


class DesignGrid:
    """All placements of two sensors on an n-by-n lattice over the body.

    Ordering is row-major over (l1.x, l1.y, l2.x, l2.y).
    """

    def __init__(self, positions_per_axis: int = 9):
        self.positions_per_axis = int(positions_per_axis)
        self.axis = symmetric_axis(self.positions_per_axis, 0.5)
        self._lookup = {float(v): i for i, v in enumerate(self.axis)}

    def __len__(self):
        return self.positions_per_axis ** 4

    def __getitem__(self, index: int) -> SensorLayout:
        n = self.positions_per_axis
        if not 0 <= index < len(self):
            raise IndexError(index)
        index, j2y = divmod(index, n)
        index, j2x = divmod(index, n)
        j1x, j1y = divmod(index, n)
        ax = self.axis
        return SensorLayout((ax[j1x], ax[j1y]), (ax[j2x], ax[j2y]))

    def __iter__(self) -> Iterator[SensorLayout]:
        return (self[i] for i in range(len(self)))

    @property
    def designs(self) -> List[SensorLayout]:
        return list(self)

    def index_of(self, layout: SensorLayout) -> int:
        n = self.positions_per_axis
        try:
            j = [self._lookup[c] for c in layout.flat]
        except KeyError:
            raise ValueError(f"{layout} is not on the grid") from None
        return ((j[0] * n + j[1]) * n + j[2]) * n + j[3]


class WeightGrid:
    """n-by-n controller weights over [-1, 1]^2, row-major with w1 outer."""

    def __init__(self, values_per_axis: int = 121):
        self.values_per_axis = int(values_per_axis)
        self.axis = symmetric_axis(self.values_per_axis, 1.0)

    def __len__(self):
        return self.values_per_axis ** 2

    def __getitem__(self, index: int) -> ControllerWeights:
        if not 0 <= index < len(self):
            raise IndexError(index)
        i, j = divmod(index, self.values_per_axis)
        return ControllerWeights(self.axis[i], self.axis[j])

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    @property
    def weights(self) -> List[ControllerWeights]:
        return list(self)

    def arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        """Flattened (w1, w2) arrays in grid order."""
        w1, w2 = np.meshgrid(self.axis, self.axis, indexing="ij")
        return w1.ravel(), w2.ravel()


def make_design_grid(positions_per_axis: int = 9) -> DesignGrid:
    return DesignGrid(positions_per_axis)


def make_weight_grid(values_per_axis: int = 121) -> WeightGrid:
    return WeightGrid(values_per_axis)
