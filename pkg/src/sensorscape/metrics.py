"""Overlap of per-environment success matrices and the two design scores.

Learnability is the fraction of the controller grid that succeeds in
every environment.  Forgetting resistance is the number of such
generalists over the number of controllers that succeed anywhere.
Both are computed from integer counts.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import DimensionMismatch

N_ENVIRONMENTS = 4


def overlap(*matrices) -> np.ndarray:
    """Element-wise sum of the four binary success matrices.

    Accepts either four matrices or a single stacked (4, n, n) array.
    """
    if len(matrices) == 1:
        matrices = tuple(matrices[0])
    if len(matrices) != N_ENVIRONMENTS:
        raise DimensionMismatch(f"expected {N_ENVIRONMENTS} matrices, got {len(matrices)}")
    arrays = [np.asarray(m) for m in matrices]
    shape = arrays[0].shape
    if len(shape) != 2 or shape[0] != shape[1]:
        raise DimensionMismatch(f"success matrices must be square, got {shape}")
    for m in arrays[1:]:
        if m.shape != shape:
            raise DimensionMismatch(f"shape {m.shape} does not match {shape}")
    out = np.zeros(shape, dtype=np.int64)
    for m in arrays:
        out += m.astype(np.int64)
    return out


def count_values(o: np.ndarray, k: int) -> int:
    if not 0 <= k <= N_ENVIRONMENTS:
        raise ValueError(f"k must be in 0..{N_ENVIRONMENTS}")
    return int(np.count_nonzero(np.asarray(o) == k))


def value_counts(o: np.ndarray) -> Tuple[int, ...]:
    """(g0, ..., g4) for an overlap matrix."""
    return tuple(count_values(o, k) for k in range(N_ENVIRONMENTS + 1))


def learnability_from_counts(g: Sequence[int]) -> Fraction:
    return Fraction(g[N_ENVIRONMENTS], sum(g))


def cf_resistance_from_counts(g: Sequence[int]) -> Fraction:
    solved_any = sum(g[1:])
    if solved_any == 0:
        return Fraction(0)
    return Fraction(g[N_ENVIRONMENTS], solved_any)


def learnability(o: np.ndarray) -> float:
    return float(learnability_from_counts(value_counts(o)))


def cf_resistance(o: np.ndarray) -> float:
    # A null overlap matrix scores 0.
    return float(cf_resistance_from_counts(value_counts(o)))


@dataclass(frozen=True)
class MetricPair:
    m_l: float
    m_cf: float


@dataclass(frozen=True)
class DesignRecord:
    """One line of the sweep results file."""

    design_index: int
    l1: Tuple[float, float]
    l2: Tuple[float, float]
    g: Tuple[int, ...]

    @property
    def n_controllers(self) -> int:
        return sum(self.g)

    @property
    def m_l(self) -> float:
        return float(learnability_from_counts(self.g))

    @property
    def m_cf(self) -> float:
        return float(cf_resistance_from_counts(self.g))

    @property
    def metrics(self) -> MetricPair:
        return MetricPair(self.m_l, self.m_cf)

    def to_json_line(self) -> str:
        def num(v):
            return format(float(v), ".17g")

        return (
            f'{{"design_index": {self.design_index}, '
            f'"l1": [{num(self.l1[0])}, {num(self.l1[1])}], '
            f'"l2": [{num(self.l2[0])}, {num(self.l2[1])}], '
            f'"g": [{", ".join(str(int(c)) for c in self.g)}], '
            f'"M_L": {num(self.m_l)}, "M_CF": {num(self.m_cf)}}}'
        )

    @classmethod
    def from_json(cls, obj) -> "DesignRecord":
        if isinstance(obj, str):
            obj = json.loads(obj)
        g = tuple(int(c) for c in obj["g"])
        if len(g) != N_ENVIRONMENTS + 1:
            raise ValueError(f"g must have {N_ENVIRONMENTS + 1} entries")
        return cls(int(obj["design_index"]), tuple(obj["l1"]), tuple(obj["l2"]), g)


_KEYS = {
    "M_L": (learnability_from_counts, cf_resistance_from_counts),
    "M_CF": (cf_resistance_from_counts, learnability_from_counts),
}


def rank_designs(records: Iterable[DesignRecord], key: str = "M_L",
                 top: int | None = None) -> List[DesignRecord]:
    """Best designs first.

    Ties on ``key`` are broken by the other metric (descending), then by
    design index (ascending).  Comparison uses exact fractions.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to rank")
    try:
        primary, secondary = _KEYS[key]
    except KeyError:
        raise ValueError(f"unknown metric {key!r}; use one of {sorted(_KEYS)}") from None
    ranked = sorted(records, key=lambda r: (-primary(r.g), -secondary(r.g), r.design_index))
    return ranked if top is None else ranked[:top]
