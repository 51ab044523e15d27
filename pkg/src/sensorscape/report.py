"""Data products: trajectory CSVs, overlap heatmaps and metric histograms."""
from __future__ import annotations

import bisect
import csv
import io
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np

from .dynamics import TRAJECTORY_COLUMNS
from .metrics import DesignRecord, overlap

# overlap value -> RGB; 4 (generalist) is cyan
PALETTE = np.array([
    (0, 0, 64),
    (0, 64, 160),
    (64, 128, 192),
    (128, 192, 224),
    (0, 255, 255),
], dtype=np.uint8)


class ResultsParseError(ValueError):
    pass


def _num(v) -> str:
    return format(float(v), ".17g")


def trajectory_csv(rows: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write(",".join(TRAJECTORY_COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_num(v) for v in row) + "\n")
    return buf.getvalue()


def write_trajectory_csv(path, rows: np.ndarray) -> None:
    Path(path).write_text(trajectory_csv(rows))


def load_records(path) -> List[DesignRecord]:
    path = Path(path)
    records = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(DesignRecord.from_json(line))
            except (ValueError, KeyError, TypeError) as exc:
                raise ResultsParseError(f"{path}:{lineno}: {exc}") from exc
    return records


def heatmap_ppm(matrices: np.ndarray) -> bytes:
    """Binary P6 image of the overlap matrix, one pixel per controller.

    Row i is the w1 index (top row w1 = -1), column j the w2 index.
    """
    o = overlap(matrices)
    n = o.shape[0]
    header = f"P6\n{n} {n}\n255\n".encode("ascii")
    return header + PALETTE[o].tobytes()


def write_heatmap(path, matrices: np.ndarray) -> None:
    Path(path).write_bytes(heatmap_ppm(matrices))


def histogram(values: Sequence[float], bins: int) -> List[Tuple[float, float, int]]:
    """Uniform bins over [0, 1]; right-open except the last, which is closed."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    edges = [i / bins for i in range(bins + 1)]
    counts = [0] * bins
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"metric value {v} outside [0, 1]")
        counts[min(bisect.bisect_right(edges, v) - 1, bins - 1)] += 1
    return [(edges[i], edges[i + 1], counts[i]) for i in range(bins)]


def histogram_csv(table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["bin_lower", "bin_upper", "count"])
    for lo, hi, c in table:
        w.writerow([repr(lo), repr(hi), c])
    return buf.getvalue()


def rank_table(records: Sequence[DesignRecord]) -> str:
    lines = [f"{'rank':>4}  {'index':>6}  {'l1':>17}  {'l2':>17}  {'M_L':>10}  {'M_CF':>10}"]
    for rank, r in enumerate(records, start=1):
        l1 = f"({r.l1[0]:+.3f}, {r.l1[1]:+.3f})"
        l2 = f"({r.l2[0]:+.3f}, {r.l2[1]:+.3f})"
        lines.append(f"{rank:>4}  {r.design_index:>6}  {l1:>17}  {l2:>17}  "
                     f"{r.m_l:>10.6f}  {r.m_cf:>10.6f}")
    return "\n".join(lines) + "\n"
