"""Summary statistics behind every aggregate visualization.

Quantiles use type-7 linear interpolation on the sorted sample; whiskers
follow Tukey's rule (most extreme values within 1.5 IQR of the quartiles),
clamped to the box edges when no sample falls between a fence and its
quartile. Histograms bin over the column's mapping domain rather than
the group's extent so that sibling groups share bins and stay comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from ._kernels import quantile_sorted
from .errors import StatsError

MEASURES = ("min", "max", "q1", "median", "q3", "mean")

HIST_MIN_BINS = 2
HIST_MAX_BINS = 20


def _clean(values) -> np.ndarray:
    """Float array of the non-missing values (None and NaN dropped)."""
    if isinstance(values, np.ndarray):
        arr = values.astype(np.float64, copy=False).ravel()
    else:
        arr = np.array([math.nan if v is None else float(v) for v in values],
                       dtype=np.float64)
    return arr[~np.isnan(arr)]


def _as_float_array(values) -> np.ndarray:
    if isinstance(values, np.ndarray):
        return values.astype(np.float64, copy=False)
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=np.float64)
    flat_in, flat_out = arr.ravel(), out.ravel()
    for i, v in enumerate(flat_in):
        flat_out[i] = math.nan if v is None else float(v)
    return out


@dataclass(frozen=True)
class BoxStats:
    min: float
    whisker_lo: float
    q1: float
    median: float
    q3: float
    whisker_hi: float
    max: float
    mean: float
    n: int
    outliers: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "min": self.min, "whisker_lo": self.whisker_lo, "q1": self.q1,
            "median": self.median, "q3": self.q3, "whisker_hi": self.whisker_hi,
            "max": self.max, "mean": self.mean, "n": self.n,
            "outliers": list(self.outliers),
        }


@dataclass(frozen=True)
class Histogram:
    edges: tuple[float, ...]
    counts: tuple[int, ...]
    missing_count: int

    def to_dict(self) -> dict:
        return {"edges": list(self.edges), "counts": list(self.counts),
                "missing": self.missing_count}


@dataclass(frozen=True)
class CategoryCounts:
    counts: tuple[int, ...]
    missing_count: int

    def to_dict(self) -> dict:
        return {"counts": list(self.counts), "missing": self.missing_count}


def box_stats(values) -> BoxStats:
    """Five-number summary + mean + Tukey whiskers + outlier list."""
    present = np.sort(_clean(values))
    if present.size == 0:
        raise StatsError("box_stats over an all-missing sample")
    offsets = np.array([0, present.size], dtype=np.int64)
    row = _kernels.seg_box_stats(present, offsets)[0]
    wlo, whi = row[1], row[5]
    outliers = present[(present < wlo) | (present > whi)]
    return BoxStats(
        min=float(row[0]), whisker_lo=float(wlo), q1=float(row[2]),
        median=float(row[3]), q3=float(row[4]), whisker_hi=float(whi),
        max=float(row[6]), mean=float(row[7]), n=int(row[8]),
        outliers=tuple(float(v) for v in outliers),
    )


def default_bin_count(n: int) -> int:
    return max(HIST_MIN_BINS, min(HIST_MAX_BINS, int(math.ceil(math.sqrt(n)))))


def histogram(values, domain: tuple[float, float],
              bin_count: Optional[int] = None) -> Histogram:
    """Equal-width histogram over ``domain`` (values outside clamp to edge bins)."""
    arr = _as_float_array(values).ravel()
    missing = int(np.isnan(arr).sum())
    n = arr.size - missing
    if n == 0:
        raise StatsError("histogram over an all-missing sample")
    if bin_count is None:
        bin_count = default_bin_count(n)
    if bin_count < 1:
        raise StatsError(f"bin_count must be >= 1, got {bin_count}")
    d0, d1 = float(domain[0]), float(domain[1])
    if d0 == d1:
        d0, d1 = d0 - 0.5, d1 + 0.5
    edges = np.linspace(d0, d1, bin_count + 1)
    counts, miss = _kernels.seg_histogram(arr, np.zeros(arr.size, dtype=np.int64),
                                          1, edges)
    return Histogram(edges=tuple(float(e) for e in edges),
                     counts=tuple(int(c) for c in counts[0]),
                     missing_count=int(miss[0]))


def category_counts(codes, n_categories: int) -> CategoryCounts:
    """Counts per category (codes index the category list, -1 = missing)."""
    arr = np.asarray(codes, dtype=np.int64)
    missing = int((arr < 0).sum())
    counts = np.bincount(arr[arr >= 0], minlength=n_categories)
    return CategoryCounts(counts=tuple(int(c) for c in counts),
                          missing_count=missing)


def stat_measure(values, measure: str) -> float:
    """One statistic of the non-missing values; shares box_stats arithmetic."""
    if measure not in MEASURES:
        raise StatsError(f"unknown measure {measure!r}")
    present = np.sort(_clean(values))
    if present.size == 0:
        raise StatsError(f"{measure} over an all-missing sample")
    if measure == "min":
        return float(present[0])
    if measure == "max":
        return float(present[-1])
    if measure == "mean":
        offsets = np.array([0, present.size], dtype=np.int64)
        return float(_kernels.seg_box_stats(present, offsets)[0][7])
    p = {"q1": 0.25, "median": 0.5, "q3": 0.75}[measure]
    return float(quantile_sorted(present, p))


def matrix_aggregate(block, direction: str):
    """Aggregate a rows x inner-columns block.

    direction='columns': one BoxStats per table row (inner columns merged
    into the cell). direction='rows': one BoxStats per inner column (drives
    the mean heatmap / envelope sparkline). direction='both': a single
    BoxStats over every non-missing entry.
    """
    arr = _as_float_array(block)
    if arr.ndim != 2 or arr.size == 0:
        raise StatsError("matrix_aggregate needs a non-empty 2-D block")
    if direction == "both":
        return box_stats(arr.ravel())
    if direction == "columns":
        return [box_stats(arr[i]) if not np.isnan(arr[i]).all() else None
                for i in range(arr.shape[0])]
    if direction == "rows":
        return [box_stats(arr[:, j]) if not np.isnan(arr[:, j]).all() else None
                for j in range(arr.shape[1])]
    raise StatsError(f"unknown direction {direction!r}")


def matrix_row_profile(block) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-inner-column (mean, q1, q3) arrays for the envelope sparkline."""
    arr = _as_float_array(block)
    t = np.ascontiguousarray(arr.T)
    means = _kernels.matrix_row_statistics(t, "mean")
    q1s = _kernels.matrix_row_statistics(t, "q1")
    q3s = _kernels.matrix_row_statistics(t, "q3")
    return means, q1s, q3s


def text_aggregate(values: Sequence, limit: int) -> tuple[list, int]:
    """First ``limit`` values in current row order plus an overflow count."""
    present = [v for v in values if v is not None]
    shown = present[:max(0, limit)]
    return shown, len(present) - len(shown)


def grouped_box_stats(values: np.ndarray, groups: Sequence[np.ndarray]):
    """BoxStats per group of row indices over one value array (None if empty)."""
    values = _as_float_array(values)
    segs = []
    offsets = [0]
    for idx in groups:
        seg = values[idx]
        seg = np.sort(seg[~np.isnan(seg)])
        segs.append(seg)
        offsets.append(offsets[-1] + seg.size)
    if offsets[-1] == 0:
        concat = np.zeros(0, dtype=np.float64)
    else:
        concat = np.concatenate(segs)
    table = _kernels.seg_box_stats(concat, np.asarray(offsets, dtype=np.int64))
    out = []
    for g, seg in enumerate(segs):
        row = table[g]
        if seg.size == 0:
            out.append(None)
            continue
        wlo, whi = row[1], row[5]
        outliers = seg[(seg < wlo) | (seg > whi)]
        out.append(BoxStats(
            min=float(row[0]), whisker_lo=float(wlo), q1=float(row[2]),
            median=float(row[3]), q3=float(row[4]), whisker_hi=float(whi),
            max=float(row[6]), mean=float(row[7]), n=int(row[8]),
            outliers=tuple(float(v) for v in outliers),
        ))
    return out
