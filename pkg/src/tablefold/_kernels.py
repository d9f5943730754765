"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The numba path is used when numba imports successfully and the environment
variable ``TABLEFOLD_NUMBA`` is not set to ``0``/``false``/``off``. Both
paths implement the same type-7 quantile formula and bin-edge rule, so
counts and quantiles are identical across paths (means may differ at the
level of float summation order). The benchmark in
benchmarks/bench_kernels.py compares their throughput.
"""

from __future__ import annotations

import math
import os

import numpy as np

_MEASURES = ("min", "max", "mean", "q1", "median", "q3")
_MEASURE_CODE = {m: i for i, m in enumerate(_MEASURES)}
_Q_FOR_CODE = (0.0, 1.0, -1.0, 0.25, 0.5, 0.75)  # -1 marks the mean


def _numba_enabled() -> bool:
    flag = os.environ.get("TABLEFOLD_NUMBA", "1").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return False
    try:
        import numba  # noqa: F401
        return True
    except ImportError:
        return False


USING_NUMBA = _numba_enabled()


def quantile_sorted(sorted_vals, p: float) -> float:
    """Type-7 quantile of an ascending, NaN-free sample."""
    n = len(sorted_vals)
    if n == 0:
        return math.nan
    pos = p * (n - 1)
    lo = int(math.floor(pos))
    hi = lo + 1 if lo + 1 < n else lo
    frac = pos - lo
    a = float(sorted_vals[lo])
    b = float(sorted_vals[hi])
    return a + (b - a) * frac


# ---------------------------------------------------------------------------
# numpy fallback implementations

def _np_row_statistics(block: np.ndarray, code: int) -> np.ndarray:
    """Per-row statistic over a 2-D block, skipping NaN entries."""
    n_rows, n_cols = block.shape
    srt = np.sort(block, axis=1)  # NaNs sort to the end
    counts = n_cols - np.isnan(block).sum(axis=1)
    out = np.full(n_rows, np.nan)
    present = counts > 0
    if not present.any():
        return out
    if code == _MEASURE_CODE["mean"]:
        with np.errstate(invalid="ignore"):
            sums = np.nansum(block, axis=1)
        out[present] = sums[present] / counts[present]
        return out
    p = _Q_FOR_CODE[code]
    pos = p * (counts - 1)
    lo = np.floor(pos).astype(np.int64)
    hi = np.minimum(lo + 1, counts - 1)
    lo = np.clip(lo, 0, None)
    hi = np.clip(hi, 0, None)
    frac = pos - lo
    a = np.take_along_axis(srt, lo[:, None], axis=1)[:, 0]
    b = np.take_along_axis(srt, hi[:, None], axis=1)[:, 0]
    res = a + (b - a) * frac
    out[present] = res[present]
    return out


def _np_seg_box_stats(sorted_vals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Box statistics per segment of a concatenated sorted sample.

    Returns an (n_segments, 9) array of
    [min, whisker_lo, q1, median, q3, whisker_hi, max, mean, n];
    all-NaN rows for empty segments.
    """
    k = len(offsets) - 1
    out = np.full((k, 9), np.nan)
    for g in range(k):
        seg = sorted_vals[offsets[g]:offsets[g + 1]]
        n = len(seg)
        if n == 0:
            continue
        q1 = quantile_sorted(seg, 0.25)
        med = quantile_sorted(seg, 0.5)
        q3 = quantile_sorted(seg, 0.75)
        iqr = q3 - q1
        fence_lo = q1 - 1.5 * iqr
        fence_hi = q3 + 1.5 * iqr
        i = 0
        while seg[i] < fence_lo:
            i += 1
        j = n - 1
        while seg[j] > fence_hi:
            j -= 1
        # whiskers never retreat past the box edges (degenerate gaps)
        wlo = seg[i] if seg[i] < q1 else q1
        whi = seg[j] if seg[j] > q3 else q3
        out[g] = (seg[0], wlo, q1, med, q3, whi, seg[n - 1],
                  float(seg.sum()) / n, n)
    return out


def _np_seg_histogram(values: np.ndarray, group_index: np.ndarray,
                      n_groups: int, edges: np.ndarray):
    """Per-group histogram counts over shared bin edges.

    Values outside the edge range land in the first/last bin so that counts
    plus missing always sum to the group size. group_index -1 excludes a row.
    Returns (counts (n_groups, n_bins) int64, missing (n_groups,) int64).
    """
    n_bins = len(edges) - 1
    counts = np.zeros((n_groups, n_bins), dtype=np.int64)
    missing = np.zeros(n_groups, dtype=np.int64)
    keep = group_index >= 0
    vals = values[keep]
    grp = group_index[keep]
    nan = np.isnan(vals)
    np.add.at(missing, grp[nan], 1)
    vals = vals[~nan]
    grp = grp[~nan]
    if len(vals):
        idx = np.searchsorted(edges[1:-1], vals, side="right")
        flat = np.bincount(grp * n_bins + idx, minlength=n_groups * n_bins)
        counts += flat.reshape(n_groups, n_bins)
    return counts, missing


# ---------------------------------------------------------------------------
# numba fast paths

if USING_NUMBA:
    from numba import njit

    @njit(cache=True)
    def _nb_row_scan_statistics(block, code):
        # min / max / mean need only a scan; quantiles route to numpy
        n_rows, n_cols = block.shape
        out = np.full(n_rows, np.nan)
        for i in range(n_rows):
            n = 0
            total = 0.0
            lo = math.inf
            hi = -math.inf
            for j in range(n_cols):
                v = block[i, j]
                if not math.isnan(v):
                    total += v
                    if v < lo:
                        lo = v
                    if v > hi:
                        hi = v
                    n += 1
            if n == 0:
                continue
            if code == 0:
                out[i] = lo
            elif code == 1:
                out[i] = hi
            else:
                out[i] = total / n
        return out

    @njit(cache=True)
    def _nb_quantile_sorted(seg, p):
        n = len(seg)
        pos = p * (n - 1)
        lo = int(math.floor(pos))
        hi = lo + 1 if lo + 1 < n else lo
        frac = pos - lo
        a = seg[lo]
        b = seg[hi]
        return a + (b - a) * frac

    @njit(cache=True)
    def _nb_seg_box_stats(sorted_vals, offsets):
        k = len(offsets) - 1
        out = np.full((k, 9), np.nan)
        for g in range(k):
            start = offsets[g]
            stop = offsets[g + 1]
            n = stop - start
            if n == 0:
                continue
            seg = sorted_vals[start:stop]
            q1 = _nb_quantile_sorted(seg, 0.25)
            med = _nb_quantile_sorted(seg, 0.5)
            q3 = _nb_quantile_sorted(seg, 0.75)
            iqr = q3 - q1
            fence_lo = q1 - 1.5 * iqr
            fence_hi = q3 + 1.5 * iqr
            i = 0
            while seg[i] < fence_lo:
                i += 1
            j = n - 1
            while seg[j] > fence_hi:
                j -= 1
            total = 0.0
            for t in range(n):
                total += seg[t]
            out[g, 0] = seg[0]
            out[g, 1] = seg[i] if seg[i] < q1 else q1
            out[g, 2] = q1
            out[g, 3] = med
            out[g, 4] = q3
            out[g, 5] = seg[j] if seg[j] > q3 else q3
            out[g, 6] = seg[n - 1]
            out[g, 7] = total / n
            out[g, 8] = n
        return out

    @njit(cache=True)
    def _nb_seg_histogram(values, group_index, n_groups, edges):
        n_bins = len(edges) - 1
        counts = np.zeros((n_groups, n_bins), dtype=np.int64)
        missing = np.zeros(n_groups, dtype=np.int64)
        inner = edges[1:-1]
        for i in range(len(values)):
            g = group_index[i]
            if g < 0:
                continue
            v = values[i]
            if math.isnan(v):
                missing[g] += 1
                continue
            idx = np.searchsorted(inner, v, side="right")
            counts[g, idx] += 1
        return counts, missing


# ---------------------------------------------------------------------------
# dispatchers

def matrix_row_statistics(block: np.ndarray, measure: str) -> np.ndarray:
    """Per-row statistic (min/max/mean/q1/median/q3) skipping NaN entries.

    Scans (min/max/mean) take the numba path when available; quantiles
    always use the vectorized numpy axis-sort, which benchmarks faster
    than per-row sorting under numba.
    """
    code = _MEASURE_CODE[measure]
    block = np.ascontiguousarray(block, dtype=np.float64)
    if USING_NUMBA and measure in ("min", "max", "mean"):
        return _nb_row_scan_statistics(block, code)
    return _np_row_statistics(block, code)


def seg_box_stats(sorted_vals: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    sorted_vals = np.ascontiguousarray(sorted_vals, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    if USING_NUMBA:
        return _nb_seg_box_stats(sorted_vals, offsets)
    return _np_seg_box_stats(sorted_vals, offsets)


def seg_histogram(values: np.ndarray, group_index: np.ndarray,
                  n_groups: int, edges: np.ndarray):
    values = np.ascontiguousarray(values, dtype=np.float64)
    group_index = np.ascontiguousarray(group_index, dtype=np.int64)
    edges = np.ascontiguousarray(edges, dtype=np.float64)
    if USING_NUMBA:
        return _nb_seg_histogram(values, group_index, n_groups, edges)
    return _np_seg_histogram(values, group_index, n_groups, edges)
