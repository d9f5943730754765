"""Benchmark the numba kernels against the pure-numpy fallbacks.

Usage:
    python3 benchmarks/bench_kernels.py [--rows 100000]

Runs every hot kernel on identical inputs through both paths and prints a
timing table with speedups. Set TABLEFOLD_NUMBA=0 to confirm the package
itself falls back cleanly; this script always imports both paths directly.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from tablefold import _kernels as K


def time_call(fn, *args, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_row_statistics(rng, n_rows):
    block = rng.normal(size=(n_rows, 27))
    block[rng.random(block.shape) < 0.05] = np.nan
    block = np.ascontiguousarray(block)
    rows = []
    for measure in ("min", "mean", "median"):
        code = K._MEASURE_CODE[measure]
        t_np = time_call(K._np_row_statistics, block, code)
        # quantiles stay on the numpy path in production: per-row sorting
        # under numba loses to the vectorized axis sort
        if K.USING_NUMBA and measure in ("min", "max", "mean"):
            K._nb_row_scan_statistics(block, code)  # compile
            t_nb = time_call(K._nb_row_scan_statistics, block, code)
        else:
            t_nb = float("nan")
        rows.append((f"row_statistics[{measure}] ({n_rows}x27)", t_np, t_nb))
    return rows


def bench_seg_box_stats(rng, n_rows):
    n_groups = 200
    segs = []
    for _ in range(n_groups):
        segs.append(np.sort(rng.normal(size=n_rows // n_groups)))
    concat = np.concatenate(segs)
    offsets = np.cumsum([0] + [len(s) for s in segs]).astype(np.int64)
    t_np = time_call(K._np_seg_box_stats, concat, offsets)
    if K.USING_NUMBA:
        K._nb_seg_box_stats(concat, offsets)
        t_nb = time_call(K._nb_seg_box_stats, concat, offsets)
    else:
        t_nb = float("nan")
    return [(f"seg_box_stats ({n_rows} values, {n_groups} groups)", t_np, t_nb)]


def bench_seg_histogram(rng, n_rows):
    vals = rng.normal(size=n_rows)
    vals[rng.random(n_rows) < 0.05] = np.nan
    groups = rng.integers(0, 50, size=n_rows).astype(np.int64)
    edges = np.linspace(-4, 4, 21)
    t_np = time_call(K._np_seg_histogram, vals, groups, 50, edges)
    if K.USING_NUMBA:
        K._nb_seg_histogram(vals, groups, 50, edges)
        t_nb = time_call(K._nb_seg_histogram, vals, groups, 50, edges)
    else:
        t_nb = float("nan")
    return [(f"seg_histogram ({n_rows} values, 50 groups, 20 bins)", t_np, t_nb)]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rows", type=int, default=100_000)
    args = parser.parse_args()
    rng = np.random.default_rng(0)

    print(f"numba available and enabled: {K.USING_NUMBA}")
    rows = []
    rows += bench_row_statistics(rng, args.rows)
    rows += bench_seg_box_stats(rng, args.rows)
    rows += bench_seg_histogram(rng, args.rows)

    width = max(len(name) for name, _, _ in rows)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        if t_nb == t_nb:
            nb = f"{t_nb * 1000:.2f} ms"
            speed = f"{t_np / t_nb:.1f}x"
        else:
            nb, speed = "-", "-"
        print(f"{name:<{width}}  {t_np * 1000:>7.2f} ms  {nb:>10}  {speed:>8}")


if __name__ == "__main__":
    main()
