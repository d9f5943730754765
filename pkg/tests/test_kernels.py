"""The numba fast path and the numpy fallback must agree."""

import numpy as np
import pytest

from tablefold import _kernels as K


needs_numba = pytest.mark.skipif(not K.USING_NUMBA,
                                 reason="numba disabled or unavailable")


@needs_numba
def test_row_statistics_paths_agree(rng):
    block = rng.normal(size=(300, 9))
    block[rng.random(block.shape) < 0.15] = np.nan
    block[5, :] = np.nan  # one all-missing row
    for measure in ("min", "max", "mean"):
        code = K._MEASURE_CODE[measure]
        fast = K._nb_row_scan_statistics(np.ascontiguousarray(block), code)
        slow = K._np_row_statistics(block, code)
        if measure == "mean":
            np.testing.assert_allclose(fast, slow, rtol=0, atol=1e-12)
        else:
            np.testing.assert_array_equal(fast, slow)


@needs_numba
def test_seg_box_stats_paths_agree(rng):
    segs = [np.sort(rng.normal(size=int(rng.integers(1, 80)))) for _ in range(40)]
    segs.insert(3, np.zeros(0))  # empty segment
    concat = np.concatenate(segs)
    offsets = np.cumsum([0] + [len(s) for s in segs]).astype(np.int64)
    fast = K._nb_seg_box_stats(concat, offsets)
    slow = K._np_seg_box_stats(concat, offsets)
    np.testing.assert_allclose(fast[:, :7], slow[:, :7], rtol=0, atol=0)
    np.testing.assert_allclose(fast[:, 7], slow[:, 7], rtol=0, atol=1e-12)
    np.testing.assert_array_equal(fast[:, 8], slow[:, 8])


@needs_numba
def test_seg_histogram_paths_agree(rng):
    vals = rng.normal(size=5000)
    vals[rng.random(5000) < 0.1] = np.nan
    groups = rng.integers(-1, 6, size=5000).astype(np.int64)
    edges = np.linspace(-3, 3, 11)
    fast_c, fast_m = K._nb_seg_histogram(vals, groups, 6, edges)
    slow_c, slow_m = K._np_seg_histogram(vals, groups, 6, edges)
    np.testing.assert_array_equal(fast_c, slow_c)
    np.testing.assert_array_equal(fast_m, slow_m)


def test_quantile_sorted_formula():
    assert K.quantile_sorted(np.array([1.0, 2.0, 3.0, 4.0]), 0.5) == 2.5
    assert K.quantile_sorted(np.array([7.0]), 0.25) == 7.0


def test_histogram_out_of_domain_clamps():
    vals = np.array([-10.0, 0.5, 10.0])
    counts, missing = K.seg_histogram(vals, np.zeros(3, dtype=np.int64), 1,
                                      np.linspace(0, 1, 3))
    assert counts[0].tolist() == [1, 2]
    assert missing[0] == 0
