import numpy as np
import pytest

from tablefold import data as da
from tablefold.engine import GroupCriterion, init_state
from tablefold.layout import (DEFAULT_PARAMS, LayoutParams, compute_layout,
                              visible_range)

from _oracles import visible_range_oracle
from _synth import make_dataset


def flat_state(n):
    ds = make_dataset([("v", da.NUMERICAL, list(range(n)))], n)
    return init_state(ds)


def grouped_state(n, aggregate=False):
    ds = make_dataset([
        ("g", da.CATEGORICAL, (["a", "b"], [0] * (n // 2) + [1] * (n - n // 2))),
        ("v", da.NUMERICAL, list(range(n))),
    ], n)
    state = init_state(ds)
    state.set_grouping([GroupCriterion("categorical", "g")])
    if aggregate:
        state.toggle_aggregate(("a",), True)
    return state


class TestDetail:
    def test_heights_and_offsets(self):
        state = grouped_state(4, aggregate=True)
        # rows: group(a), header(b), item, item
        lay = compute_layout(state.traverse(), "detail")
        assert lay.heights.tolist() == [40, 20, 20, 20]
        assert lay.offsets[:-1].tolist() == [0, 40, 60, 80]
        assert lay.total_height == 100

    def test_contiguous(self):
        state = flat_state(50)
        lay = compute_layout(state.traverse(), "detail")
        diffs = np.diff(lay.offsets)
        assert np.array_equal(diffs, lay.heights)


class TestOverview:
    def test_500_items_fit(self):
        lay = compute_layout(flat_state(500).traverse(), "overview",
                             LayoutParams(viewport_h=600))
        assert set(lay.heights.tolist()) == {1.0}
        assert lay.total_height == 500
        assert lay.fits

    def test_1000_items_scrollbar(self):
        lay = compute_layout(flat_state(1000).traverse(), "overview",
                             LayoutParams(viewport_h=600))
        assert set(lay.heights.tolist()) == {1.0}
        assert lay.total_height == 1000
        assert not lay.fits

    def test_item_height_capped_at_detail(self):
        lay = compute_layout(flat_state(3).traverse(), "overview",
                             LayoutParams(viewport_h=600))
        assert set(lay.heights.tolist()) == {20.0}

    def test_selected_item_expanded(self):
        state = flat_state(500)
        state.set_selection({42})
        state.set_mode("overview")
        lay = compute_layout(state.traverse(), "overview",
                             LayoutParams(viewport_h=600), state.selection)
        assert lay.heights[42] == 20.0
        assert lay.heights[0] == 1.0

    def test_fixed_rows_keep_height(self):
        state = grouped_state(200, aggregate=True)
        lay = compute_layout(state.traverse(), "overview",
                             LayoutParams(viewport_h=300))
        assert lay.heights[0] == 40.0  # aggregated group
        assert lay.heights[1] == 20.0  # header

    def test_fit_guarantee(self, rng):
        params = LayoutParams(viewport_h=600)
        for _ in range(20):
            n = int(rng.integers(1, 560))
            lay = compute_layout(flat_state(n).traverse(), "overview", params)
            if n * params.min_item_h <= params.viewport_h:
                assert lay.fits

    def test_mode_toggle_lossless(self):
        state = grouped_state(100)
        params = LayoutParams(viewport_h=400)
        a = compute_layout(state.traverse(), "overview", params)
        compute_layout(state.traverse(), "detail", params)
        b = compute_layout(state.traverse(), "overview", params)
        assert np.array_equal(a.heights, b.heights)


class TestVisibleRange:
    def test_uniform(self):
        lay = compute_layout(flat_state(100).traverse(), "detail")
        assert visible_range(lay, 100, 200) == (5, 15)

    def test_scroll_zero(self):
        lay = compute_layout(flat_state(100).traverse(), "detail")
        first, last = visible_range(lay, 0, 200)
        assert first == 0

    def test_overscan_clamped(self):
        lay = compute_layout(flat_state(10).traverse(), "detail")
        assert visible_range(lay, 0, 100, overscan=5) == (0, 10)

    def test_empty(self):
        lay = compute_layout(flat_state(0).traverse(), "detail")
        assert visible_range(lay, 0, 100) == (0, 0)

    def test_random_layouts_vs_oracle(self, rng):
        for _ in range(300):
            n = int(rng.integers(1, 80))
            heights = rng.integers(1, 40, size=n).astype(float)
            offsets = np.zeros(n + 1)
            np.cumsum(heights, out=offsets[1:])
            from tablefold.layout import Layout
            lay = Layout(heights=heights, offsets=offsets,
                         total_height=float(offsets[-1]), fits=False)
            viewport = float(rng.integers(10, 300))
            max_scroll = max(0.0, lay.total_height - viewport)
            scroll = float(rng.uniform(0, max_scroll))
            overscan = int(rng.integers(0, 4))
            got = visible_range(lay, scroll, viewport, overscan)
            ref = visible_range_oracle(offsets, n, scroll, viewport, overscan)
            assert got == ref

    def test_range_length_bound(self, rng):
        # minimal covering can exceed ceil(viewport/min_h) by one row when
        # both viewport edges land strictly inside rows
        for _ in range(100):
            n = int(rng.integers(5, 60))
            heights = rng.integers(2, 30, size=n).astype(float)
            offsets = np.zeros(n + 1)
            np.cumsum(heights, out=offsets[1:])
            from tablefold.layout import Layout
            lay = Layout(heights=heights, offsets=offsets,
                         total_height=float(offsets[-1]), fits=False)
            viewport = float(rng.integers(10, 200))
            scroll = float(rng.uniform(0, max(0.0, lay.total_height - viewport)))
            overscan = int(rng.integers(0, 3))
            first, last = visible_range(lay, scroll, viewport, overscan)
            if last > first:
                min_h = heights[max(0, first):last].min()
                bound = int(np.ceil(viewport / min_h)) + 1 + 2 * overscan
                assert last - first <= bound


class TestRuns:
    def test_rle(self):
        state = grouped_state(6, aggregate=True)
        lay = compute_layout(state.traverse(), "detail")
        runs = lay.runs()
        assert runs[0] == [1, 40.0]
        assert sum(c for c, _ in runs) == len(lay)
