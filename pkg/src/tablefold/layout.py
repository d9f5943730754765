"""Row geometry: heights and offsets for overview and detail modes.

Detail mode gives every item a uniform readable height; overview mode
shrinks unselected items (down to one pixel) so the table fits the
viewport where possible, keeping aggregates, headers, and selected items
at fixed heights. Pixel constants are parameters; the defaults follow the
"aggregate about twice a detail row, items no smaller than one pixel"
relations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import DETAIL, OVERVIEW, RowList


@dataclass(frozen=True)
class LayoutParams:
    detail_row_h: float = 20.0
    aggregate_row_h: float = 40.0
    header_row_h: float = 20.0
    min_item_h: float = 1.0
    selected_overview_h: float = 20.0
    viewport_h: float = 600.0

    def to_dict(self) -> dict:
        return {"detail_row_h": self.detail_row_h,
                "aggregate_row_h": self.aggregate_row_h,
                "header_row_h": self.header_row_h,
                "min_item_h": self.min_item_h,
                "selected_overview_h": self.selected_overview_h,
                "viewport_h": self.viewport_h}


DEFAULT_PARAMS = LayoutParams()


@dataclass
class Layout:
    heights: np.ndarray
    offsets: np.ndarray  # y of each row; one trailing entry = total_height
    total_height: float
    fits: bool

    def __len__(self) -> int:
        return len(self.heights)

    def row_band(self, i: int) -> tuple[float, float]:
        return float(self.offsets[i]), float(self.heights[i])

    def runs(self) -> list[list[float]]:
        """Run-length encoding [[count, height], ...] for compact transport."""
        out: list[list[float]] = []
        for h in self.heights:
            h = float(h)
            if out and out[-1][1] == h:
                out[-1][0] += 1
            else:
                out.append([1, h])
        return [[int(c), h] for c, h in out]


def compute_layout(rows, mode: str, params: LayoutParams = DEFAULT_PARAMS,
                   selection=frozenset()) -> Layout:
    """Heights + offsets for the given render rows.

    Overview mode: fixed-height rows (aggregates, headers, selected items)
    claim their budget first; the remaining viewport is split evenly over
    unselected items, clamped to [min_item_h, detail_row_h].
    """
    n = len(rows)
    if isinstance(rows, RowList):
        kinds = rows.kinds
        refs = rows.refs
    else:
        kinds = np.array([0 if r.kind == "item" else (1 if r.kind == "header" else 2)
                          for r in rows], dtype=np.int8)
        refs = np.array([r.row_id if r.kind == "item" else -1 for r in rows],
                        dtype=np.int64)
    heights = np.empty(n, dtype=np.float64)
    heights[kinds == 1] = params.header_row_h
    heights[kinds == 2] = params.aggregate_row_h
    items = kinds == 0
    if mode == DETAIL:
        heights[items] = params.detail_row_h
    elif mode == OVERVIEW:
        if selection:
            sel_arr = np.zeros(n, dtype=bool)
            sel_set = np.fromiter((int(r) for r in selection), dtype=np.int64)
            sel_arr[items] = np.isin(refs[items], sel_set)
        else:
            sel_arr = np.zeros(n, dtype=bool)
        heights[items & sel_arr] = params.selected_overview_h
        plain = items & ~sel_arr
        n_plain = int(plain.sum())
        if n_plain:
            fixed = float(heights[~plain].sum())
            h = np.floor((params.viewport_h - fixed) / n_plain)
            h = min(params.detail_row_h, max(params.min_item_h, h))
            heights[plain] = h
    else:
        raise ValueError(f"unknown layout mode {mode!r}")
    offsets = np.zeros(n + 1, dtype=np.float64)
    np.cumsum(heights, out=offsets[1:])
    total = float(offsets[-1])
    return Layout(heights=heights, offsets=offsets, total_height=total,
                  fits=total <= params.viewport_h)


def visible_range(layout: Layout, scroll_top: float, viewport_h: float,
                  overscan: int = 0) -> tuple[int, int]:
    """Minimal [first, last) index range covering the scrolled viewport,
    widened by ``overscan`` rows on each side and clamped to bounds."""
    n = len(layout)
    if n == 0:
        return (0, 0)
    top = max(0.0, float(scroll_top))
    bottom = top + float(viewport_h)
    starts = layout.offsets[:-1]
    first = int(np.searchsorted(starts, top, side="right")) - 1
    last = int(np.searchsorted(starts, bottom, side="left"))
    first = max(0, first - int(overscan))
    last = min(n, last + int(overscan))
    return (first, max(first, last))
