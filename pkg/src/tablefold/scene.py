"""Resolution-aware render description: window rows x leaf columns -> primitives.

A Scene is a serializable description of the visible window: one cell per
(row, leaf display column), each holding resolved primitives (rect, line,
circle, text, path) with absolute pixel geometry and resolved colors.
Missing scalar cells contain exactly one dash primitive. Cost is
proportional to the window, never to the table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import columns as cols
from . import data as da
from . import mapping as mp
from . import stats as st
from .engine import DETAIL, GROUP, HEADER, ITEM, TableState
from .errors import SceneError
from .layout import Layout

# item encodings
BAR = "bar"
DOT = "dot"
PROPORTIONAL_SYMBOL = "proportional_symbol"
BRIGHTNESS = "brightness"
STRING = "string"
COLOR_CELL = "color_cell"
CATEGORY_MATRIX = "category_matrix"
HEATMAP = "heatmap"
BARS = "bars"
SPARKLINE = "sparkline"
STACKED_BAR_ITEM = "stacked_bar_item"
INTERLEAVED_CELL = "interleaved"

# aggregate encodings
HISTOGRAM = "histogram"
BOXPLOT = "boxplot"
STACKED_BAR = "stacked_bar"
BRIGHTNESS_MATRIX = "brightness_matrix"
EXAMPLES = "examples"
DOTPLOT = "dotplot"
MEAN_HEATMAP = "mean_heatmap"
ENVELOPE_SPARKLINE = "envelope_sparkline"

FULL = "full"
COMPACT = "compact"
OMIT = "omit"

#: directive thresholds in px (documented defaults; Fig-style qualitative rules)
FULL_MIN_H = 14.0
COMPACT_MIN_H = 4.0

#: encodings with no adequate down-scaled complement below COMPACT_MIN_H
_OMIT_BELOW_COMPACT = frozenset({STRING, PROPORTIONAL_SYMBOL, DOT, EXAMPLES})

LEGAL_ENCODINGS = {
    (da.NUMERICAL, False): frozenset({BAR, DOT, PROPORTIONAL_SYMBOL, BRIGHTNESS, STRING}),
    (da.NUMERICAL, True): frozenset({HISTOGRAM, BOXPLOT}),
    (da.CATEGORICAL, False): frozenset({COLOR_CELL, CATEGORY_MATRIX, STRING}),
    (da.CATEGORICAL, True): frozenset({HISTOGRAM, STACKED_BAR, BRIGHTNESS_MATRIX}),
    (da.TEXT, False): frozenset({STRING}),
    (da.TEXT, True): frozenset({EXAMPLES}),
    (da.MATRIX, False): frozenset({HEATMAP, BARS, SPARKLINE}),
    (da.MATRIX, True): frozenset({BOXPLOT, HISTOGRAM, DOTPLOT, MEAN_HEATMAP,
                                  ENVELOPE_SPARKLINE}),
}


def default_encoding(column_kind: str, aggregated: bool) -> str:
    defaults = {
        (da.NUMERICAL, False): BAR,
        (da.NUMERICAL, True): HISTOGRAM,
        (da.CATEGORICAL, False): COLOR_CELL,
        (da.CATEGORICAL, True): STACKED_BAR,
        (da.TEXT, False): STRING,
        (da.TEXT, True): EXAMPLES,
        (da.MATRIX, False): HEATMAP,
        (da.MATRIX, True): BOXPLOT,
    }
    return defaults[(column_kind, aggregated)]


def compact_variant(encoding: str, height: float) -> str:
    """full / compact / omit directive for an encoding at a cell height."""
    if height >= FULL_MIN_H:
        return FULL
    if height >= COMPACT_MIN_H:
        return COMPACT
    return OMIT if encoding in _OMIT_BELOW_COMPACT else COMPACT


def check_encoding(spec: cols.ColumnSpec, dataset: da.Dataset,
                   aggregated: bool, kind: str):
    """Raise SceneError unless ``kind`` is legal for this column."""
    if spec.kind == cols.STACKED:
        legal = frozenset({STACKED_BAR_ITEM}) if not aggregated \
            else frozenset({BOXPLOT, HISTOGRAM})
    elif spec.kind in (cols.REDUCER, cols.SCRIPTED):
        legal = LEGAL_ENCODINGS[(da.NUMERICAL, aggregated)]
    elif spec.kind == cols.DATA:
        legal = LEGAL_ENCODINGS[(dataset.column(spec.column_id).kind, aggregated)]
    elif spec.kind == cols.IMPOSITION:
        legal = LEGAL_ENCODINGS[(da.NUMERICAL, aggregated)]
    else:
        raise SceneError(f"column {spec.id!r} ({spec.kind}) has a fixed encoding")
    if kind not in legal:
        raise SceneError(f"encoding {kind!r} is illegal for column {spec.id!r} "
                         f"({'aggregate' if aggregated else 'item'})")


@dataclass(frozen=True)
class Theme:
    palette: tuple[str, ...] = da.PALETTE
    accent: str = "#1f77b4"
    box_fill: str = "#9ecae1"
    box_stroke: str = "#31597a"
    bar_fill: str = "#1f77b4"
    hist_fill: str = "#7f9fbf"
    text_color: str = "#222222"
    muted_color: str = "#888888"
    grid_color: str = "#dddddd"
    background: str = "#ffffff"
    font_family: str = "sans-serif"
    font_size: float = 10.0
    char_width: float = 6.0  # average glyph width estimate for truncation

    def category_color(self, index: int) -> str:
        return self.palette[index % len(self.palette)]


DEFAULT_THEME = Theme()

GROUP_GUTTER_W = 150.0
CELL_PAD_X = 2.0
FULL_PAD_Y = 2.0


def _lerp_brightness(base_hex: str, t: float) -> str:
    """White -> base color interpolation for brightness encodings."""
    r = int(base_hex[1:3], 16)
    g = int(base_hex[3:5], 16)
    b = int(base_hex[5:7], 16)
    t = min(1.0, max(0.0, t))
    mix = lambda c: int(round(255 + (c - 255) * t))  # noqa: E731
    return f"#{mix(r):02x}{mix(g):02x}{mix(b):02x}"


def _truncate(text: str, width: float, theme: Theme) -> str:
    limit = max(1, int(width // theme.char_width))
    if len(text) <= limit:
        return text
    if limit <= 3:
        return text[:limit]
    return text[:limit - 3] + "..."


@dataclass
class Cell:
    column_id: str
    x: float
    y: float
    w: float
    h: float
    encoding: str
    directive: str
    missing: bool = False
    primitives: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"column": self.column_id, "x": self.x, "y": self.y,
                "w": self.w, "h": self.h, "encoding": self.encoding,
                "directive": self.directive, "missing": self.missing,
                "primitives": self.primitives}


@dataclass
class SceneRow:
    index: int
    kind: str  # item | header | group
    y: float
    h: float
    row_id: Optional[int] = None
    group: Optional[dict] = None  # {"path", "label", "count", "depth"}
    cells: list = field(default_factory=list)

    def to_dict(self) -> dict:
        doc = {"index": self.index, "kind": self.kind, "y": self.y, "h": self.h,
               "cells": [c.to_dict() for c in self.cells]}
        if self.row_id is not None:
            doc["row"] = self.row_id
        if self.group is not None:
            doc["group"] = self.group
        return doc


@dataclass
class Scene:
    version: int
    first: int
    last: int
    width: float
    height: float
    columns: list
    rows: list

    def to_dict(self) -> dict:
        return {"protocol_version": 1, "version": self.version,
                "first": self.first, "last": self.last,
                "width": self.width, "height": self.height,
                "columns": self.columns,
                "rows": [r.to_dict() for r in self.rows]}

    def primitive_count(self) -> int:
        return sum(len(c.primitives) for r in self.rows for c in r.cells)


def _column_bands(state: TableState) -> tuple[list, float]:
    """x offsets of the leaf columns, after the group gutter when grouping."""
    x = GROUP_GUTTER_W if state.grouping else 0.0
    bands = []
    for spec in state.leaf_columns():
        bands.append((spec, x))
        x += spec.width
    return bands, x


def build_scene(state: TableState, layout: Layout, window: tuple[int, int],
                overrides: Optional[dict] = None,
                theme: Theme = DEFAULT_THEME) -> Scene:
    """Build the scene for rows [first, last) of the traversal.

    ``overrides`` maps column id to {"item": kind, "aggregate": kind};
    it is merged over the state's stored encodings and checked for
    legality. Work is proportional to the window size.
    """
    rows = state.traverse()
    first, last = int(window[0]), int(window[1])
    if not (0 <= first <= last <= len(rows)):
        raise SceneError(f"window [{first}, {last}) outside layout bounds "
                         f"(0..{len(rows)})")
    if len(layout) != len(rows):
        raise SceneError("layout does not match the current traversal")
    merged: dict = {}
    for source in (state.encodings, overrides or {}):
        for cid, slots in source.items():
            merged.setdefault(cid, {}).update(slots)
    bands, total_w = _column_bands(state)
    for cid, slots in merged.items():
        spec = state.find_column(cid)
        if spec is None:
            raise SceneError(f"encoding override for unknown column {cid!r}")
        for slot, kind in slots.items():
            check_encoding(spec, state.dataset, slot == "aggregate", kind)

    scene_rows = []
    painter = _CellPainter(state, merged, theme)
    for i in range(first, last):
        rr = rows[i]
        y, h = layout.row_band(i)
        if rr.kind == ITEM:
            srow = SceneRow(index=i, kind=ITEM, y=y, h=h, row_id=rr.row_id)
            for spec, x in bands:
                srow.cells.append(painter.item_cell(spec, rr.row_id, x, y, h))
        elif rr.kind == HEADER:
            node = rr.group
            srow = SceneRow(index=i, kind=HEADER, y=y, h=h, group={
                "path": list(node.path), "label": node.label,
                "count": node.size, "depth": node.depth})
            srow.cells.append(painter.header_cell(node, y, h, total_w))
        else:
            node = rr.group
            srow = SceneRow(index=i, kind=GROUP, y=y, h=h, group={
                "path": list(node.path), "label": node.label,
                "count": node.size, "depth": node.depth})
            srow.cells.append(painter.group_label_cell(node, y, h))
            for spec, x in bands:
                srow.cells.append(painter.aggregate_cell(spec, node, x, y, h))
        scene_rows.append(srow)

    columns = [{"id": spec.id, "label": spec.label, "kind": spec.kind,
                "x": x, "w": spec.width} for spec, x in bands]
    height = float(layout.total_height)
    return Scene(version=state.version, first=first, last=last,
                 width=total_w, height=height, columns=columns, rows=scene_rows)


class _CellPainter:
    """Paints one cell at a time; all geometry in absolute document pixels."""

    def __init__(self, state: TableState, encodings: dict, theme: Theme):
        self.state = state
        self.ds = state.dataset
        self.encodings = encodings
        self.theme = theme
        self._mapspec: dict = {}    # per column id
        self._enc: dict = {}        # (column id, aggregated) -> encoding
        self._mapped_arr: dict = {}  # column id -> (mapped, oob, raw)

    def _mapped(self, spec: cols.ColumnSpec):
        """(unit values clamped to [0,1], out-of-range mask, raw values)."""
        hit = self._mapped_arr.get(spec.id)
        if hit is None:
            mapped, oob = self.state.unit_values(spec)
            hit = (mapped, oob, self.state.numeric_values(spec))
            self._mapped_arr[spec.id] = hit
        return hit

    # -- encoding selection ------------------------------------------------

    def encoding_for(self, spec: cols.ColumnSpec, aggregated: bool) -> str:
        key = (spec.id, aggregated)
        cached = self._enc.get(key)
        if cached is not None:
            return cached
        chosen = self.encodings.get(spec.id, {}).get(
            "aggregate" if aggregated else "item")
        if chosen:
            out = chosen
        elif spec.kind == cols.DATA:
            out = default_encoding(self.ds.column(spec.column_id).kind, aggregated)
        elif spec.kind == cols.STACKED:
            out = BOXPLOT if aggregated else STACKED_BAR_ITEM
        elif spec.kind == cols.INTERLEAVED:
            out = INTERLEAVED_CELL
        else:  # imposition / reducer / scripted behave numerically
            out = default_encoding(da.NUMERICAL, aggregated)
        self._enc[key] = out
        return out

    # -- helpers -------------------------------------------------------------

    def _dash(self, x, y, w, h):
        cx = x + w / 2.0
        cy = y + h / 2.0
        half = min(4.0, w / 4.0)
        return {"kind": "line", "x1": cx - half, "y1": cy, "x2": cx + half,
                "y2": cy, "stroke": self.theme.muted_color, "cls": "missing"}

    def _mapped_scalar(self, spec: cols.ColumnSpec, row_id: int):
        mapped, oob, raw = self._mapped(spec)
        v = float(mapped[row_id])
        if math.isnan(v):
            return None, None, False
        return v, float(raw[row_id]), bool(oob[row_id])

    def _matrix_mapping(self, col: da.ColumnDef) -> mp.MappingSpec:
        key = "@matrix:" + col.id
        cached = self._mapspec.get(key)
        if cached is None:
            base = self.state.mapping_for(col.id)
            cached = base if base.clip else mp.MappingSpec(
                kind=base.kind, domain=base.domain, clip=True)
            self._mapspec[key] = cached
        return cached

    def _impose_color(self, spec: cols.ColumnSpec, row_id: int) -> Optional[str]:
        """Imposition: color of the categorical child for this row."""
        for child in spec.children:
            if cols.value_kind(child, self.ds) == da.CATEGORICAL:
                col = self.ds.column(child.column_id)
                code = self.ds.cell(row_id, col.id)
                if code is None:
                    return None
                return self.theme.category_color(col.color_indices[code])
        return None

    # -- item cells ----------------------------------------------------------

    def item_cell(self, spec: cols.ColumnSpec, row_id: int, x: float,
                  y: float, h: float) -> Cell:
        enc = self.encoding_for(spec, aggregated=False)
        directive = compact_variant(enc, h)
        cell = Cell(column_id=spec.id, x=x, y=y, w=spec.width, h=h,
                    encoding=enc, directive=directive)
        if directive == OMIT:
            return cell
        pad = FULL_PAD_Y if directive == FULL else 0.0
        iy, ih = y + pad, max(1.0, h - 2 * pad)
        ix, iw = x + CELL_PAD_X, max(1.0, spec.width - 2 * CELL_PAD_X)

        if spec.kind == cols.INTERLEAVED:
            self._paint_interleaved(cell, spec, row_id, ix, iy, iw, ih, directive)
            return cell
        if spec.kind == cols.STACKED:
            self._paint_stacked_item(cell, spec, row_id, ix, iy, iw, ih)
            return cell
        if spec.kind == cols.IMPOSITION:
            num = next(c for c in spec.children
                       if cols.value_kind(c, self.ds) == da.NUMERICAL)
            color = self._impose_color(spec, row_id) or self.theme.bar_fill
            self._paint_numeric_item(cell, num, row_id, ix, iy, iw, ih,
                                     directive, enc, fill=color)
            return cell
        if spec.kind in (cols.REDUCER, cols.SCRIPTED):
            self._paint_numeric_item(cell, spec, row_id, ix, iy, iw, ih,
                                     directive, enc, fill=self.theme.bar_fill)
            return cell

        col = self.ds.column(spec.column_id)
        if col.kind == da.NUMERICAL:
            self._paint_numeric_item(cell, spec, row_id, ix, iy, iw, ih,
                                     directive, enc, fill=self.theme.bar_fill)
        elif col.kind == da.CATEGORICAL:
            self._paint_categorical_item(cell, col, row_id, ix, iy, iw, ih,
                                         directive, enc)
        elif col.kind == da.TEXT:
            value = self.ds.cell(row_id, col.id)
            if value is None:
                cell.missing = True
                cell.primitives.append(self._dash(ix, iy, iw, ih))
            else:
                cell.primitives.append(self._text(ix, iy, iw, ih, str(value)))
        else:  # matrix
            self._paint_matrix_item(cell, col, row_id, ix, iy, iw, ih, enc)
        return cell

    def _paint_numeric_item(self, cell, spec, row_id, x, y, w, h, directive,
                            enc, fill):
        v, raw, oob = self._mapped_scalar(spec, row_id)
        if v is None:
            cell.missing = True
            cell.primitives.append(self._dash(x, y, w, h))
            return
        t = self.theme
        if oob:
            cell.primitives.append({"kind": "rect", "x": x, "y": y, "w": w,
                                    "h": h, "fill": "none",
                                    "stroke": t.muted_color, "cls": "clamped"})
        if enc == BAR:
            cell.primitives.append({"kind": "rect", "x": x, "y": y,
                                    "w": max(0.0, v * w), "h": h, "fill": fill})
            if directive == FULL:
                cell.primitives.append(self._text(x, y, w, h, f"{raw:g}",
                                                  color=t.text_color))
        elif enc == DOT:
            r = min(h * 0.35, 4.0)
            cell.primitives.append({"kind": "circle", "cx": x + v * w,
                                    "cy": y + h / 2.0, "r": r, "fill": fill})
        elif enc == PROPORTIONAL_SYMBOL:
            rmax = max(1.0, min(w, h) / 2.0 - 1.0)
            cell.primitives.append({"kind": "circle", "cx": x + w / 2.0,
                                    "cy": y + h / 2.0,
                                    "r": rmax * math.sqrt(max(0.0, v)),
                                    "fill": fill})
        elif enc == BRIGHTNESS:
            cell.primitives.append({"kind": "rect", "x": x, "y": y, "w": w,
                                    "h": h, "fill": _lerp_brightness(fill, v)})
        else:  # string
            cell.primitives.append(self._text(x, y, w, h, f"{raw:g}"))

    def _paint_categorical_item(self, cell, col, row_id, x, y, w, h,
                                directive, enc):
        code = self.ds.cell(row_id, col.id)
        if code is None:
            cell.missing = True
            cell.primitives.append(self._dash(x, y, w, h))
            return
        color = self.theme.category_color(col.color_indices[code])
        name = col.categories[code]
        if enc == COLOR_CELL:
            cell.primitives.append({"kind": "rect", "x": x, "y": y, "w": w,
                                    "h": h, "fill": color})
            if directive == FULL:
                cell.primitives.append(self._text(x, y, w, h, name, color="#ffffff"))
        elif enc == CATEGORY_MATRIX:
            k = len(col.categories)
            sub = w / k
            cell.primitives.append({"kind": "rect", "x": x + code * sub, "y": y,
                                    "w": sub, "h": h, "fill": color})
        else:  # string
            cell.primitives.append(self._text(x, y, w, h, name))

    def _paint_matrix_item(self, cell, col, row_id, x, y, w, h, enc):
        block = self.ds.values(col.id)[row_id]
        mapped, _ = mp.apply_mapping_array(self._matrix_mapping(col), block)
        k = len(block)
        sub = w / k
        t = self.theme
        if enc == HEATMAP:
            for j in range(k):
                if math.isnan(block[j]):
                    cell.primitives.append(self._dash(x + j * sub, y, sub, h))
                else:
                    cell.primitives.append({
                        "kind": "rect", "x": x + j * sub, "y": y, "w": sub,
                        "h": h, "fill": _lerp_brightness(t.accent, float(mapped[j]))})
        elif enc == BARS:
            for j in range(k):
                if math.isnan(block[j]):
                    cell.primitives.append(self._dash(x + j * sub, y, sub, h))
                    continue
                bh = float(mapped[j]) * h
                cell.primitives.append({"kind": "rect", "x": x + j * sub,
                                        "y": y + h - bh, "w": max(0.5, sub - 0.5),
                                        "h": bh, "fill": t.bar_fill})
        else:  # sparkline
            pts = []
            for j in range(k):
                if math.isnan(block[j]):
                    continue
                px = x + (j + 0.5) * sub
                py = y + h - float(mapped[j]) * h
                pts.append((px, py))
            if pts:
                d = "M" + " L".join(f"{px:.2f},{py:.2f}" for px, py in pts)
                cell.primitives.append({"kind": "path", "d": d, "fill": "none",
                                        "stroke": t.accent})
            else:
                cell.missing = True
                cell.primitives.append(self._dash(x, y, w, h))

    def _paint_stacked_item(self, cell, spec, row_id, x, y, w, h):
        weights = cols.stacked_weights(spec)
        values = [float(self._mapped(c)[0][row_id]) for c in spec.children]
        values = [None if math.isnan(v) else v for v in values]
        _, segments = cols.eval_stacked(values, weights)
        cursor = x
        for idx, seg in enumerate(segments):
            if seg.missing:
                continue
            sw = seg.value * w
            cell.primitives.append({"kind": "rect", "x": cursor, "y": y,
                                    "w": sw, "h": h,
                                    "fill": self.theme.category_color(idx)})
            cursor += sw
        if all(s.missing for s in segments):
            cell.missing = True
            cell.primitives.append(self._dash(x, y, w, h))

    def _paint_interleaved(self, cell, spec, row_id, x, y, w, h, directive):
        k = max(1, len(spec.children))
        sub = h / k
        for idx, child in enumerate(spec.children):
            cy = y + idx * sub
            enc = BAR
            self._paint_numeric_item(cell, child, row_id, x, cy, w, sub,
                                     COMPACT, enc,
                                     fill=self.theme.category_color(idx))

    # -- header / aggregate cells ---------------------------------------------

    def header_cell(self, node, y, h, total_w) -> Cell:
        t = self.theme
        cell = Cell(column_id="@group", x=0.0, y=y, w=total_w, h=h,
                    encoding=STRING, directive=compact_variant(STRING, h))
        if cell.directive == OMIT:
            return cell
        label = f"{' / '.join(node.path)} ({node.size})"
        cell.primitives.append({"kind": "line", "x1": 0.0, "y1": y + h,
                                "x2": total_w, "y2": y + h, "stroke": t.grid_color})
        cell.primitives.append(self._text(4.0 + 10.0 * (node.depth - 1), y,
                                          total_w, h, label))
        return cell

    def group_label_cell(self, node, y, h) -> Cell:
        cell = Cell(column_id="@group", x=0.0, y=y, w=GROUP_GUTTER_W, h=h,
                    encoding=STRING, directive=compact_variant(STRING, h))
        if cell.directive == OMIT:
            return cell
        label = f"{' / '.join(node.path)} ({node.size})"
        cell.primitives.append(self._text(4.0, y, GROUP_GUTTER_W, h, label))
        return cell

    def aggregate_cell(self, spec: cols.ColumnSpec, node, x: float, y: float,
                       h: float) -> Cell:
        enc = self.encoding_for(spec, aggregated=True)
        directive = compact_variant(enc, h)
        cell = Cell(column_id=spec.id, x=x, y=y, w=spec.width, h=h,
                    encoding=enc, directive=directive)
        if directive == OMIT:
            return cell
        pad = FULL_PAD_Y if directive == FULL else 0.0
        iy, ih = y + pad, max(1.0, h - 2 * pad)
        ix, iw = x + CELL_PAD_X, max(1.0, spec.width - 2 * CELL_PAD_X)
        rows = node.rows

        if spec.kind == cols.INTERLEAVED:
            k = max(1, len(spec.children))
            sub = ih / k
            for idx, child in enumerate(spec.children):
                self._paint_numeric_aggregate(cell, child, rows, BOXPLOT,
                                              COMPACT, ix, iy + idx * sub, iw, sub)
            return cell
        if spec.kind == cols.IMPOSITION:
            num = next(c for c in spec.children
                       if cols.value_kind(c, self.ds) == da.NUMERICAL)
            self._paint_numeric_aggregate(cell, num, rows, enc, directive,
                                          ix, iy, iw, ih)
            return cell
        if spec.kind in (cols.STACKED, cols.REDUCER, cols.SCRIPTED):
            self._paint_numeric_aggregate(cell, spec, rows, enc, directive,
                                          ix, iy, iw, ih)
            return cell

        col = self.ds.column(spec.column_id)
        if col.kind == da.NUMERICAL:
            self._paint_numeric_aggregate(cell, spec, rows, enc, directive,
                                          ix, iy, iw, ih)
        elif col.kind == da.CATEGORICAL:
            self._paint_categorical_aggregate(cell, col, rows, enc, directive,
                                              ix, iy, iw, ih)
        elif col.kind == da.TEXT:
            vals = [self.ds.cell(int(r), col.id) for r in rows]
            shown, overflow = st.text_aggregate(vals, limit=3)
            label = ", ".join(str(s) for s in shown)
            if overflow:
                label += f" +{overflow} more"
            cell.primitives.append(self._text(ix, iy, iw, ih, label))
        else:  # matrix
            self._paint_matrix_aggregate(cell, col, rows, enc, directive,
                                         ix, iy, iw, ih)
        return cell

    def _unit_values(self, spec: cols.ColumnSpec, rows: np.ndarray) -> np.ndarray:
        return self._mapped(spec)[0][rows]

    def _paint_numeric_aggregate(self, cell, spec, rows, enc, directive,
                                 x, y, w, h):
        unit = self._unit_values(spec, rows)
        present = unit[~np.isnan(unit)]
        if present.size == 0:
            cell.missing = True
            cell.primitives.append(self._dash(x, y, w, h))
            return
        if enc == HISTOGRAM:
            hist = st.histogram(unit, domain=(0.0, 1.0))
            self._paint_histogram(cell, hist, x, y, w, h)
        else:  # boxplot over unit values
            self._paint_boxplot(cell, st.box_stats(present), directive,
                                x, y, w, h, scale=lambda v: x + v * w)

    def _paint_histogram(self, cell, hist: st.Histogram, x, y, w, h):
        t = self.theme
        peak = max(max(hist.counts), 1)
        k = len(hist.counts)
        bw = w / k
        for j, c in enumerate(hist.counts):
            if c == 0:
                continue
            bh = h * (c / peak)
            cell.primitives.append({"kind": "rect", "x": x + j * bw,
                                    "y": y + h - bh, "w": max(0.5, bw - 0.5),
                                    "h": bh, "fill": t.hist_fill})

    def _paint_boxplot(self, cell, bs: st.BoxStats, directive, x, y, w, h, scale):
        t = self.theme
        cy = y + h / 2.0
        x_lo, x_q1 = scale(bs.whisker_lo), scale(bs.q1)
        x_med, x_q3 = scale(bs.median), scale(bs.q3)
        x_hi = scale(bs.whisker_hi)
        if directive == COMPACT:
            # filled box plus whisker tick marks
            cell.primitives.append({"kind": "rect", "x": x_q1, "y": y,
                                    "w": max(0.5, x_q3 - x_q1), "h": h,
                                    "fill": t.box_fill})
            for tick in (x_lo, x_hi):
                cell.primitives.append({"kind": "line", "x1": tick, "y1": y,
                                        "x2": tick, "y2": y + h,
                                        "stroke": t.box_stroke, "cls": "whisker-tick"})
            return
        bh = h * 0.6
        by = cy - bh / 2.0
        cell.primitives.append({"kind": "line", "x1": x_lo, "y1": cy,
                                "x2": x_q1, "y2": cy, "stroke": t.box_stroke})
        cell.primitives.append({"kind": "line", "x1": x_q3, "y1": cy,
                                "x2": x_hi, "y2": cy, "stroke": t.box_stroke})
        for cap in (x_lo, x_hi):
            cell.primitives.append({"kind": "line", "x1": cap, "y1": cy - bh / 3,
                                    "x2": cap, "y2": cy + bh / 3,
                                    "stroke": t.box_stroke})
        cell.primitives.append({"kind": "rect", "x": x_q1, "y": by,
                                "w": max(0.5, x_q3 - x_q1), "h": bh,
                                "fill": t.box_fill, "stroke": t.box_stroke,
                                "cls": "box"})
        cell.primitives.append({"kind": "line", "x1": x_med, "y1": by,
                                "x2": x_med, "y2": by + bh,
                                "stroke": t.box_stroke, "cls": "median"})
        for v in bs.outliers:
            cell.primitives.append({"kind": "circle", "cx": scale(v), "cy": cy,
                                    "r": 1.5, "fill": t.box_stroke})

    def _paint_categorical_aggregate(self, cell, col, rows, enc, directive,
                                     x, y, w, h):
        codes = self.ds.values(col.id)[rows]
        counts = st.category_counts(codes, len(col.categories))
        total = max(1, len(rows))
        t = self.theme
        k = len(col.categories)
        if enc == STACKED_BAR:
            cursor = x
            for i, c in enumerate(counts.counts):
                if c == 0:
                    continue
                sw = w * (c / total)
                cell.primitives.append({
                    "kind": "rect", "x": cursor, "y": y, "w": sw, "h": h,
                    "fill": t.category_color(col.color_indices[i])})
                cursor += sw
        elif enc == HISTOGRAM:
            peak = max(max(counts.counts), 1)
            bw = w / k
            for i, c in enumerate(counts.counts):
                if c == 0:
                    continue
                bh = h * (c / peak)
                cell.primitives.append({
                    "kind": "rect", "x": x + i * bw, "y": y + h - bh,
                    "w": max(0.5, bw - 0.5), "h": bh,
                    "fill": t.category_color(col.color_indices[i])})
        else:  # brightness_matrix
            bw = w / k
            for i, c in enumerate(counts.counts):
                cell.primitives.append({
                    "kind": "rect", "x": x + i * bw, "y": y, "w": bw, "h": h,
                    "fill": _lerp_brightness(
                        t.category_color(col.color_indices[i]), c / total)})

    def _paint_matrix_aggregate(self, cell, col, rows, enc, directive,
                                x, y, w, h):
        block = self.ds.values(col.id)[rows]
        clip = self._matrix_mapping(col)
        t = self.theme
        if enc in (BOXPLOT, HISTOGRAM, DOTPLOT):
            unit, _ = mp.apply_mapping_array(clip, block.ravel())
            present = unit[~np.isnan(unit)]
            if present.size == 0:
                cell.missing = True
                cell.primitives.append(self._dash(x, y, w, h))
                return
            if enc == BOXPLOT:
                self._paint_boxplot(cell, st.box_stats(present), directive,
                                    x, y, w, h, scale=lambda v: x + v * w)
            elif enc == HISTOGRAM:
                self._paint_histogram(cell, st.histogram(unit, domain=(0.0, 1.0)),
                                      x, y, w, h)
            else:
                cy = y + h / 2.0
                for v in present:
                    cell.primitives.append({"kind": "circle", "cx": x + float(v) * w,
                                            "cy": cy, "r": 1.5,
                                            "fill": t.box_stroke})
            return
        means, q1s, q3s = st.matrix_row_profile(block)
        munit, _ = mp.apply_mapping_array(clip, means)
        k = len(means)
        sub = w / k
        if enc == MEAN_HEATMAP:
            for j in range(k):
                if math.isnan(munit[j]):
                    cell.primitives.append(self._dash(x + j * sub, y, sub, h))
                else:
                    cell.primitives.append({
                        "kind": "rect", "x": x + j * sub, "y": y, "w": sub,
                        "h": h, "fill": _lerp_brightness(t.accent, float(munit[j]))})
            return
        # envelope sparkline: q1..q3 band + mean line
        q1u, _ = mp.apply_mapping_array(clip, q1s)
        q3u, _ = mp.apply_mapping_array(clip, q3s)
        ok = ~np.isnan(munit)
        xs = x + (np.arange(k) + 0.5) * sub
        band_pts = [(xs[j], y + h - float(q3u[j]) * h) for j in range(k) if ok[j]]
        band_pts += [(xs[j], y + h - float(q1u[j]) * h)
                     for j in reversed(range(k)) if ok[j]]
        if band_pts:
            d = "M" + " L".join(f"{px:.2f},{py:.2f}" for px, py in band_pts) + " Z"
            cell.primitives.append({"kind": "path", "d": d,
                                    "fill": t.box_fill, "stroke": "none",
                                    "cls": "envelope"})
            mean_pts = [(xs[j], y + h - float(munit[j]) * h) for j in range(k) if ok[j]]
            d = "M" + " L".join(f"{px:.2f},{py:.2f}" for px, py in mean_pts)
            cell.primitives.append({"kind": "path", "d": d, "fill": "none",
                                    "stroke": t.accent, "cls": "mean"})
        else:
            cell.missing = True
            cell.primitives.append(self._dash(x, y, w, h))

    def _text(self, x, y, w, h, text, color=None) -> dict:
        t = self.theme
        return {"kind": "text", "x": x + 2.0, "y": y + h / 2.0 + t.font_size * 0.35,
                "text": _truncate(str(text), w - 4.0, t),
                "fill": color or t.text_color, "size": t.font_size}
