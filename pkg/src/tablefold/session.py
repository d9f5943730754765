"""Stateful sessions: the command protocol, snapshots, and CSV export.

Commands use optimistic concurrency: each carries the version the client
last saw; a mismatch is rejected with the current version so the client
can re-sync. Successful mutations return a delta with the new version,
the layout (run-length encoded), a scene for the client's registered
window, and panel payloads (per-column summaries over the filtered set).
"""

from __future__ import annotations

import csv
import io
import math
import uuid
from typing import Optional

from . import columns as cols
from . import data as da
from . import stats as st
from .engine import (FilterSpec, GroupCriterion, GroupSort, SortCriterion,
                     TableState)
from .errors import ProtocolError, TableFoldError
from .layout import Layout, LayoutParams, compute_layout
from .mapping import MappingSpec
from .scene import build_scene

PROTOCOL_VERSION = 1

MUTATING_OPS = {
    "set_filters": ("rows", "layout"),
    "set_grouping": ("rows", "layout"),
    "set_sort": ("rows",),
    "sort_groups": ("rows",),
    "toggle_aggregate": ("rows", "layout"),
    "set_selection": ("selection", "layout"),
    "set_mode": ("layout",),
    "set_encoding": ("columns",),
    "set_mapping": ("columns",),
    "combine_columns": ("columns", "layout"),
    "move_column": ("columns",),
    "resize_column": ("columns",),
    "restore": ("rows", "layout", "columns", "selection"),
}

QUERY_OPS = ("request_scene", "snapshot")


class Session:
    def __init__(self, dataset: da.Dataset, session_id: Optional[str] = None,
                 params: Optional[LayoutParams] = None):
        self.id = session_id or uuid.uuid4().hex
        self.dataset = dataset
        self.state = TableState(dataset)
        self.params = params or LayoutParams()
        self.window: tuple[int, int] = (0, 0)

    # -- layout/scene ---------------------------------------------------------

    def layout(self) -> Layout:
        return compute_layout(self.state.traverse(), self.state.mode,
                              self.params, self.state.selection)

    def scene_doc(self, first: int, last: int) -> dict:
        rows = self.state.traverse()
        first = max(0, min(len(rows), int(first)))
        last = max(first, min(len(rows), int(last)))
        scene = build_scene(self.state, self.layout(), (first, last))
        return scene.to_dict()

    def layout_doc(self) -> dict:
        lay = self.layout()
        return {"total_height": lay.total_height, "fits": lay.fits,
                "rows": len(lay), "runs": lay.runs()}

    def panel_doc(self) -> dict:
        """Per-column summaries over the filtered rows (panel histograms)."""
        state = self.state
        mask = state.filter_mask
        out = []
        for col in self.dataset.columns:
            entry: dict = {"id": col.id, "label": col.label, "kind": col.kind}
            if col.kind in (da.NUMERICAL, da.MATRIX):
                entry["domain"] = list(col.domain)
                vals = self.dataset.values(col.id)[mask]
                if col.kind == da.MATRIX:
                    vals = vals.ravel()
                try:
                    entry["histogram"] = st.histogram(vals, domain=col.domain).to_dict()
                except TableFoldError:
                    entry["histogram"] = None
            elif col.kind == da.CATEGORICAL:
                codes = self.dataset.values(col.id)[mask]
                entry["categories"] = list(col.categories)
                entry["counts"] = st.category_counts(codes, len(col.categories)).to_dict()
            else:
                entry["missing"] = int(self.dataset.mask(col.id)[mask].sum())
            out.append(entry)
        return {"columns": out, "filtered": state.filtered_count,
                "total": self.dataset.row_count}

    # -- command protocol -------------------------------------------------------

    def apply_command(self, command: dict) -> dict:
        """Apply one protocol command; returns a delta or a rejection."""
        if not isinstance(command, dict) or "op" not in command:
            raise ProtocolError("command must be an object with an 'op'")
        op = command["op"]
        payload = command.get("payload", {})
        expected = command.get("expected_version")
        if expected is not None and int(expected) != self.state.version:
            return {"protocol_version": PROTOCOL_VERSION, "rejected": True,
                    "current_version": self.state.version,
                    "error": f"expected version {expected}, "
                             f"session is at {self.state.version}"}
        if op in QUERY_OPS:
            return self._query(op, payload)
        if op not in MUTATING_OPS:
            raise ProtocolError(f"unknown op {op!r}")
        try:
            self._dispatch(op, payload)
        except TableFoldError as e:
            return {"protocol_version": PROTOCOL_VERSION, "rejected": True,
                    "current_version": self.state.version, "error": str(e)}
        changed = list(MUTATING_OPS[op])
        delta = {"protocol_version": PROTOCOL_VERSION,
                 "version": self.state.version, "changed": changed,
                 "layout": self.layout_doc()}
        if self.window[1] > self.window[0]:
            delta["scene"] = self.scene_doc(*self.window)
        if "rows" in changed or op == "restore":
            delta["panel"] = self.panel_doc()
        return delta

    def _query(self, op: str, payload: dict) -> dict:
        if op == "snapshot":
            return {"protocol_version": PROTOCOL_VERSION,
                    "version": self.state.version, "snapshot": self.snapshot()}
        first = int(payload.get("first", 0))
        last = int(payload.get("last", 0))
        self.window = (first, last)
        return {"protocol_version": PROTOCOL_VERSION,
                "version": self.state.version,
                "layout": self.layout_doc(),
                "scene": self.scene_doc(first, last)}

    def _dispatch(self, op: str, payload: dict):
        state = self.state
        try:
            if op == "set_filters":
                state.set_filters([FilterSpec.from_dict(d)
                                   for d in payload.get("filters", [])])
            elif op == "set_grouping":
                state.set_grouping([GroupCriterion.from_dict(d)
                                    for d in payload.get("grouping", [])])
            elif op == "set_sort":
                state.set_sort([SortCriterion.from_dict(d)
                                for d in payload.get("sorting", [])])
            elif op == "sort_groups":
                state.sort_groups(by=payload["by"],
                                  direction=payload.get("direction", "asc"),
                                  column_id=payload.get("column"),
                                  statistic=payload.get("statistic", "median"))
            elif op == "toggle_aggregate":
                state.toggle_aggregate(payload["group"],
                                       bool(payload.get("aggregated", True)))
            elif op == "set_selection":
                state.set_selection(payload.get("rows", []))
            elif op == "set_mode":
                state.set_mode(payload["mode"])
            elif op == "set_encoding":
                state.set_encoding(payload["column"],
                                   bool(payload.get("aggregated", False)),
                                   payload["kind"])
            elif op == "set_mapping":
                state.set_mapping(payload["column"],
                                  MappingSpec.from_dict(payload["mapping"]))
            elif op == "combine_columns":
                state.combine_columns(payload["kind"],
                                      payload.get("children", []),
                                      label=payload.get("label"),
                                      reducer_op=payload.get("reducer"),
                                      script_source=payload.get("script"))
            elif op == "move_column":
                state.move_column(payload["column"], int(payload["index"]))
            elif op == "resize_column":
                state.resize_column(payload["column"], float(payload["width"]))
            elif op == "restore":
                self.restore(payload["document"])
        except KeyError as e:
            raise ProtocolError(f"payload for {op} is missing {e}") from None

    # -- snapshot / restore -------------------------------------------------------

    def snapshot(self) -> dict:
        """Full exploration state, excluding raw data (fingerprint instead)."""
        state = self.state
        return {
            "protocol_version": PROTOCOL_VERSION,
            "dataset": {"fingerprint": self.dataset.fingerprint,
                        "rows": self.dataset.row_count},
            "state": {
                "filters": [f.to_dict() for f in state.filters],
                "grouping": [g.to_dict() for g in state.grouping],
                "sorting": [s.to_dict() for s in state.sorting],
                "group_sort": state.group_sort.to_dict() if state.group_sort else None,
                "aggregated": sorted(list(p) for p in state.aggregated),
                "selection": sorted(state.selection),
                "mode": state.mode,
                "columns": [c.to_dict() for c in state.column_tree],
                "encodings": {k: dict(v) for k, v in sorted(state.encodings.items())},
                "mappings": {k: m.to_dict() for k, m in sorted(state.mappings.items())},
            },
        }

    def restore(self, document: dict):
        """Replace the state from a snapshot; the version resets to 0."""
        if not isinstance(document, dict) or "state" not in document:
            raise ProtocolError("snapshot document missing 'state'")
        ds_info = document.get("dataset", {})
        fp = ds_info.get("fingerprint")
        if fp != self.dataset.fingerprint:
            raise ProtocolError("snapshot was taken against a different dataset "
                                f"(fingerprint {fp!r})")
        self.state = state_from_doc(self.dataset, document["state"])

    def export_csv(self) -> bytes:
        """Filtered rows in traversal order; aggregated groups expand to
        their members; leaf display columns only; missing as empty."""
        state = self.state
        rows = state.traverse()
        grouped = bool(state.grouping)
        path_of: dict[int, tuple] = {}
        if grouped:
            for node in state.all_groups():
                if not node.children:
                    for rid in node.rows:
                        path_of[int(rid)] = node.path
        ordered: list[tuple[int, tuple]] = []
        for i in range(len(rows)):
            rr = rows[i]
            if rr.kind == "item":
                ordered.append((rr.row_id, path_of.get(rr.row_id, ())))
            elif rr.kind == "group":
                for rid in rr.group.rows:
                    ordered.append((int(rid), path_of.get(int(rid), rr.group.path)))
        leaves = self._export_columns()
        buf = io.StringIO()
        writer = csv.writer(buf)
        header = (["group"] if grouped else []) + [name for name, _ in leaves]
        writer.writerow(header)
        for rid, path in ordered:
            record = [" / ".join(path)] if grouped else []
            for _, getter in leaves:
                record.append(getter(rid))
            writer.writerow(record)
        return buf.getvalue().encode("utf-8")

    def _export_columns(self):
        """(header, getter) pairs for every exported scalar column."""
        ds = self.dataset
        out = []

        def num_getter(values):
            def get(rid):
                v = values[rid]
                return "" if math.isnan(v) else repr(float(v))
            return get

        def add_spec(spec: cols.ColumnSpec):
            if spec.kind == cols.DATA:
                col = ds.column(spec.column_id)
                if col.kind == da.NUMERICAL:
                    out.append((col.id, num_getter(ds.values(col.id))))
                elif col.kind == da.CATEGORICAL:
                    codes = ds.values(col.id)
                    cats = col.categories

                    def get(rid, codes=codes, cats=cats):
                        c = int(codes[rid])
                        return "" if c < 0 else cats[c]
                    out.append((col.id, get))
                elif col.kind == da.TEXT:
                    vals = ds.values(col.id)

                    def get(rid, vals=vals):
                        v = vals[rid]
                        return "" if v is None else str(v)
                    out.append((col.id, get))
                else:  # matrix: one column per inner column, original names
                    block = ds.values(col.id)
                    for j, inner in enumerate(col.inner_labels):
                        out.append((inner, num_getter(block[:, j])))
            elif spec.kind in (cols.STACKED, cols.REDUCER, cols.SCRIPTED):
                out.append((spec.id, num_getter(self.state.numeric_values(spec))))
            else:  # nested/interleaved/imposition: export the children
                for child in spec.children:
                    add_spec(child)

        for spec in self.state.leaf_columns():
            add_spec(spec)
        return out


def state_from_doc(dataset: da.Dataset, doc: dict) -> TableState:
    """Rebuild a TableState from its snapshot form (version 0)."""
    state = TableState(dataset)
    try:
        state.filters = [FilterSpec.from_dict(d) for d in doc.get("filters", [])]
        state.grouping = [GroupCriterion.from_dict(d) for d in doc.get("grouping", [])]
        state.sorting = [SortCriterion.from_dict(d) for d in doc.get("sorting", [])]
        gs = doc.get("group_sort")
        state.group_sort = GroupSort.from_dict(gs) if gs else None
        state.aggregated = {tuple(p) for p in doc.get("aggregated", [])}
        state.selection = {int(r) for r in doc.get("selection", [])}
        state.mode = doc.get("mode", "detail")
        columns = doc.get("columns")
        if columns:
            state.column_tree = [cols.ColumnSpec.from_dict(c) for c in columns]
        state.encodings = {k: dict(v) for k, v in doc.get("encodings", {}).items()}
        state.mappings = {k: MappingSpec.from_dict(m)
                          for k, m in doc.get("mappings", {}).items()}
    except (KeyError, TypeError, ValueError) as e:
        raise ProtocolError(f"malformed state document: {e}") from None
    state._rebuild()
    state.version = 0
    return state
