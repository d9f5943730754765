"""Exploration state and the grouping/aggregation tree.

TableState owns the full exploration state of one table: filters,
grouping criteria, sort criteria, the display-column tree, aggregation
flags, selection, and layout mode. Every successful mutation bumps the
version by exactly one and rebuilds the derived tree; failed mutations
leave the state untouched.

The tree is an ordered hierarchy with one level per grouping criterion
and items as leaves. Aggregating a node cuts traversal at that node:
its whole subtree renders as a single group row.
"""

from __future__ import annotations

import re
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import _kernels
from . import columns as cols
from . import data as da
from . import mapping as mp
from . import script as sc
from . import stats as st
from .errors import FilterError, StateError

ASC = "asc"
DESC = "desc"

DETAIL = "detail"
OVERVIEW = "overview"

MISSING_GROUP_LABEL = "missing"

_SORT_STATS = ("min", "max", "q1", "median", "q3", "mean")


# ---------------------------------------------------------------------------
# Criteria

@dataclass(frozen=True)
class FilterSpec:
    column_id: str
    kind: str  # numeric_range | category_exclusion | text_match | require_present
    lo: Optional[float] = None
    hi: Optional[float] = None
    excluded: frozenset = frozenset()
    mode: str = "substring"  # substring | regex
    pattern: str = ""

    def to_dict(self) -> dict:
        doc = {"column": self.column_id, "kind": self.kind}
        if self.kind == "numeric_range":
            doc["lo"] = self.lo
            doc["hi"] = self.hi
        elif self.kind == "category_exclusion":
            doc["excluded"] = sorted(self.excluded)
        elif self.kind == "text_match":
            doc["mode"] = self.mode
            doc["pattern"] = self.pattern
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "FilterSpec":
        return FilterSpec(
            column_id=doc["column"], kind=doc["kind"],
            lo=doc.get("lo"), hi=doc.get("hi"),
            excluded=frozenset(doc.get("excluded", ())),
            mode=doc.get("mode", "substring"), pattern=doc.get("pattern", ""),
        )


@dataclass(frozen=True)
class GroupCriterion:
    kind: str  # categorical | bins | selection
    column_id: Optional[str] = None
    thresholds: tuple = ()
    selected: frozenset = frozenset()

    def to_dict(self) -> dict:
        doc = {"kind": self.kind}
        if self.column_id is not None:
            doc["column"] = self.column_id
        if self.kind == "bins":
            doc["thresholds"] = list(self.thresholds)
        if self.kind == "selection":
            doc["rows"] = sorted(self.selected)
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "GroupCriterion":
        return GroupCriterion(
            kind=doc["kind"], column_id=doc.get("column"),
            thresholds=tuple(doc.get("thresholds", ())),
            selected=frozenset(doc.get("rows", ())),
        )


@dataclass(frozen=True)
class SortCriterion:
    column_id: str
    direction: str = ASC
    statistic: Optional[str] = None  # matrix columns only

    def to_dict(self) -> dict:
        doc = {"column": self.column_id, "direction": self.direction}
        if self.statistic is not None:
            doc["statistic"] = self.statistic
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "SortCriterion":
        return SortCriterion(column_id=doc["column"],
                             direction=doc.get("direction", ASC),
                             statistic=doc.get("statistic"))


@dataclass(frozen=True)
class GroupSort:
    by: str  # name | size | statistic
    direction: str = ASC
    column_id: Optional[str] = None
    statistic: str = "median"

    def to_dict(self) -> dict:
        doc = {"by": self.by, "direction": self.direction}
        if self.by == "statistic":
            doc["column"] = self.column_id
            doc["statistic"] = self.statistic
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "GroupSort":
        return GroupSort(by=doc["by"], direction=doc.get("direction", ASC),
                         column_id=doc.get("column"),
                         statistic=doc.get("statistic", "median"))


# ---------------------------------------------------------------------------
# Tree nodes and render rows

class GroupNode:
    __slots__ = ("path", "depth", "rows", "aggregated", "children")

    def __init__(self, path: tuple, rows: np.ndarray, aggregated: bool):
        self.path = path
        self.depth = len(path)
        self.rows = rows
        self.aggregated = aggregated
        self.children: list[GroupNode] = []

    @property
    def label(self) -> str:
        return self.path[-1]

    @property
    def size(self) -> int:
        return int(len(self.rows))

    def __repr__(self):
        flag = "*" if self.aggregated else ""
        return f"<group {'/'.join(self.path)}{flag} n={self.size}>"


ITEM = "item"
HEADER = "header"
GROUP = "group"


@dataclass(frozen=True)
class RenderRow:
    kind: str  # item | header | group
    row_id: Optional[int] = None
    group: Optional[GroupNode] = None

    @property
    def depth(self) -> int:
        return self.group.depth if self.group is not None else 0


class RowList(Sequence):
    """Traversal result: a compact, indexable sequence of RenderRows.

    Kinds and references live in numpy arrays so that layout and scene
    generation stay O(window) on 100k-row tables.
    """

    def __init__(self, kinds: np.ndarray, refs: np.ndarray, groups: list[GroupNode]):
        self.kinds = kinds          # int8: 0 item, 1 header, 2 aggregated group
        self.refs = refs            # int64: row id for items, group index otherwise
        self.groups = groups

    def __len__(self) -> int:
        return len(self.kinds)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        k = int(self.kinds[i])
        if k == 0:
            return RenderRow(kind=ITEM, row_id=int(self.refs[i]))
        node = self.groups[int(self.refs[i])]
        return RenderRow(kind=HEADER if k == 1 else GROUP, group=node)

    def item_row_ids(self) -> np.ndarray:
        return self.refs[self.kinds == 0]

    def covered_row_ids(self) -> np.ndarray:
        """Every filtered row exactly once: items + members of aggregated groups."""
        parts = [self.item_row_ids()]
        for gi in self.refs[self.kinds == 2]:
            parts.append(self.groups[int(gi)].rows)
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# Filters

def eval_filter(spec: FilterSpec, dataset: da.Dataset) -> np.ndarray:
    """Boolean keep-mask for one filter. Missing values fail numeric and
    text predicates, always pass category exclusion, and fail require_present."""
    col = dataset.column(spec.column_id) if dataset.has_column(spec.column_id) else None
    if col is None:
        raise FilterError(f"unknown column {spec.column_id!r}")
    n = dataset.row_count
    if spec.kind == "require_present":
        mask = dataset.mask(col.id)
        if col.kind == da.MATRIX:
            return ~mask.all(axis=1)
        return ~mask
    if spec.kind == "numeric_range":
        if col.kind not in (da.NUMERICAL, da.MATRIX):
            raise FilterError(f"numeric_range on non-numerical column {col.id!r}")
        if spec.lo is None or spec.hi is None or not spec.lo <= spec.hi:
            raise FilterError(f"bad range [{spec.lo}, {spec.hi}]")
        if col.kind == da.MATRIX:
            vals = _kernels.matrix_row_statistics(dataset.values(col.id), "mean")
        else:
            vals = dataset.values(col.id)
        with np.errstate(invalid="ignore"):
            return (vals >= spec.lo) & (vals <= spec.hi)
    if spec.kind == "category_exclusion":
        if col.kind != da.CATEGORICAL:
            raise FilterError(f"category_exclusion on non-categorical column {col.id!r}")
        unknown = spec.excluded - set(col.categories)
        if unknown:
            raise FilterError(f"unknown categories {sorted(unknown)}")
        codes = dataset.values(col.id)
        bad = np.zeros(n, dtype=bool)
        for name in spec.excluded:
            bad |= codes == col.category_index(name)
        return ~bad
    if spec.kind == "text_match":
        if col.kind != da.TEXT:
            raise FilterError(f"text_match on non-text column {col.id!r}")
        vals = dataset.values(col.id)
        if spec.mode == "regex":
            try:
                rx = re.compile(spec.pattern)
            except re.error as e:
                raise FilterError(f"bad regex {spec.pattern!r}: {e}") from None
            return np.array([v is not None and rx.search(v) is not None for v in vals])
        needle = spec.pattern.lower()
        return np.array([v is not None and needle in v.lower() for v in vals])
    raise FilterError(f"unknown filter kind {spec.kind!r}")


# ---------------------------------------------------------------------------
# Grouping

def _criterion_labels_codes(criterion: GroupCriterion, dataset: da.Dataset):
    """(ordered labels incl. trailing 'missing', per-row code array)."""
    if criterion.kind == "categorical":
        col = dataset.column(criterion.column_id)
        if col.kind != da.CATEGORICAL:
            raise StateError(f"cannot group by non-categorical column {col.id!r}")
        labels = list(col.categories) + [MISSING_GROUP_LABEL]
        codes = dataset.values(col.id).astype(np.int64)
        codes = np.where(codes < 0, len(col.categories), codes)
        return labels, codes
    if criterion.kind == "bins":
        col = dataset.column(criterion.column_id)
        if col.kind != da.NUMERICAL:
            raise StateError(f"cannot bin non-numerical column {col.id!r}")
        th = list(criterion.thresholds)
        if not th or th != sorted(th) or len(set(th)) != len(th):
            raise StateError("bin thresholds must be non-empty and strictly ascending")
        vals = dataset.values(col.id)
        codes = np.searchsorted(np.asarray(th, dtype=np.float64), vals, side="right")
        codes = np.where(np.isnan(vals), len(th) + 1, codes).astype(np.int64)
        labels = [da.bin_label(i, th) for i in range(len(th) + 1)] + [MISSING_GROUP_LABEL]
        return labels, codes
    if criterion.kind == "selection":
        unknown = [r for r in criterion.selected if not 0 <= r < dataset.row_count]
        if unknown:
            raise StateError(f"selection references unknown rows {unknown[:3]}")
        sel = np.zeros(dataset.row_count, dtype=bool)
        if criterion.selected:
            sel[np.fromiter(criterion.selected, dtype=np.int64)] = True
        codes = np.where(sel, 0, 1).astype(np.int64)
        return ["selected", "unselected"], codes
    raise StateError(f"unknown grouping kind {criterion.kind!r}")


def compute_grouping(dataset: da.Dataset, mask: np.ndarray,
                     criteria: Sequence[GroupCriterion]):
    """Ordered partition of the masked rows into labeled groups.

    Returns a list of (label tuple, row index array) pairs ordered
    lexicographically by per-criterion label order; empty tuples are
    dropped and missing values form a trailing group per criterion.
    """
    rows = np.nonzero(np.asarray(mask, dtype=bool))[0]
    if not criteria:
        return [((), rows)]
    per = [_criterion_labels_codes(c, dataset) for c in criteria]
    combined = np.zeros(len(rows), dtype=np.int64)
    for labels, codes in per:
        combined = combined * len(labels) + codes[rows]
    order = np.argsort(combined, kind="stable")
    sorted_codes = combined[order]
    uniq, starts = np.unique(sorted_codes, return_index=True)
    out = []
    bounds = list(starts) + [len(rows)]
    for k, code in enumerate(uniq):
        members = rows[order[bounds[k]:bounds[k + 1]]]
        path = []
        c = int(code)
        for labels, _ in reversed(per):
            path.append(labels[c % len(labels)])
            c //= len(labels)
        out.append((tuple(reversed(path)), members))
    return out


# ---------------------------------------------------------------------------
# TableState

class TableState:
    """Mutable exploration state over an immutable dataset.

    Mutations are serialized by the session layer (single writer); reads
    (traverse, scene building) work on the derived snapshot of the current
    version.
    """

    def __init__(self, dataset: da.Dataset):
        self.dataset = dataset
        self.filters: list[FilterSpec] = []
        self.grouping: list[GroupCriterion] = []
        self.sorting: list[SortCriterion] = []
        self.group_sort: Optional[GroupSort] = None
        self.aggregated: set[tuple] = set()
        self.selection: set[int] = set()
        self.mode: str = DETAIL
        self.version: int = 0
        self.column_tree: list[cols.ColumnSpec] = [
            cols.data_column(c) for c in dataset.columns
        ]
        self.encodings: dict = {}               # column id -> {"item": kind, "aggregate": kind}
        self.mappings: dict[str, mp.MappingSpec] = {}
        self._combined_seq = 0
        self._rebuild()

    # -- column access ------------------------------------------------------

    def leaf_columns(self) -> list[cols.ColumnSpec]:
        return cols.leaf_columns(self.column_tree)

    def find_column(self, column_id: str) -> Optional[cols.ColumnSpec]:
        return cols.find_column(self.column_tree, column_id)

    def mapping_for(self, column_id: str) -> mp.MappingSpec:
        """Visual mapping for a numerical or matrix dataset column."""
        if column_id in self.mappings:
            return self.mappings[column_id]
        if self.dataset.has_column(column_id):
            col = self.dataset.column(column_id)
            if col.domain is not None:
                return mp.spec_for_domain(col.domain, clip=True)
        spec = self.find_column(column_id)
        if spec is not None and spec.kind in (cols.STACKED, cols.REDUCER):
            return mp.MappingSpec(domain=(0.0, 1.0), clip=True)
        if spec is not None and spec.kind == cols.SCRIPTED:
            vals = self.numeric_values(spec)
            return mp.spec_for_domain(mp.derive_domain(vals), clip=True)
        raise StateError(f"no mapping available for column {column_id!r}")

    def numeric_values(self, spec: Union[cols.ColumnSpec, str]) -> np.ndarray:
        """Raw scalar values a numeric-producing display column yields per row."""
        if isinstance(spec, str):
            found = self.find_column(spec)
            if found is None:
                raise StateError(f"unknown column {spec!r}")
            spec = found
        cached = self._col_cache.get(spec.id)
        if cached is not None:
            return cached
        ds = self.dataset
        if spec.kind == cols.DATA:
            col = ds.column(spec.column_id)
            if col.kind != da.NUMERICAL:
                raise StateError(f"column {spec.id!r} is not numerical")
            vals = ds.values(col.id)
        elif spec.kind == cols.STACKED:
            child_vals = [self.mapped_values(c) for c in spec.children]
            vals = cols.stacked_scores(child_vals, cols.stacked_weights(spec))
        elif spec.kind == cols.REDUCER:
            child_vals = [self.mapped_values(c) for c in spec.children]
            vals = cols.reduce_arrays(spec.reducer_op, child_vals)
        elif spec.kind == cols.SCRIPTED:
            expr = sc.parse_script(spec.script_source)
            env = {cid: ds.values(cid) for cid in sc.referenced_columns(expr)}
            vals = sc.evaluate(expr, env, ds.row_count)
        else:
            raise StateError(f"column {spec.id!r} has no scalar value")
        self._col_cache[spec.id] = vals
        return vals

    def unit_values(self, spec: cols.ColumnSpec):
        """(unit values clamped to [0,1] with NaN missing, out-of-range mask).

        Cached per version: scene builds and stacked scoring share one
        mapped array per column.
        """
        key = "__unit:" + spec.id
        hit = self._col_cache.get(key)
        if hit is not None:
            return hit
        raw = self.numeric_values(spec)
        if spec.kind in (cols.STACKED, cols.REDUCER):
            hit = (np.clip(raw, 0.0, 1.0), np.zeros(len(raw), dtype=bool))
        else:
            if spec.kind == cols.SCRIPTED:
                base = mp.spec_for_domain(mp.derive_domain(raw), clip=True)
            else:
                base = self.mapping_for(spec.column_id)
            clipped = base if base.clip else mp.MappingSpec(
                kind=base.kind, domain=base.domain, clip=True)
            mapped, _ = mp.apply_mapping_array(clipped, raw)
            if base.clip:
                oob = np.zeros(len(raw), dtype=bool)
            else:
                d0, d1 = base.domain
                with np.errstate(invalid="ignore"):
                    oob = ~np.isnan(raw) & ((raw < d0) | (raw > d1))
            hit = (mapped, oob)
        self._col_cache[key] = hit
        return hit

    def mapped_values(self, spec: cols.ColumnSpec) -> np.ndarray:
        """Unit-interval values of a numeric-producing column (NaN missing)."""
        return self.unit_values(spec)[0]

    # -- derived state ------------------------------------------------------

    def _rebuild(self):
        self._col_cache: dict[str, np.ndarray] = {}
        ds = self.dataset
        mask = np.ones(ds.row_count, dtype=bool)
        for spec in self.filters:
            mask &= eval_filter(spec, ds)
        self._mask = mask
        masked = np.nonzero(mask)[0]
        ordered = masked[self._item_order(masked)]
        if not self.grouping:
            self._roots: list[GroupNode] = []
            kinds = np.zeros(len(ordered), dtype=np.int8)
            self._rows = RowList(kinds, ordered.astype(np.int64), [])
            return
        per = [_criterion_labels_codes(c, ds) for c in self.grouping]
        roots = self._build_level(ordered, per, 0, ())
        self._roots = roots
        chunks: list[tuple[np.ndarray, np.ndarray]] = []
        groups: list[GroupNode] = []
        self._emit(roots, chunks, groups)
        if chunks:
            kinds = np.concatenate([k for k, _ in chunks])
            refs = np.concatenate([r for _, r in chunks])
        else:
            kinds = np.zeros(0, dtype=np.int8)
            refs = np.zeros(0, dtype=np.int64)
        self._rows = RowList(kinds, refs, groups)

    def _build_level(self, rows: np.ndarray, per, level: int, path: tuple):
        labels, codes = per[level]
        lvl = codes[rows]
        order = np.argsort(lvl, kind="stable")
        srt = lvl[order]
        uniq, starts = np.unique(srt, return_index=True)
        bounds = list(starts) + [len(rows)]
        parts = []
        for k, code in enumerate(uniq):
            members = rows[order[bounds[k]:bounds[k + 1]]]
            parts.append((labels[int(code)], members))
        parts = self._order_siblings(parts)
        nodes = []
        for label, members in parts:
            node_path = path + (label,)
            node = GroupNode(node_path, members, node_path in self.aggregated)
            if level + 1 < len(per):
                node.children = self._build_level(members, per, level + 1, node_path)
                node.rows = np.concatenate([c.rows for c in node.children])
            nodes.append(node)
        return nodes

    def _order_siblings(self, parts):
        """Apply the group sort to one sibling list; ties break by label."""
        gs = self.group_sort
        if gs is None or not parts:
            return parts
        sign = -1.0 if gs.direction == DESC else 1.0
        if gs.by == "name":
            keyed = [((label,), i) for i, (label, _) in enumerate(parts)]
            keyed.sort(key=lambda t: t[0], reverse=gs.direction == DESC)
            return [parts[i] for _, i in keyed]
        if gs.by == "size":
            keyed = [((sign * len(members), label), i)
                     for i, (label, members) in enumerate(parts)]
        else:  # statistic; all-missing groups order last regardless of direction
            vals = self.numeric_values(gs.column_id)
            keyed = []
            for i, (label, members) in enumerate(parts):
                seg = vals[members]
                seg = seg[~np.isnan(seg)]
                if seg.size:
                    keyed.append(((0, sign * st.stat_measure(seg, gs.statistic), label), i))
                else:
                    keyed.append(((1, 0.0, label), i))
        keyed.sort(key=lambda t: t[0])
        return [parts[i] for _, i in keyed]

    def _emit(self, nodes, chunks, groups):
        for node in nodes:
            gi = len(groups)
            groups.append(node)
            if node.aggregated:
                chunks.append((np.full(1, 2, dtype=np.int8),
                               np.full(1, gi, dtype=np.int64)))
                continue
            chunks.append((np.ones(1, dtype=np.int8),
                           np.full(1, gi, dtype=np.int64)))
            if node.children:
                self._emit(node.children, chunks, groups)
            else:
                chunks.append((np.zeros(len(node.rows), dtype=np.int8),
                               node.rows.astype(np.int64)))

    # -- sorting ------------------------------------------------------------

    def _validate_sort(self, criteria: Sequence[SortCriterion]):
        ds = self.dataset
        for criterion in criteria:
            spec = self.find_column(criterion.column_id)
            is_matrix = False
            if spec is None:
                if not ds.has_column(criterion.column_id):
                    raise StateError(f"unknown sort column {criterion.column_id!r}")
                is_matrix = ds.column(criterion.column_id).kind == da.MATRIX
            elif spec.kind == cols.DATA:
                is_matrix = ds.column(spec.column_id).kind == da.MATRIX
            elif not cols.is_numeric_producing(spec, ds):
                raise StateError(f"column {criterion.column_id!r} is not sortable as a unit")
            if criterion.direction not in (ASC, DESC):
                raise StateError(f"unknown direction {criterion.direction!r}")
            if is_matrix:
                if criterion.statistic is None:
                    raise StateError(
                        f"matrix column {criterion.column_id!r} needs a sort statistic")
                if criterion.statistic not in _SORT_STATS:
                    raise StateError(f"unknown statistic {criterion.statistic!r}")
            elif criterion.statistic is not None:
                raise StateError(
                    f"statistic given for non-matrix column {criterion.column_id!r}")

    def _criterion_key(self, criterion: SortCriterion) -> np.ndarray:
        """Float key array; NaN marks missing (ordered last in any direction)."""
        cache_key = f"__sortkey:{criterion.column_id}:{criterion.statistic}"
        cached = self._col_cache.get(cache_key)
        if cached is not None:
            return cached
        key = self._compute_criterion_key(criterion)
        self._col_cache[cache_key] = key
        return key

    def _compute_criterion_key(self, criterion: SortCriterion) -> np.ndarray:
        ds = self.dataset
        spec = self.find_column(criterion.column_id)
        if spec is None and ds.has_column(criterion.column_id):
            spec = cols.data_column(ds.column(criterion.column_id))
        if spec is None:
            raise StateError(f"unknown sort column {criterion.column_id!r}")
        if spec.kind == cols.DATA:
            col = ds.column(spec.column_id)
            if col.kind == da.MATRIX:
                if criterion.statistic is None:
                    raise StateError(f"matrix column {col.id!r} needs a sort statistic")
                if criterion.statistic not in _SORT_STATS:
                    raise StateError(f"unknown statistic {criterion.statistic!r}")
                return _kernels.matrix_row_statistics(ds.values(col.id),
                                                      criterion.statistic)
            if criterion.statistic is not None:
                raise StateError(
                    f"statistic given for non-matrix column {col.id!r}")
            if col.kind == da.NUMERICAL:
                return ds.values(col.id).astype(np.float64, copy=True)
            if col.kind == da.CATEGORICAL:
                codes = ds.values(col.id).astype(np.float64)
                return np.where(codes < 0, np.nan, codes)
            # text: rank of the value among sorted distinct values
            vals = ds.values(col.id)
            mask = ds.mask(col.id)
            filled = np.array(["" if v is None else v for v in vals])
            _, inverse = np.unique(filled, return_inverse=True)
            key = inverse.astype(np.float64)
            return np.where(mask, np.nan, key)
        if criterion.statistic is not None:
            raise StateError(f"statistic given for non-matrix column {spec.id!r}")
        return self.numeric_values(spec).astype(np.float64, copy=True)

    def _sort_keys(self):
        keys = []
        for criterion in self.sorting:
            vals = self._criterion_key(criterion)
            miss = np.isnan(vals)
            filled = np.where(miss, 0.0, vals)
            if criterion.direction == DESC:
                filled = -filled
            keys.append((miss.astype(np.int8), filled))
        return keys

    def _item_order(self, rows: np.ndarray) -> np.ndarray:
        if not self.sorting or len(rows) == 0:
            return np.arange(len(rows))
        lex = []
        for miss, filled in reversed(self._sort_keys()):
            lex.append(filled[rows])
            lex.append(miss[rows])
        return np.lexsort(lex)

    def compare_rows(self, row_a: int, row_b: int) -> int:
        """Lexicographic comparison under the current sort criteria.

        Missing values order after all present values regardless of
        direction; the final tiebreak is the original row index.
        """
        for criterion in self.sorting:
            vals = self._criterion_key(criterion)
            a, b = float(vals[row_a]), float(vals[row_b])
            miss_a, miss_b = np.isnan(a), np.isnan(b)
            if miss_a != miss_b:
                return 1 if miss_a else -1
            if miss_a or a == b:
                continue
            lt = a < b
            if criterion.direction == DESC:
                lt = not lt
            return -1 if lt else 1
        return -1 if row_a < row_b else (1 if row_a > row_b else 0)

    # -- traversal ----------------------------------------------------------

    def traverse(self) -> RowList:
        return self._rows

    @property
    def filtered_count(self) -> int:
        return int(self._mask.sum())

    @property
    def filter_mask(self) -> np.ndarray:
        return self._mask

    def root_groups(self) -> list[GroupNode]:
        return self._roots

    def find_group(self, path: Sequence[str]) -> Optional[GroupNode]:
        path = tuple(path)
        nodes = self._roots
        found = None
        for depth in range(len(path)):
            found = None
            for node in nodes:
                if node.path == path[:depth + 1]:
                    found = node
                    break
            if found is None:
                return None
            nodes = found.children
        return found

    def all_groups(self) -> list[GroupNode]:
        out = []

        def rec(nodes):
            for n in nodes:
                out.append(n)
                rec(n.children)

        rec(self._roots)
        return out

    # -- mutations ----------------------------------------------------------

    def _commit(self):
        self._rebuild()
        self.version += 1
        return self

    def set_filters(self, specs: Sequence[FilterSpec]) -> "TableState":
        specs = list(specs)
        for spec in specs:
            eval_filter(spec, self.dataset)  # validate atomically before applying
        self.filters = specs
        return self._commit()

    def set_grouping(self, criteria: Sequence[GroupCriterion]) -> "TableState":
        criteria = list(criteria)
        for c in criteria:
            _criterion_labels_codes(c, self.dataset)
        self.grouping = criteria
        return self._commit()

    def set_sort(self, criteria: Sequence[SortCriterion]) -> "TableState":
        criteria = list(criteria)
        self._validate_sort(criteria)
        self.sorting = criteria
        return self._commit()

    def sort_groups(self, by: str, direction: str = ASC,
                    column_id: Optional[str] = None,
                    statistic: str = "median") -> "TableState":
        if not self.grouping:
            raise StateError("sort_groups requires active grouping")
        if by not in ("name", "size", "statistic"):
            raise StateError(f"unknown group sort {by!r}")
        if by == "statistic":
            if column_id is None:
                raise StateError("group statistic sort needs a column")
            spec = self.find_column(column_id)
            if spec is None or not cols.is_numeric_producing(spec, self.dataset):
                raise StateError(f"group statistic sort needs a numerical column, "
                                 f"got {column_id!r}")
            if statistic not in _SORT_STATS:
                raise StateError(f"unknown statistic {statistic!r}")
        self.group_sort = GroupSort(by=by, direction=direction,
                                    column_id=column_id, statistic=statistic)
        return self._commit()

    def toggle_aggregate(self, path: Sequence[str], aggregated: bool) -> "TableState":
        path = tuple(path)
        if self.find_group(path) is None:
            raise StateError(f"unknown group {path!r}")
        if aggregated:
            self.aggregated.add(path)
        else:
            self.aggregated.discard(path)
        return self._commit()

    def set_selection(self, row_ids) -> "TableState":
        ids = set(int(r) for r in row_ids)
        bad = [r for r in ids if not 0 <= r < self.dataset.row_count]
        if bad:
            raise StateError(f"unknown row ids {sorted(bad)[:3]}")
        self.selection = ids
        return self._commit()

    def set_mode(self, mode: str) -> "TableState":
        if mode not in (DETAIL, OVERVIEW):
            raise StateError(f"unknown mode {mode!r}")
        self.mode = mode
        return self._commit()

    def set_mapping(self, column_id: str, spec: mp.MappingSpec) -> "TableState":
        col = self.find_column(column_id)
        if col is None:
            raise StateError(f"unknown column {column_id!r}")
        self.mappings[column_id] = spec
        return self._commit()

    def set_encoding(self, column_id: str, aggregated: bool, kind: str) -> "TableState":
        from . import scene  # late import: scene owns encoding legality
        spec = self.find_column(column_id)
        if spec is None:
            raise StateError(f"unknown column {column_id!r}")
        scene.check_encoding(spec, self.dataset, aggregated, kind)
        slot = self.encodings.setdefault(column_id, {})
        slot["aggregate" if aggregated else "item"] = kind
        return self._commit()

    def move_column(self, column_id: str, index: int) -> "TableState":
        ids = [s.id for s in self.column_tree]
        if column_id not in ids:
            raise StateError(f"column {column_id!r} is not a top-level column")
        spec = self.column_tree[ids.index(column_id)]
        rest = [s for s in self.column_tree if s.id != column_id]
        index = max(0, min(len(rest), int(index)))
        self.column_tree = rest[:index] + [spec] + rest[index:]
        return self._commit()

    def resize_column(self, column_id: str, width: float) -> "TableState":
        spec = self.find_column(column_id)
        if spec is None:
            raise StateError(f"unknown column {column_id!r}")
        if not width > 0:
            raise StateError(f"width must be positive, got {width}")
        spec.width = float(width)
        return self._commit()

    def combine_columns(self, kind: str, child_ids: Sequence[str],
                        label: Optional[str] = None,
                        reducer_op: Optional[str] = None,
                        script_source: Optional[str] = None,
                        position: Optional[int] = None) -> "TableState":
        """Create a combined column from existing top-level columns.

        The children move inside the new column, which is inserted at the
        position of the first child (the drop position).
        """
        tree_ids = [s.id for s in self.column_tree]
        children = []
        for cid in child_ids:
            if cid not in tree_ids:
                raise StateError(f"column {cid!r} is not a top-level column")
            children.append(self.column_tree[tree_ids.index(cid)])
        cols.validate_combination(kind, children, self.dataset,
                                  reducer_op=reducer_op, script_source=script_source)
        self._combined_seq += 1
        new_id = f"{kind}_{self._combined_seq}"
        while self.find_column(new_id) is not None:
            self._combined_seq += 1
            new_id = f"{kind}_{self._combined_seq}"
        if kind == cols.SCRIPTED:
            spec = cols.ColumnSpec(id=new_id, kind=kind, label=label or new_id,
                                   script_source=script_source)
            insert_at = len(self.column_tree) if position is None else int(position)
            self.column_tree = (self.column_tree[:insert_at] + [spec]
                                + self.column_tree[insert_at:])
            return self._commit()
        if kind == cols.STACKED:
            # equal initial weights: equal child widths
            for c in children:
                c.width = cols.DEFAULT_WIDTH
        spec = cols.ColumnSpec(id=new_id, kind=kind, label=label or new_id,
                               children=children, reducer_op=reducer_op,
                               width=sum(c.width for c in children))
        drop_at = min(tree_ids.index(c) for c in child_ids) if position is None else int(position)
        remaining = [s for s in self.column_tree if s.id not in set(child_ids)]
        drop_at = max(0, min(len(remaining), drop_at))
        self.column_tree = remaining[:drop_at] + [spec] + remaining[drop_at:]
        return self._commit()


def init_state(dataset: da.Dataset) -> TableState:
    """Fresh state: flat tree in file order, no filters, version 0."""
    return TableState(dataset)
