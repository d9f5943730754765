"""Combined display columns: nested, stacked, interleaved, imposition, reducers, scripted.

A display column is either a direct reference to a dataset column or a
combinator over child display columns. Stacked columns score rows by a
weighted sum of their children's mapped values; the weights are the
children's normalized widths. Scripted columns evaluate a parsed
expression over raw values.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from . import data as da
from . import script as sc
from .errors import StateError

DATA = "data"
NESTED = "nested"
STACKED = "stacked"
INTERLEAVED = "interleaved"
IMPOSITION = "imposition"
REDUCER = "reducer"
SCRIPTED = "scripted"

COMBINE_KINDS = (NESTED, STACKED, INTERLEAVED, IMPOSITION, REDUCER, SCRIPTED)

REDUCER_OPS = ("min", "max", "mean")

DEFAULT_WIDTH = 100.0


@dataclass
class ColumnSpec:
    """One node of the display-column tree."""

    id: str
    kind: str
    label: str = ""
    width: float = DEFAULT_WIDTH
    column_id: Optional[str] = None          # data reference
    children: list["ColumnSpec"] = field(default_factory=list)
    reducer_op: Optional[str] = None
    script_source: Optional[str] = None

    def __post_init__(self):
        if not self.label:
            self.label = self.id

    def to_dict(self) -> dict:
        doc = {"id": self.id, "kind": self.kind, "label": self.label, "width": self.width}
        if self.column_id is not None:
            doc["column"] = self.column_id
        if self.children:
            doc["children"] = [c.to_dict() for c in self.children]
        if self.reducer_op is not None:
            doc["reducer"] = self.reducer_op
        if self.script_source is not None:
            doc["script"] = self.script_source
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "ColumnSpec":
        return ColumnSpec(
            id=doc["id"], kind=doc["kind"], label=doc.get("label", doc["id"]),
            width=float(doc.get("width", DEFAULT_WIDTH)),
            column_id=doc.get("column"),
            children=[ColumnSpec.from_dict(c) for c in doc.get("children", [])],
            reducer_op=doc.get("reducer"),
            script_source=doc.get("script"),
        )


def data_column(coldef: da.ColumnDef, width: float = DEFAULT_WIDTH) -> ColumnSpec:
    return ColumnSpec(id=coldef.id, kind=DATA, label=coldef.label,
                      column_id=coldef.id, width=width)


def leaf_columns(tree: Sequence[ColumnSpec]) -> list[ColumnSpec]:
    """Flatten the tree to the columns that own a cell band.

    Nested columns only add a joint header, so they expand to their
    children; every other kind is itself a leaf.
    """
    out: list[ColumnSpec] = []
    for spec in tree:
        if spec.kind == NESTED:
            out.extend(leaf_columns(spec.children))
        else:
            out.append(spec)
    return out


def walk(tree: Sequence[ColumnSpec]):
    for spec in tree:
        yield spec
        yield from walk(spec.children)


def find_column(tree: Sequence[ColumnSpec], column_id: str) -> Optional[ColumnSpec]:
    for spec in walk(tree):
        if spec.id == column_id:
            return spec
    return None


def value_kind(spec: ColumnSpec, dataset: da.Dataset) -> Optional[str]:
    """The scalar value kind a column produces, or None for containers.

    Nested and interleaved columns have no value of their own; imposition
    contributes no value either (it only recolors its numerical child).
    """
    if spec.kind == DATA:
        return dataset.column(spec.column_id).kind
    if spec.kind in (STACKED, REDUCER, SCRIPTED):
        return da.NUMERICAL
    return None


def is_numeric_producing(spec: ColumnSpec, dataset: da.Dataset) -> bool:
    return value_kind(spec, dataset) == da.NUMERICAL


def validate_combination(kind: str, children: Sequence[ColumnSpec],
                         dataset: da.Dataset, reducer_op: Optional[str] = None,
                         script_source: Optional[str] = None):
    """Raise StateError when the child set is illegal for the combinator."""
    if kind not in COMBINE_KINDS:
        raise StateError(f"unknown combined-column kind {kind!r}")
    if kind == SCRIPTED:
        if children:
            raise StateError("scripted columns take no children")
        if not script_source:
            raise StateError("scripted column needs a script source")
        expr = sc.parse_script(script_source)
        numeric = {c.id for c in dataset.columns if c.kind == da.NUMERICAL}
        sc.validate_refs(expr, numeric)
        return
    if not children:
        raise StateError(f"{kind} column needs at least one child")
    if kind == NESTED:
        return
    if kind == IMPOSITION:
        if len(children) != 2:
            raise StateError("imposition takes exactly two children")
        kinds = sorted(value_kind(c, dataset) or "none" for c in children)
        if kinds != [da.CATEGORICAL, da.NUMERICAL]:
            raise StateError("imposition needs one numerical and one categorical child")
        return
    if kind == REDUCER and reducer_op not in REDUCER_OPS:
        raise StateError(f"unknown reducer {reducer_op!r}")
    for c in children:
        if not is_numeric_producing(c, dataset):
            raise StateError(f"{kind} child {c.id!r} is not numerical")


def normalize_weights(widths: Sequence[float]) -> list[float]:
    """Weights on the unit simplex proportional to the given widths."""
    for w in widths:
        if not w > 0:
            raise StateError(f"non-positive width {w!r}")
    total = float(sum(widths))
    return [float(w) / total for w in widths]


def stacked_weights(spec: ColumnSpec) -> list[float]:
    return normalize_weights([c.width for c in spec.children])


@dataclass(frozen=True)
class StackedSegment:
    value: float          # weighted contribution in [0, weight]
    weight: float
    missing: bool


def eval_stacked(values: Sequence[Optional[float]], weights: Sequence[float]):
    """Weighted sum of mapped child values for one row.

    Missing children contribute 0 and flag their segment. Returns
    (score, segments in child order).
    """
    if len(values) != len(weights):
        raise StateError(f"{len(values)} values for {len(weights)} weights")
    score = 0.0
    segments = []
    for v, w in zip(values, weights):
        miss = v is None or (isinstance(v, float) and np.isnan(v))
        contrib = 0.0 if miss else float(w) * float(v)
        score += contrib
        segments.append(StackedSegment(value=contrib, weight=float(w), missing=miss))
    return score, segments


def stacked_scores(child_values: Sequence[np.ndarray], weights: Sequence[float]) -> np.ndarray:
    """Vector form of eval_stacked score over whole columns (NaN = missing)."""
    out = np.zeros(len(child_values[0]), dtype=np.float64)
    for vals, w in zip(child_values, weights):
        out += np.where(np.isnan(vals), 0.0, vals) * w
    return out


def eval_reducer(op: str, values: Sequence[Optional[float]]) -> Optional[float]:
    """Reducer over the non-missing children; all-missing yields missing."""
    if op not in REDUCER_OPS:
        raise StateError(f"unknown reducer {op!r}")
    present = [float(v) for v in values
               if v is not None and not (isinstance(v, float) and np.isnan(v))]
    if not present:
        return None
    if op == "min":
        return min(present)
    if op == "max":
        return max(present)
    return sum(present) / len(present)


def reduce_arrays(op: str, child_values: Sequence[np.ndarray]) -> np.ndarray:
    stack = np.stack([np.asarray(v, dtype=np.float64) for v in child_values])
    if op == "min":
        out = stack[0].copy()
        for i in range(1, len(child_values)):
            out = np.fmin(out, stack[i])
        return out
    if op == "max":
        out = stack[0].copy()
        for i in range(1, len(child_values)):
            out = np.fmax(out, stack[i])
        return out
    counts = (~np.isnan(stack)).sum(axis=0)
    sums = np.nansum(stack, axis=0)
    return np.where(counts > 0, sums / np.where(counts == 0, 1, counts), np.nan)
