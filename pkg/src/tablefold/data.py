"""Column-oriented dataset: CSV ingestion, schema inference, typed columns.

A dataset is immutable after loading. Columns are one of four kinds:

* ``numerical``  -- float64 values, NaN marks missing entries
* ``categorical``-- int32 codes into an ordered category list, -1 missing
* ``text``       -- object array of str, None missing
* ``matrix``     -- a group of homogeneous numerical columns sharing one
                    domain, indexed by a second key (e.g. the year of each
                    inner column); stored as a 2-D float64 block

Missing-value spellings accepted on input: the empty string, "NA", "NaN"
and "-" (case-insensitive).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import SchemaError

MISSING_TOKENS = frozenset({"", "na", "nan", "-"})

NUMERICAL = "numerical"
CATEGORICAL = "categorical"
TEXT = "text"
MATRIX = "matrix"

COLUMN_KINDS = (NUMERICAL, CATEGORICAL, TEXT, MATRIX)

DEFAULT_MAX_CATEGORIES = 20

#: Fixed 10-color categorical palette (cycled when a column has more
#: categories). Color indices stored on ColumnDef refer to this table.
PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


def is_missing_token(token: str) -> bool:
    return token.strip().lower() in MISSING_TOKENS


def parse_number(token: str) -> Optional[float]:
    """Parse a CSV token as a float; None if it is not a number."""
    try:
        return float(token)
    except ValueError:
        return None


@dataclass(frozen=True)
class ColumnDef:
    """Declaration of a single dataset column.

    ``domain`` is the observed [min, max] in data units for numerical and
    matrix columns. ``categories`` and ``color_indices`` apply to
    categorical columns. Matrix columns carry the labels of their inner
    columns plus one second-key value per inner column (e.g. the year).
    """

    id: str
    label: str
    kind: str
    domain: Optional[tuple[float, float]] = None
    categories: Optional[tuple[str, ...]] = None
    color_indices: Optional[tuple[int, ...]] = None
    inner_labels: Optional[tuple[str, ...]] = None
    key_label: Optional[str] = None
    key_values: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in COLUMN_KINDS:
            raise SchemaError(f"unknown column kind {self.kind!r}")
        if self.domain is not None and not self.domain[0] <= self.domain[1]:
            raise SchemaError(f"column {self.id!r}: domain min > max")
        if self.kind == CATEGORICAL:
            if not self.categories:
                raise SchemaError(f"column {self.id!r}: empty category list")
            if len(set(self.categories)) != len(self.categories):
                raise SchemaError(f"column {self.id!r}: duplicate categories")
        if self.kind == MATRIX:
            if not self.inner_labels:
                raise SchemaError(f"column {self.id!r}: matrix without inner columns")
            if self.key_values is not None and len(self.key_values) != len(self.inner_labels):
                raise SchemaError(
                    f"column {self.id!r}: second-key length {len(self.key_values)} "
                    f"!= inner column count {len(self.inner_labels)}"
                )

    @property
    def n_inner(self) -> int:
        return len(self.inner_labels) if self.inner_labels else 0

    def category_index(self, name: str) -> int:
        return self.categories.index(name)

    def to_dict(self) -> dict:
        doc = {"id": self.id, "label": self.label, "kind": self.kind}
        if self.domain is not None:
            doc["domain"] = list(self.domain)
        if self.categories is not None:
            doc["categories"] = list(self.categories)
            doc["colors"] = list(self.color_indices)
        if self.kind == MATRIX:
            doc["matrix"] = {
                "members": list(self.inner_labels),
                "key": {"label": self.key_label, "values": list(self.key_values or ())},
            }
        return doc


class Dataset:
    """Immutable column store with per-column value arrays and missing masks."""

    def __init__(self, columns: Sequence[ColumnDef], values: dict, masks: dict,
                 row_count: int, fingerprint: str = ""):
        ids = [c.id for c in columns]
        if len(set(ids)) != len(ids):
            raise SchemaError("duplicate column ids")
        self.columns = list(columns)
        self._by_id = {c.id: c for c in columns}
        self._values = values
        self._masks = masks
        self.row_count = row_count
        self.row_ids = np.arange(row_count, dtype=np.int64)
        self.fingerprint = fingerprint
        for c in columns:
            if len(values[c.id]) != row_count:
                raise SchemaError(f"column {c.id!r}: length != row_count")

    @property
    def column_ids(self) -> list[str]:
        return [c.id for c in self.columns]

    def column(self, column_id: str) -> ColumnDef:
        try:
            return self._by_id[column_id]
        except KeyError:
            raise KeyError(f"unknown column {column_id!r}") from None

    def has_column(self, column_id: str) -> bool:
        return column_id in self._by_id

    def values(self, column_id: str) -> np.ndarray:
        """Raw value array: float64 / int32 codes / object / 2-D float64."""
        self.column(column_id)
        return self._values[column_id]

    def mask(self, column_id: str) -> np.ndarray:
        """Boolean missing mask, True where the value is missing."""
        self.column(column_id)
        return self._masks[column_id]

    def cell(self, row_id: int, column_id: str):
        """Single cell value; None (or NaN entries in a matrix slice) when missing."""
        col = self.column(column_id)
        if not 0 <= row_id < self.row_count:
            raise KeyError(f"unknown row id {row_id!r}")
        vals = self._values[column_id]
        if col.kind == MATRIX:
            return vals[row_id].copy()
        if self._masks[column_id][row_id]:
            return None
        v = vals[row_id]
        if col.kind == NUMERICAL:
            return float(v)
        if col.kind == CATEGORICAL:
            return int(v)
        return v

    def category_name(self, column_id: str, row_id: int) -> Optional[str]:
        code = self.cell(row_id, column_id)
        if code is None:
            return None
        return self.column(column_id).categories[code]


# ---------------------------------------------------------------------------
# Schema inference

def infer_schema(sample_rows: list[list[str]],
                 max_cat_cardinality: int = DEFAULT_MAX_CATEGORIES,
                 names: Optional[Sequence[str]] = None) -> list[ColumnDef]:
    """Infer one ColumnDef per column of a string table.

    A column is numerical when every non-missing token parses as a number,
    else categorical when its distinct non-missing tokens fit within
    ``max_cat_cardinality``, else text. Missing tokens never influence the
    classification. Columns with no non-missing tokens fall back to text.
    """
    if not sample_rows:
        raise SchemaError("empty sample")
    width = len(sample_rows[0])
    for i, row in enumerate(sample_rows):
        if len(row) != width:
            raise SchemaError(f"ragged row {i}: expected {width} fields, got {len(row)}")
    if names is None:
        names = [f"col{j}" for j in range(width)]
    elif len(names) != width:
        raise SchemaError(f"{len(names)} names for {width} columns")

    defs = []
    for j, name in enumerate(names):
        tokens = [row[j] for row in sample_rows]
        present = [t for t in tokens if not is_missing_token(t)]
        if not present:
            defs.append(ColumnDef(id=name, label=name, kind=TEXT))
            continue
        numbers = [parse_number(t) for t in present]
        if all(v is not None for v in numbers):
            defs.append(ColumnDef(
                id=name, label=name, kind=NUMERICAL,
                domain=(min(numbers), max(numbers)),
            ))
            continue
        distinct = list(dict.fromkeys(present))  # first-appearance order
        if len(distinct) <= max_cat_cardinality:
            defs.append(ColumnDef(
                id=name, label=name, kind=CATEGORICAL,
                categories=tuple(distinct),
                color_indices=tuple(i % len(PALETTE) for i in range(len(distinct))),
            ))
        else:
            defs.append(ColumnDef(id=name, label=name, kind=TEXT))
    return defs


# ---------------------------------------------------------------------------
# Descriptor handling

def _descriptor_columns(descriptor: dict) -> list[dict]:
    if not isinstance(descriptor, dict) or not isinstance(descriptor.get("columns"), list):
        raise SchemaError("descriptor must be an object with a 'columns' list")
    return descriptor["columns"]


def _parse_numeric_cell(token: str, column: str, row: int) -> float:
    if is_missing_token(token):
        return math.nan
    v = parse_number(token)
    if v is None:
        raise SchemaError(f"column {column!r}, row {row}: {token!r} is not a number")
    return v


def load_dataset(csv_bytes: bytes, descriptor: Optional[dict] = None,
                 max_cat_cardinality: int = DEFAULT_MAX_CATEGORIES) -> Dataset:
    """Load a header-ed, RFC-4180 CSV (UTF-8) into a Dataset.

    The optional descriptor document declares columns explicitly and may
    collapse a named set of CSV columns into a single matrix column with
    second-key values. CSV columns not referenced by the descriptor are
    schema-inferred. See docs/formats.md for the descriptor schema.
    """
    try:
        text = csv_bytes.decode("utf-8")
    except UnicodeDecodeError as e:
        raise SchemaError(f"CSV is not valid UTF-8: {e}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise SchemaError("empty CSV")
    header = rows[0]
    if len(set(header)) != len(header):
        dupes = sorted({h for h in header if header.count(h) > 1})
        raise SchemaError(f"duplicate header names: {dupes}")
    body = rows[1:]
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise SchemaError(f"ragged row {i}: expected {len(header)} fields, got {len(row)}")
    col_index = {name: j for j, name in enumerate(header)}
    n = len(body)

    declared: list[tuple[ColumnDef, dict]] = []
    consumed: set[str] = set()
    if descriptor is not None:
        for entry in _descriptor_columns(descriptor):
            cdef, members = _declare_column(entry, col_index)
            declared.append((cdef, members))
            consumed.update(members["csv_columns"])

    inferred_names = [h for h in header if h not in consumed]
    if inferred_names:
        sample = [[row[col_index[h]] for h in inferred_names] for row in body] or [[""] * len(inferred_names)]
        if not body:
            inferred = [ColumnDef(id=h, label=h, kind=TEXT) for h in inferred_names]
        else:
            inferred = infer_schema(sample, max_cat_cardinality, names=inferred_names)
    else:
        inferred = []

    # Preserve CSV column order: declared columns sit at the position of
    # their first member; inferred ones at their own position.
    order: list[tuple[int, ColumnDef, Optional[dict]]] = []
    for cdef, members in declared:
        first = min(col_index[name] for name in members["csv_columns"])
        order.append((first, cdef, members))
    for cdef in inferred:
        order.append((col_index[cdef.id], cdef, None))
    order.sort(key=lambda t: t[0])

    values: dict = {}
    masks: dict = {}
    out_defs: list[ColumnDef] = []
    for _, cdef, members in order:
        cdef, vals, mask = _materialize_column(cdef, members, body, col_index, n)
        out_defs.append(cdef)
        values[cdef.id] = vals
        masks[cdef.id] = mask

    digest = hashlib.sha256(csv_bytes)
    if descriptor is not None:
        digest.update(json.dumps(descriptor, sort_keys=True).encode())
    return Dataset(out_defs, values, masks, n, fingerprint=digest.hexdigest())


def _declare_column(entry: dict, col_index: dict) -> tuple[ColumnDef, dict]:
    """Turn one descriptor entry into a (pre-domain) ColumnDef + member info."""
    if "id" not in entry or "kind" not in entry:
        raise SchemaError(f"descriptor entry missing 'id' or 'kind': {entry}")
    cid = entry["id"]
    label = entry.get("label", cid)
    kind = entry["kind"]
    if kind == MATRIX:
        matrix = entry.get("matrix")
        if not matrix or "members" not in matrix:
            raise SchemaError(f"matrix column {cid!r} needs matrix.members")
        members = matrix["members"]
        for m in members:
            if m not in col_index:
                raise SchemaError(f"matrix column {cid!r} references unknown CSV column {m!r}")
        key = matrix.get("key", {})
        key_values = key.get("values")
        if key_values is not None and len(key_values) != len(members):
            raise SchemaError(f"matrix column {cid!r}: key values length != member count")
        cdef = ColumnDef(
            id=cid, label=label, kind=MATRIX, domain=(0.0, 1.0),
            inner_labels=tuple(members),
            key_label=key.get("label"),
            key_values=tuple(key_values) if key_values is not None else tuple(members),
        )
        return cdef, {"csv_columns": list(members)}
    if kind not in (NUMERICAL, CATEGORICAL, TEXT):
        raise SchemaError(f"column {cid!r}: unknown kind {kind!r}")
    if cid not in col_index:
        raise SchemaError(f"descriptor references unknown CSV column {cid!r}")
    if kind == CATEGORICAL:
        cats = entry.get("categories")
        cdef = ColumnDef(
            id=cid, label=label, kind=CATEGORICAL,
            categories=tuple(cats) if cats else ("?",),  # placeholder, filled on materialize
            color_indices=tuple(i % len(PALETTE) for i in range(len(cats))) if cats else (0,),
        )
        # mark whether categories were declared (placeholder tuple otherwise)
        return cdef, {"csv_columns": [cid], "declared_categories": bool(cats)}
    domain = entry.get("domain")
    cdef = ColumnDef(
        id=cid, label=label, kind=kind,
        domain=tuple(domain) if domain else ((0.0, 1.0) if kind == NUMERICAL else None),
    )
    return cdef, {"csv_columns": [cid], "declared_domain": bool(domain)}


def _materialize_column(cdef: ColumnDef, members: Optional[dict], body: list,
                        col_index: dict, n: int):
    """Parse the CSV tokens of one column into arrays; derive domains."""
    if members is None:
        members = {"csv_columns": [cdef.id]}
    if cdef.kind == MATRIX:
        cols = [col_index[m] for m in members["csv_columns"]]
        block = np.empty((n, len(cols)), dtype=np.float64)
        for i, row in enumerate(body):
            for k, j in enumerate(cols):
                block[i, k] = _parse_numeric_cell(row[j], cdef.id, i)
        mask = np.isnan(block)
        domain = _observed_domain(block[~mask]) if not mask.all() else (0.0, 1.0)
        cdef = ColumnDef(id=cdef.id, label=cdef.label, kind=MATRIX, domain=domain,
                         inner_labels=cdef.inner_labels, key_label=cdef.key_label,
                         key_values=cdef.key_values)
        return cdef, block, mask

    j = col_index[cdef.id]
    tokens = [row[j] for row in body]
    if cdef.kind == NUMERICAL:
        vals = np.array([_parse_numeric_cell(t, cdef.id, i) for i, t in enumerate(tokens)],
                        dtype=np.float64)
        mask = np.isnan(vals)
        if not members.get("declared_domain"):
            domain = _observed_domain(vals[~mask]) if not mask.all() else (0.0, 1.0)
            cdef = ColumnDef(id=cdef.id, label=cdef.label, kind=NUMERICAL, domain=domain)
        if vals.size == 0:
            vals = np.zeros(0, dtype=np.float64)
        return cdef, vals, mask

    if cdef.kind == CATEGORICAL:
        if members.get("declared_categories"):
            cats = list(cdef.categories)
        else:
            cats = list(dict.fromkeys(t for t in tokens if not is_missing_token(t)))
            if not cats:
                cats = ["?"]
        lookup = {c: i for i, c in enumerate(cats)}
        codes = np.empty(n, dtype=np.int32)
        for i, t in enumerate(tokens):
            if is_missing_token(t):
                codes[i] = -1
            elif t in lookup:
                codes[i] = lookup[t]
            else:
                raise SchemaError(f"column {cdef.id!r}, row {i}: {t!r} not in declared categories")
        cdef = ColumnDef(
            id=cdef.id, label=cdef.label, kind=CATEGORICAL,
            categories=tuple(cats),
            color_indices=tuple(i % len(PALETTE) for i in range(len(cats))),
        )
        return cdef, codes, codes == -1

    # text
    vals = np.empty(n, dtype=object)
    mask = np.zeros(n, dtype=bool)
    for i, t in enumerate(tokens):
        if is_missing_token(t):
            vals[i] = None
            mask[i] = True
        else:
            vals[i] = t
    return cdef, vals, mask


def _observed_domain(values: np.ndarray) -> tuple[float, float]:
    return (float(values.min()), float(values.max()))


# ---------------------------------------------------------------------------
# Second-key partitioning (matrix column grouping)

def partition_by_key(coldef: ColumnDef, thresholds: Optional[Sequence[float]] = None):
    """Group a matrix column's inner columns by their second key.

    Categorical keys partition by equal value; numerical keys by the given
    ascending thresholds (e.g. decades for years). Returns an ordered list
    of (label, inner-column index array) pairs.
    """
    if coldef.kind != MATRIX:
        raise SchemaError(f"column {coldef.id!r} is not a matrix")
    keys = list(coldef.key_values or coldef.inner_labels)
    numeric = [parse_number(str(k)) for k in keys]
    if thresholds is not None:
        if any(v is None for v in numeric):
            raise SchemaError(f"column {coldef.id!r}: second key is not numerical")
        thresholds = list(thresholds)
        if thresholds != sorted(thresholds) or len(set(thresholds)) != len(thresholds):
            raise SchemaError("thresholds must be strictly ascending")
        arr = np.asarray(numeric, dtype=np.float64)
        idx = np.searchsorted(np.asarray(thresholds), arr, side="right")
        groups = []
        for b in range(len(thresholds) + 1):
            sel = np.nonzero(idx == b)[0]
            if sel.size:
                groups.append((bin_label(b, thresholds), sel))
        return groups
    labels = list(dict.fromkeys(str(k) for k in keys))
    str_keys = [str(k) for k in keys]
    return [(lab, np.nonzero([s == lab for s in str_keys])[0]) for lab in labels]


def bin_label(index: int, thresholds: Sequence[float]) -> str:
    def fmt(x):
        return f"{x:g}"
    if index == 0:
        return f"< {fmt(thresholds[0])}"
    if index == len(thresholds):
        return f">= {fmt(thresholds[-1])}"
    return f"[{fmt(thresholds[index - 1])}, {fmt(thresholds[index])})"
