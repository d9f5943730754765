import json

import numpy as np
import pytest

from tablefold import data as da
from tablefold.data import infer_schema, load_dataset, partition_by_key
from tablefold.errors import SchemaError

from _synth import aids_shaped_csv


class TestInferSchema:
    def test_numerical_with_missing(self):
        defs = infer_schema([["1"], ["2"], [""]])
        assert defs[0].kind == da.NUMERICAL
        assert defs[0].domain == (1.0, 2.0)

    def test_categorical_order(self):
        defs = infer_schema([["a"], ["b"], ["a"]], max_cat_cardinality=20)
        assert defs[0].kind == da.CATEGORICAL
        assert defs[0].categories == ("a", "b")

    def test_text_above_cardinality(self):
        rows = [[f"word{i}"] for i in range(30)]
        defs = infer_schema(rows, max_cat_cardinality=20)
        assert defs[0].kind == da.TEXT

    def test_missing_spellings_ignored(self):
        defs = infer_schema([["NA"], ["3"], ["nan"], ["-"], ["5"]])
        assert defs[0].kind == da.NUMERICAL
        assert defs[0].domain == (3.0, 5.0)

    def test_ragged_rows_name_index(self):
        with pytest.raises(SchemaError, match="row 1"):
            infer_schema([["a", "b"], ["a"]])

    def test_deterministic(self):
        rows = [["x", "1"], ["y", "2"], ["x", "3"]]
        a = infer_schema(rows)
        b = infer_schema(rows)
        assert a == b


class TestLoadDataset:
    def test_basic(self):
        ds = load_dataset(b"name,age\nA,1\nB,2\nC,3\n")
        assert len(ds.columns) == 2
        assert ds.row_count == 3
        assert list(ds.row_ids) == [0, 1, 2]

    def test_matrix_descriptor(self):
        years = [f"y{1990 + i}" for i in range(10)]
        header = ",".join(["name"] + years)
        row = ",".join(["A"] + [str(i) for i in range(10)])
        descriptor = {"columns": [{
            "id": "deaths", "kind": "matrix",
            "matrix": {"members": years,
                       "key": {"label": "year",
                               "values": list(range(1990, 2000))}},
        }]}
        ds = load_dataset(f"{header}\n{row}\n".encode(), descriptor)
        deaths = ds.column("deaths")
        assert deaths.kind == da.MATRIX
        assert deaths.n_inner == 10
        assert deaths.key_values == tuple(range(1990, 2000))
        slice_ = ds.cell(0, "deaths")
        assert list(slice_) == list(range(10))

    def test_aids_shaped(self, rng):
        csv_bytes, descriptor = aids_shaped_csv(rng)
        ds = load_dataset(csv_bytes, descriptor)
        assert ds.row_count == 160
        kinds = [c.kind for c in ds.columns]
        assert kinds.count(da.NUMERICAL) == 17
        assert kinds.count(da.CATEGORICAL) == 4
        assert kinds.count(da.MATRIX) == 10
        assert kinds.count(da.TEXT) == 1

    def test_duplicate_headers(self):
        with pytest.raises(SchemaError, match="duplicate"):
            load_dataset(b"a,a\n1,2\n")

    def test_descriptor_unknown_column(self):
        with pytest.raises(SchemaError, match="unknown CSV column"):
            load_dataset(b"a\n1\n", {"columns": [{"id": "b", "kind": "numerical"}]})

    def test_token_fails_declared_type(self):
        with pytest.raises(SchemaError, match="not a number"):
            load_dataset(b"a\nfoo\n",
                         {"columns": [{"id": "a", "kind": "numerical"}]})

    def test_domain_brackets_values(self, rng):
        vals = rng.normal(size=200) * 7
        body = "\n".join(f"{v}" for v in vals)
        ds = load_dataset(f"x\n{body}\n".encode())
        lo, hi = ds.column("x").domain
        assert lo <= vals.min() and hi >= vals.max()

    def test_quoted_fields(self):
        ds = load_dataset(b'name,note\nA,"x, y"\nB,"line"\n')
        assert ds.category_name("note", 0) == "x, y"

    def test_descriptor_declared_categories(self):
        ds = load_dataset(b"c\nb\na\n",
                          {"columns": [{"id": "c", "kind": "categorical",
                                        "categories": ["a", "b"]}]})
        assert ds.column("c").categories == ("a", "b")
        assert ds.cell(0, "c") == 1


class TestCell:
    def test_number(self, small_dataset):
        assert small_dataset.cell(0, "age") == 30.0

    def test_missing(self, small_dataset):
        assert small_dataset.cell(1, "age") is None

    def test_unknown_ids(self, small_dataset):
        with pytest.raises(KeyError):
            small_dataset.cell(0, "nope")
        with pytest.raises(KeyError):
            small_dataset.cell(99, "age")

    def test_matrix_slice_with_missing(self):
        csv = b"m1,m2\n1,\n,2\n"
        ds = load_dataset(csv, {"columns": [{
            "id": "m", "kind": "matrix",
            "matrix": {"members": ["m1", "m2"], "key": {"values": [1, 2]}}}]})
        s = ds.cell(0, "m")
        assert s[0] == 1.0 and np.isnan(s[1])


class TestSecondKeyPartition:
    def test_categorical_key(self):
        col = da.ColumnDef(id="m", kind=da.MATRIX, label="m",
                           inner_labels=("a", "b", "c"),
                           key_values=("x", "y", "x"))
        groups = partition_by_key(col)
        assert [(lab, list(idx)) for lab, idx in groups] == [
            ("x", [0, 2]), ("y", [1])]

    def test_numeric_key_thresholds(self):
        col = da.ColumnDef(id="m", kind=da.MATRIX, label="m",
                           inner_labels=tuple(f"y{v}" for v in range(1995, 2005)),
                           key_values=tuple(range(1995, 2005)))
        groups = partition_by_key(col, thresholds=[2000])
        assert groups[0][0] == "< 2000"
        assert list(groups[0][1]) == [0, 1, 2, 3, 4]
        assert groups[1][0] == ">= 2000"
        assert list(groups[1][1]) == [5, 6, 7, 8, 9]
