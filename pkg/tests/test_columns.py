import numpy as np
import pytest

from tablefold import columns as cols
from tablefold import data as da
from tablefold.errors import StateError

from _oracles import weighted_sum_oracle
from _synth import make_dataset


@pytest.fixture
def mixed_dataset():
    return make_dataset([
        ("num_a", da.NUMERICAL, [0.1, 0.5, 0.9]),
        ("num_b", da.NUMERICAL, [1.0, 2.0, 3.0]),
        ("cat", da.CATEGORICAL, (["x", "y"], [0, 1, 0])),
        ("txt", da.TEXT, ["p", "q", "r"]),
    ], 3)


class TestWeights:
    def test_widths_to_weights(self):
        assert cols.normalize_weights([100, 300]) == [0.25, 0.75]

    def test_equal(self):
        assert cols.normalize_weights([1, 1, 1]) == pytest.approx([1 / 3] * 3)

    def test_sum_to_one(self, rng):
        for _ in range(50):
            widths = rng.uniform(1, 500, size=int(rng.integers(1, 8)))
            w = cols.normalize_weights(widths.tolist())
            assert abs(sum(w) - 1.0) <= 1e-12

    def test_scale_invariance(self, rng):
        widths = rng.uniform(1, 100, size=5).tolist()
        base = cols.normalize_weights(widths)
        scaled = cols.normalize_weights([w * 17.5 for w in widths])
        assert base == pytest.approx(scaled, abs=1e-12)

    def test_non_positive_rejected(self):
        with pytest.raises(StateError):
            cols.normalize_weights([10, 0])


class TestStacked:
    def test_score(self):
        score, segs = cols.eval_stacked([0.2, 0.6], [0.5, 0.5])
        assert score == pytest.approx(0.4)
        assert [s.missing for s in segs] == [False, False]

    def test_degenerate_weight(self):
        score, _ = cols.eval_stacked([0.33, 0.99], [1.0, 0.0])
        assert score == pytest.approx(0.33)

    def test_missing_contributes_zero(self):
        score, segs = cols.eval_stacked([None, 0.8], [0.5, 0.5])
        assert score == pytest.approx(0.4)
        assert segs[0].missing and segs[0].value == 0.0

    def test_length_mismatch(self):
        with pytest.raises(StateError):
            cols.eval_stacked([0.1], [0.5, 0.5])

    def test_linearity(self, rng):
        weights = cols.normalize_weights(rng.uniform(1, 10, size=4).tolist())
        vals = rng.uniform(0, 1, size=4).tolist()
        s1, _ = cols.eval_stacked(vals, weights)
        s2, _ = cols.eval_stacked([v * 0.5 for v in vals], weights)
        assert s2 == pytest.approx(0.5 * s1)

    def test_ranking_matches_oracle(self, rng):
        n = 200
        a = rng.uniform(0, 1, size=n)
        b = rng.uniform(0, 1, size=n)
        a[rng.random(n) < 0.1] = np.nan
        weights = [0.3, 0.7]
        scores = cols.stacked_scores([a, b], weights)
        ref = weighted_sum_oracle(
            [[None if np.isnan(a[i]) else a[i], b[i]] for i in range(n)], weights)
        assert np.argsort(-scores, kind="stable").tolist() == \
            sorted(range(n), key=lambda i: -ref[i])


class TestReducer:
    def test_max(self):
        assert cols.eval_reducer("max", [0.3, 0.9]) == 0.9

    def test_mean_skips_missing(self):
        assert cols.eval_reducer("mean", [1, None, 3]) == 2

    def test_all_missing(self):
        assert cols.eval_reducer("min", [None, None]) is None

    def test_min_matches_scan(self, rng):
        for _ in range(50):
            vals = [None if rng.random() < 0.2 else float(rng.normal())
                    for _ in range(6)]
            got = cols.eval_reducer("min", vals)
            present = [v for v in vals if v is not None]
            assert got == (min(present) if present else None)

    def test_reduce_arrays_matches_scalar(self, rng):
        a = rng.normal(size=40)
        b = rng.normal(size=40)
        a[::5] = np.nan
        for op in ("min", "max", "mean"):
            out = cols.reduce_arrays(op, [a, b])
            for i in range(40):
                ref = cols.eval_reducer(op, [
                    None if np.isnan(a[i]) else a[i], b[i]])
                assert out[i] == pytest.approx(ref)


class TestValidation:
    def _specs(self, ds, *ids):
        return [cols.data_column(ds.column(i)) for i in ids]

    def test_stack_numericals(self, mixed_dataset):
        cols.validate_combination(cols.STACKED,
                                  self._specs(mixed_dataset, "num_a", "num_b"),
                                  mixed_dataset)

    def test_stack_text_rejected(self, mixed_dataset):
        with pytest.raises(StateError):
            cols.validate_combination(cols.STACKED,
                                      self._specs(mixed_dataset, "num_a", "txt"),
                                      mixed_dataset)

    def test_imposition_constraint(self, mixed_dataset):
        cols.validate_combination(cols.IMPOSITION,
                                  self._specs(mixed_dataset, "num_a", "cat"),
                                  mixed_dataset)
        with pytest.raises(StateError):
            cols.validate_combination(cols.IMPOSITION,
                                      self._specs(mixed_dataset, "num_a", "num_b"),
                                      mixed_dataset)

    def test_nested_allows_any(self, mixed_dataset):
        cols.validate_combination(cols.NESTED,
                                  self._specs(mixed_dataset, "num_a", "cat", "txt"),
                                  mixed_dataset)

    def test_scripted_validates_refs(self, mixed_dataset):
        cols.validate_combination(cols.SCRIPTED, [], mixed_dataset,
                                  script_source="num_a + num_b")
        with pytest.raises(Exception):
            cols.validate_combination(cols.SCRIPTED, [], mixed_dataset,
                                      script_source="num_a + nope")

    def test_spec_serialization_round_trip(self, mixed_dataset):
        spec = cols.ColumnSpec(
            id="stack_1", kind=cols.STACKED, label="score",
            children=[cols.data_column(mixed_dataset.column("num_a")),
                      cols.data_column(mixed_dataset.column("num_b"))])
        assert cols.ColumnSpec.from_dict(spec.to_dict()) == spec
