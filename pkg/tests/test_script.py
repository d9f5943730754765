import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hs

from tablefold.errors import ScriptError
from tablefold.script import (BinOp, Call, Lit, Neg, Ref, eval_script,
                              evaluate, parse_script, pretty,
                              ScriptDiagnostics, validate_refs)

# Each case: source, environment, expected value (None = missing)
PRECEDENCE_CASES = [
    ("1+2*3", {}, 7.0),
    ("(1+2)*3", {}, 9.0),
    ("2*3+1", {}, 7.0),
    ("10-4-3", {}, 3.0),            # left associative
    ("12/3/2", {}, 2.0),
    ("12/3*2", {}, 8.0),
    ("2*3/3", {}, 2.0),
    ("1+2-3", {}, 0.0),
    ("-2*3", {}, -6.0),             # unary minus binds tighter than *
    ("-2+5", {}, 3.0),
    ("--4", {}, 4.0),
    ("-(2+3)", {}, -5.0),
    ("2*-3", {}, -6.0),
    ("8-2*3", {}, 2.0),
    ("8/2+2", {}, 6.0),
    ("8/(2+2)", {}, 2.0),
    ("1+2+3+4", {}, 10.0),
    ("2*2*2", {}, 8.0),
    ("100/10/5*2", {}, 4.0),
    ("min(3,1,2)", {}, 1.0),
    ("max(3,1,2)", {}, 3.0),
    ("mean(1,2,3)", {}, 2.0),
    ("abs(-4)", {}, 4.0),
    ("log10(100)", {}, 2.0),
    ("max(a,b)*2", {"a": 1.0, "b": 5.0}, 10.0),
    ("min(a,b)+max(a,b)", {"a": 2.0, "b": 7.0}, 9.0),
    ("a+b*c", {"a": 1.0, "b": 2.0, "c": 3.0}, 7.0),
    ("(a+b)*c", {"a": 1.0, "b": 2.0, "c": 3.0}, 9.0),
    ("a/b-c", {"a": 8.0, "b": 2.0, "c": 1.0}, 3.0),
    ("mean(a, b, 6)", {"a": 1.0, "b": 2.0}, 3.0),
    ("-a*-b", {"a": 2.0, "b": 3.0}, 6.0),
    ("1.5*2", {}, 3.0),
    ("0.5+.25", {}, 0.75),
    ("abs(1-2*3)", {}, 5.0),
]


class TestParse:
    def test_ast_shape(self):
        expr = parse_script("max(a,b)*2")
        assert expr == BinOp("*", Call("max", (Ref("a"), Ref("b"))), Lit(2.0))

    @pytest.mark.parametrize("source,env,expected", PRECEDENCE_CASES)
    def test_precedence_suite(self, source, env, expected):
        value = eval_script(parse_script(source), env)
        assert value == pytest.approx(expected)

    def test_syntax_error_offset(self):
        with pytest.raises(ScriptError) as err:
            parse_script("max(")
        assert err.value.offset == 4

    def test_unknown_function(self):
        with pytest.raises(ScriptError, match="unknown function"):
            parse_script("median(a)")

    def test_arity(self):
        with pytest.raises(ScriptError, match="argument"):
            parse_script("abs(1,2)")

    def test_trailing_garbage(self):
        with pytest.raises(ScriptError):
            parse_script("1+2)")

    def test_unknown_identifier_validation(self):
        expr = parse_script("a+b")
        with pytest.raises(ScriptError, match="unknown identifier"):
            validate_refs(expr, {"a"})


class TestEval:
    def test_addition(self):
        assert eval_script(parse_script("a+b"), {"a": 1, "b": 2}) == 3

    def test_division_by_zero_is_missing(self):
        assert eval_script(parse_script("a/0"), {"a": 1}) is None

    def test_mean_skips_missing(self):
        assert eval_script(parse_script("mean(a,b,c)"),
                           {"a": 2, "b": None, "c": 4}) == 3

    def test_arithmetic_strict_over_missing(self):
        assert eval_script(parse_script("a+b"), {"a": 1, "b": None}) is None

    def test_min_max_skip_missing(self):
        assert eval_script(parse_script("min(a,b)"), {"a": None, "b": 3}) == 3
        assert eval_script(parse_script("max(a,b)"), {"a": None, "b": 3}) == 3

    def test_all_missing_function(self):
        assert eval_script(parse_script("mean(a,b)"),
                           {"a": None, "b": None}) is None

    def test_log_of_nonpositive_is_missing(self):
        assert eval_script(parse_script("log10(a)"), {"a": -1}) is None

    def test_diagnostics_counter(self):
        diag = ScriptDiagnostics()
        expr = parse_script("a/b")
        out = evaluate(expr, {"a": np.array([1.0, 2.0, np.nan]),
                              "b": np.array([0.0, 1.0, 0.0])}, 3, diag)
        assert math.isnan(out[0]) and out[1] == 2.0
        assert diag.division_by_zero == 1  # missing numerator not counted

    def test_vector_matches_scalar(self, rng):
        expr = parse_script("mean(a, b) * 2 - abs(b) / (a + 1)")
        a = rng.normal(size=50)
        b = rng.normal(size=50)
        a[::9] = np.nan
        out = evaluate(expr, {"a": a, "b": b}, 50)
        for i in range(50):
            scalar = eval_script(expr, {
                "a": None if np.isnan(a[i]) else float(a[i]),
                "b": float(b[i])})
            if scalar is None:
                assert math.isnan(out[i])
            else:
                assert out[i] == pytest.approx(scalar, nan_ok=True)


# --- random AST round-trip --------------------------------------------------

_names = hs.sampled_from(["a", "b", "c", "x_1", "score"])
_lits = hs.integers(0, 99).map(lambda v: Lit(float(v)))
_refs = _names.map(Ref)


def _exprs(depth=3):
    if depth == 0:
        return hs.one_of(_lits, _refs)
    sub = _exprs(depth - 1)
    return hs.one_of(
        _lits,
        _refs,
        hs.tuples(hs.sampled_from("+-*/"), sub, sub).map(lambda t: BinOp(*t)),
        sub.map(Neg),
        hs.tuples(hs.sampled_from(["min", "max", "mean"]),
                  hs.lists(sub, min_size=1, max_size=3)).map(
                      lambda t: Call(t[0], tuple(t[1]))),
        sub.map(lambda e: Call("abs", (e,))),
    )


@settings(max_examples=400, deadline=None)
@given(_exprs())
def test_pretty_round_trip(expr):
    assert parse_script(pretty(expr)) == expr


@settings(max_examples=200, deadline=None)
@given(_exprs(), hs.integers(0, 2 ** 31 - 1))
def test_eval_totality(expr, seed):
    rng = np.random.default_rng(seed)
    env = {name: rng.normal() * 10 if rng.random() > 0.2 else None
           for name in ("a", "b", "c", "x_1", "score")}
    out = eval_script(expr, env)
    assert out is None or isinstance(out, float)
