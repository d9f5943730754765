"""Expression language for scripted columns.

Grammar (normative, documented in docs/formats.md):

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | number | ident | ident '(' expr (',' expr)* ')'
            | '(' expr ')'
    ident  := [A-Za-z_][A-Za-z0-9_]*

Identifiers resolve to column ids. Scripts read raw (unmapped) values.
Arithmetic is strict over missing (any missing operand yields missing);
min/max/mean skip missing arguments; division by zero yields missing and
bumps a diagnostics counter. Evaluation never raises.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ScriptError

#: name -> (min arity, max arity or None for variadic)
FUNCTIONS = {
    "min": (1, None),
    "max": (1, None),
    "mean": (1, None),
    "abs": (1, 1),
    "log10": (1, 1),
}


@dataclass(frozen=True)
class Lit:
    value: float


@dataclass(frozen=True)
class Ref:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expression"


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expression", ...]


Expression = Union[Lit, Ref, Neg, BinOp, Call]

_TOKEN = re.compile(r"\s*(?:(\d+\.\d+|\d+\.|\.\d+|\d+)|([A-Za-z_][A-Za-z0-9_]*)|([()+\-*/,]))")


def _tokenize(source: str):
    tokens = []
    pos = 0
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            stripped = source[pos:].lstrip()
            if not stripped:
                break
            offset = len(source) - len(stripped)
            raise ScriptError(f"unexpected character {stripped[0]!r} at offset {offset}",
                              offset=offset)
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("ident", m.group(2), m.start(2)))
        else:
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, symbol: str):
        kind, text, offset = self.peek()
        if kind != "op" or text != symbol:
            raise ScriptError(f"expected {symbol!r} at offset {offset}", offset=offset)
        return self.next()

    def parse(self) -> Expression:
        expr = self.expr()
        kind, text, offset = self.peek()
        if kind != "end":
            raise ScriptError(f"unexpected {text!r} at offset {offset}", offset=offset)
        return expr

    def expr(self) -> Expression:
        node = self.term()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "+-":
                self.next()
                node = BinOp(text, node, self.term())
            else:
                return node

    def term(self) -> Expression:
        node = self.factor()
        while True:
            kind, text, _ = self.peek()
            if kind == "op" and text in "*/":
                self.next()
                node = BinOp(text, node, self.factor())
            else:
                return node

    def factor(self) -> Expression:
        kind, text, offset = self.peek()
        if kind == "op" and text == "-":
            self.next()
            return Neg(self.factor())
        if kind == "num":
            self.next()
            return Lit(float(text))
        if kind == "ident":
            self.next()
            nk, nt, _ = self.peek()
            if nk == "op" and nt == "(":
                return self.call(text, offset)
            return Ref(text)
        if kind == "op" and text == "(":
            self.next()
            node = self.expr()
            self.expect_op(")")
            return node
        raise ScriptError(f"expected an expression at offset {offset}", offset=offset)

    def call(self, name: str, name_offset: int) -> Expression:
        if name not in FUNCTIONS:
            raise ScriptError(f"unknown function {name!r} at offset {name_offset}",
                              offset=name_offset)
        self.expect_op("(")
        args = [self.expr()]
        while True:
            kind, text, offset = self.peek()
            if kind == "op" and text == ",":
                self.next()
                args.append(self.expr())
            elif kind == "op" and text == ")":
                self.next()
                break
            else:
                raise ScriptError(f"expected ',' or ')' at offset {offset}", offset=offset)
        lo, hi = FUNCTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise ScriptError(f"{name} takes {lo if hi == lo else f'at least {lo}'} "
                              f"argument(s), got {len(args)}", offset=name_offset)
        return Call(name, tuple(args))


def parse_script(source: str) -> Expression:
    """Parse a script into an AST; raises ScriptError with an offset."""
    return _Parser(source).parse()


def referenced_columns(expr: Expression) -> set[str]:
    if isinstance(expr, Ref):
        return {expr.name}
    if isinstance(expr, Neg):
        return referenced_columns(expr.operand)
    if isinstance(expr, BinOp):
        return referenced_columns(expr.left) | referenced_columns(expr.right)
    if isinstance(expr, Call):
        out = set()
        for a in expr.args:
            out |= referenced_columns(a)
        return out
    return set()


def validate_refs(expr: Expression, numeric_columns: set[str]):
    """Check every referenced identifier is a known numerical column."""
    for name in sorted(referenced_columns(expr)):
        if name not in numeric_columns:
            raise ScriptError(f"unknown identifier {name!r}")


# ---------------------------------------------------------------------------
# Pretty-printing (round-trips through parse_script)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def pretty(expr: Expression) -> str:
    return _pretty(expr, 0)


def _pretty(expr: Expression, parent_prec: int) -> str:
    if isinstance(expr, Lit):
        v = expr.value
        text = f"{v:g}"
        return text
    if isinstance(expr, Ref):
        return expr.name
    if isinstance(expr, Neg):
        inner = _pretty(expr.operand, 3)
        return f"-{inner}"
    if isinstance(expr, Call):
        args = ", ".join(_pretty(a, 0) for a in expr.args)
        return f"{expr.func}({args})"
    prec = _PREC[expr.op]
    left = _pretty(expr.left, prec)
    # right side binds one tighter: the grammar is left-associative
    right = _pretty(expr.right, prec + 1)
    text = f"{left} {expr.op} {right}"
    if prec < parent_prec:
        return f"({text})"
    return text


# ---------------------------------------------------------------------------
# Evaluation

@dataclass
class ScriptDiagnostics:
    division_by_zero: int = 0
    invalid_log: int = 0


def evaluate(expr: Expression, columns: dict, n: int,
             diagnostics: Optional[ScriptDiagnostics] = None) -> np.ndarray:
    """Evaluate over whole columns; NaN marks missing. Never raises."""
    if diagnostics is None:
        diagnostics = ScriptDiagnostics()
    return _eval(expr, columns, n, diagnostics)


def _eval(expr, columns, n, diag) -> np.ndarray:
    if isinstance(expr, Lit):
        return np.full(n, expr.value)
    if isinstance(expr, Ref):
        return np.asarray(columns[expr.name], dtype=np.float64)
    if isinstance(expr, Neg):
        return -_eval(expr.operand, columns, n, diag)
    if isinstance(expr, BinOp):
        a = _eval(expr.left, columns, n, diag)
        b = _eval(expr.right, columns, n, diag)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            if expr.op == "+":
                return a + b
            if expr.op == "-":
                return a - b
            if expr.op == "*":
                return a * b
            zero = b == 0
            diag.division_by_zero += int(np.count_nonzero(zero & ~np.isnan(a)))
            out = a / np.where(zero, np.nan, b)
        return out
    args = [_eval(a, columns, n, diag) for a in expr.args]
    if expr.func == "abs":
        return np.abs(args[0])
    if expr.func == "log10":
        x = args[0]
        with np.errstate(invalid="ignore", divide="ignore"):
            bad = x <= 0
            diag.invalid_log += int(np.count_nonzero(bad))
            out = np.log10(np.where(bad, np.nan, x))
        return out
    stack = np.stack(args)
    with np.errstate(invalid="ignore"):
        if expr.func == "min":
            return _nan_reduce(stack, np.fmin)
        if expr.func == "max":
            return _nan_reduce(stack, np.fmax)
        # mean: skip missing arguments, all-missing stays missing
        counts = (~np.isnan(stack)).sum(axis=0)
        sums = np.nansum(stack, axis=0)
        out = np.where(counts > 0, sums / np.where(counts == 0, 1, counts), np.nan)
    return out


def _nan_reduce(stack: np.ndarray, op) -> np.ndarray:
    out = stack[0].copy()
    for i in range(1, stack.shape[0]):
        out = op(out, stack[i])
    return out


def eval_script(expr: Expression, env: dict) -> Optional[float]:
    """Evaluate for a single row; env maps column id -> raw number or None."""
    columns = {k: np.array([math.nan if v is None else float(v)])
               for k, v in env.items()}
    out = evaluate(expr, columns, 1)
    v = float(out[0])
    return None if math.isnan(v) else v
