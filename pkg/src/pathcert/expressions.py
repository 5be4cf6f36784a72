"""Small expression language for scalar fields.

Grammar (recursive descent):

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := atom ('^' factor)?
    atom    := number | variable | call | '(' expr ')'
    call    := ('abs' | 'norm') '(' args ')'

Variables are x1, x2, ... indexing coordinates; norm(x) is the
Euclidean norm of the whole point.  '^' is right associative and binds
tighter than unary minus, so -x1^2 is -(x1^2).  Division by zero and
invalid powers evaluate to nan rather than raising.
"""

from __future__ import annotations

import math
import re
from typing import Callable

import numpy as np

from .errors import ExpressionError

_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
    r"|(?P<ws>\s+)"
)

Evaluator = Callable[[np.ndarray], float]


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ExpressionError(f"unexpected character {text[pos]!r}", pos)
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.index = 0
        self.max_var = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ExpressionError("unexpected end of expression", len(self.text))
        self.index += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.peek()
        if tok is None or tok[0] != "op" or tok[1] != op:
            pos = tok[2] if tok else len(self.text)
            raise ExpressionError(f"expected {op!r}", pos)
        self.index += 1

    def parse(self) -> Evaluator:
        result = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ExpressionError(f"unexpected {tok[1]!r}", tok[2])
        return result

    def expr(self) -> Evaluator:
        left = self.term()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] not in "+-":
                return left
            self.index += 1
            right = self.term()
            if tok[1] == "+":
                left = _binary(left, right, lambda a, b: a + b)
            else:
                left = _binary(left, right, lambda a, b: a - b)

    def term(self) -> Evaluator:
        left = self.factor()
        while True:
            tok = self.peek()
            if tok is None or tok[0] != "op" or tok[1] not in "*/":
                return left
            self.index += 1
            right = self.factor()
            if tok[1] == "*":
                left = _binary(left, right, lambda a, b: a * b)
            else:
                left = _binary(left, right, _safe_div)

    def factor(self) -> Evaluator:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "-":
            self.index += 1
            inner = self.factor()
            return lambda x: -inner(x)
        return self.power()

    def power(self) -> Evaluator:
        base = self.atom()
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == "^":
            self.index += 1
            exponent = self.factor()
            return _binary(base, exponent, _safe_pow)
        return base

    def atom(self) -> Evaluator:
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            const = float(value)
            return lambda x: const
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "name":
            if value in ("abs", "norm"):
                self.expect_op("(")
                if value == "norm":
                    arg = self.peek()
                    if arg is not None and arg[0] == "name" and arg[1] == "x":
                        self.index += 1
                        self.expect_op(")")
                        return lambda x: float(np.linalg.norm(x))
                    raise ExpressionError("norm takes the whole point: norm(x)",
                                          arg[2] if arg else len(self.text))
                inner = self.expr()
                self.expect_op(")")
                return lambda x, f=inner: abs(f(x))
            m = re.fullmatch(r"x(\d+)", value)
            if m:
                idx = int(m.group(1))
                if idx < 1:
                    raise ExpressionError("variables are numbered from x1", pos)
                self.max_var = max(self.max_var, idx)
                return lambda x, i=idx - 1: float(x[i])
            raise ExpressionError(f"unknown name {value!r}", pos)
        raise ExpressionError(f"unexpected {value!r}", pos)


def _binary(left: Evaluator, right: Evaluator, op) -> Evaluator:
    return lambda x: op(left(x), right(x))


def _safe_div(a: float, b: float) -> float:
    if b == 0.0:
        return math.nan
    return a / b


def _safe_pow(a: float, b: float) -> float:
    try:
        result = a ** b
    except (ValueError, OverflowError, ZeroDivisionError):
        return math.nan
    if isinstance(result, complex):
        return math.nan
    return float(result)


def parse_expression(text: str) -> tuple[Evaluator, int]:
    """Parse a field expression; returns (evaluator, max variable index)."""
    if not text.strip():
        raise ExpressionError("empty expression", 0)
    parser = _Parser(text)
    evaluator = parser.parse()
    return evaluator, max(parser.max_var, 1)
