"""Expressions in one variable ``t``: parsing, printing, evaluation, differentiation.

Grammar (``^`` binds tighter than unary minus, so ``-t^2`` is ``-(t^2)``)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | base ('^' ['-'|'+'] number)?
    base   := number | 't' | func '(' expr ')' | '(' expr ')'
    func   := sin | cos | exp | log | abs

Expressions are immutable; the compiled evaluators are built once and shared.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError, ExprSyntaxError, NonDifferentiable, UnknownIdentifier

FUNCTIONS = ("sin", "cos", "exp", "log", "abs")


# --------------------------------------------------------------------------- nodes


class Node:
    __slots__ = ()


@dataclass(frozen=True)
class Const(Node):
    value: float


@dataclass(frozen=True)
class Var(Node):
    pass


@dataclass(frozen=True)
class Neg(Node):
    arg: Node


@dataclass(frozen=True)
class Add(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Sub(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Mul(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Div(Node):
    left: Node
    right: Node


@dataclass(frozen=True)
class Pow(Node):
    base: Node
    exponent: float


@dataclass(frozen=True)
class Func(Node):
    name: str
    arg: Node


T = Var()
ZERO = Const(0.0)
ONE = Const(1.0)


# --------------------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str):
    tokens = []
    raw = source.encode("utf-8")
    pos = 0
    while pos < len(source):
        if source[pos:].strip() == "":
            break
        m = _TOKEN.match(source, pos)
        if m is None:
            offset = len(source[:pos].encode("utf-8"))
            offset += len(source[pos:]) - len(source[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {source[pos:].lstrip()[:1]!r}", offset)
        kind = m.lastgroup
        start = len(source[: m.start(kind)].encode("utf-8"))
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, source):
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, off = self.take()
        if text != value or kind == "end":
            raise ExprSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", off)

    def parse(self):
        node = self.expr()
        kind, text, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {text!r}", off)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.factor()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def factor(self):
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.take()
            inner = self.factor()
            if isinstance(inner, Const):
                return Const(-inner.value)
            return Neg(inner)
        node = self.base()
        if self.peek()[1] == "^":
            self.take()
            sign = 1.0
            if self.peek()[1] in ("-", "+") and self.peek()[0] == "op":
                sign = -1.0 if self.take()[1] == "-" else 1.0
            kind, text, off = self.take()
            if kind != "num":
                raise ExprSyntaxError("exponent must be a number", off)
            node = Pow(node, sign * float(text))
        return node

    def base(self):
        kind, text, off = self.take()
        if kind == "num":
            value = float(text)
            if not math.isfinite(value):
                raise ExprSyntaxError(f"non-finite literal {text!r}", off)
            return Const(value)
        if kind == "name":
            if text == "t":
                return T
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            raise UnknownIdentifier(f"unknown identifier {text!r}", off)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", off)


# --------------------------------------------------------------------------- printing

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}


def _fmt_number(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_source(node: Node) -> str:
    """Canonical text for ``node``; ``parse(to_source(n))`` rebuilds ``n``."""
    if isinstance(node, Const):
        s = _fmt_number(node.value)
        return f"({s})" if node.value < 0 or s.startswith("-") else s
    if isinstance(node, Var):
        return "t"
    if isinstance(node, Func):
        return f"{node.name}({to_source(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.arg, 3, strict=False)
    if isinstance(node, Pow):
        exp = _fmt_number(node.exponent)
        return f"{_wrap(node.base, 5, strict=False)}^{exp}"
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(node)]
    p = _PREC[type(node)]
    # left-associative: right operand at equal precedence needs parentheses
    return f"{_wrap(node.left, p, strict=False)}{op}{_wrap(node.right, p, strict=True)}"


def _wrap(node, prec, strict):
    inner = to_source(node)
    p = _PREC.get(type(node), 9)
    if isinstance(node, Const) and node.value < 0:
        return inner  # already parenthesised
    if p < prec or (strict and p == prec):
        return f"({inner})"
    return inner


# --------------------------------------------------------------------------- simplification


def _fold(fn, *args):
    try:
        v = fn(*args)
    except (ValueError, ZeroDivisionError, OverflowError):
        return None
    if isinstance(v, complex) or not math.isfinite(v):
        return None
    return Const(float(v))


def _const(n, value=None):
    return isinstance(n, Const) and (value is None or n.value == value)


def simplify(node: Node) -> Node:
    """Syntactic simplification: constant folding and 0/1 elimination only."""
    if isinstance(node, (Const, Var)):
        return node
    if isinstance(node, Neg):
        a = simplify(node.arg)
        if isinstance(a, Const):
            return Const(-a.value)
        if isinstance(a, Neg):
            return a.arg
        return Neg(a)
    if isinstance(node, Func):
        a = simplify(node.arg)
        if isinstance(a, Const):
            folded = _fold(_SCALAR_FUNCS[node.name], a.value)
            if folded is not None:
                return folded
        return Func(node.name, a)
    if isinstance(node, Pow):
        b = simplify(node.base)
        if node.exponent == 0:
            return ONE
        if node.exponent == 1:
            return b
        if isinstance(b, Const):
            folded = _fold(_safe_pow, b.value, node.exponent)
            if folded is not None:
                return folded
        return Pow(b, node.exponent)

    l, r = simplify(node.left), simplify(node.right)
    if isinstance(l, Const) and isinstance(r, Const):
        folded = _fold(_BINOPS[type(node)], l.value, r.value)
        if folded is not None:
            return folded
    if isinstance(node, Add):
        if _const(l, 0.0):
            return r
        if _const(r, 0.0):
            return l
        if isinstance(r, Neg):
            return Sub(l, r.arg)
        return Add(l, r)
    if isinstance(node, Sub):
        if _const(r, 0.0):
            return l
        if _const(l, 0.0):
            return simplify(Neg(r))
        return Sub(l, r)
    if isinstance(node, Mul):
        if _const(l, 0.0) or _const(r, 0.0):
            return ZERO
        if _const(l, 1.0):
            return r
        if _const(r, 1.0):
            return l
        if _const(l, -1.0):
            return simplify(Neg(r))
        if _const(r, -1.0):
            return simplify(Neg(l))
        if isinstance(l, Neg):
            return simplify(Neg(Mul(l.arg, r)))
        if isinstance(r, Neg):
            return simplify(Neg(Mul(l, r.arg)))
        return Mul(l, r)
    if isinstance(node, Div):
        if _const(l, 0.0) and not _const(r, 0.0):
            return ZERO
        if _const(r, 1.0):
            return l
        return Div(l, r)
    raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------- differentiation


def _derive(node: Node) -> Node:
    if isinstance(node, Const):
        return ZERO
    if isinstance(node, Var):
        return ONE
    if isinstance(node, Neg):
        return Neg(_derive(node.arg))
    if isinstance(node, Add):
        return Add(_derive(node.left), _derive(node.right))
    if isinstance(node, Sub):
        return Sub(_derive(node.left), _derive(node.right))
    if isinstance(node, Mul):
        u, v = node.left, node.right
        return Add(Mul(_derive(u), v), Mul(u, _derive(v)))
    if isinstance(node, Div):
        u, v = node.left, node.right
        return Div(Sub(Mul(_derive(u), v), Mul(u, _derive(v))), Pow(v, 2.0))
    if isinstance(node, Pow):
        p = node.exponent
        return Mul(Mul(Const(p), Pow(node.base, p - 1.0)), _derive(node.base))
    if isinstance(node, Func):
        u = node.arg
        du = _derive(u)
        if node.name == "sin":
            return Mul(Func("cos", u), du)
        if node.name == "cos":
            return Mul(Neg(Func("sin", u)), du)
        if node.name == "exp":
            return Mul(Func("exp", u), du)
        if node.name == "log":
            return Div(du, u)
        raise NonDifferentiable(f"{node.name}() is not differentiable; supply derivative bounds manually")
    raise TypeError(f"unknown node {node!r}")


# --------------------------------------------------------------------------- evaluation


def _safe_pow(x, p):
    if x == 0.0 and p < 0:
        raise DomainError("0 raised to a negative power")
    if x < 0.0 and not float(p).is_integer():
        raise DomainError(f"negative base {x!r} with non-integer exponent {p!r}")
    return math.pow(x, p)


def _safe_log(x):
    if x <= 0.0:
        raise DomainError(f"log of non-positive value {x!r}")
    return math.log(x)


_SCALAR_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp, "log": _safe_log, "abs": abs}


def _safe_div(x, y):
    if y == 0.0:
        raise DomainError("division by zero")
    return x / y


_BINOPS = {
    Add: lambda x, y: x + y,
    Sub: lambda x, y: x - y,
    Mul: lambda x, y: x * y,
    Div: _safe_div,
}


def _compile_scalar(node):
    if isinstance(node, Const):
        v = node.value
        return lambda t: v
    if isinstance(node, Var):
        return lambda t: t
    if isinstance(node, Neg):
        a = _compile_scalar(node.arg)
        return lambda t: -a(t)
    if isinstance(node, Func):
        a, fn = _compile_scalar(node.arg), _SCALAR_FUNCS[node.name]
        return lambda t: fn(a(t))
    if isinstance(node, Pow):
        b, p = _compile_scalar(node.base), node.exponent
        if p == 2.0:
            def square(t):
                v = b(t)
                return v * v
            return square
        return lambda t: _safe_pow(b(t), p)
    l, r = _compile_scalar(node.left), _compile_scalar(node.right)
    if isinstance(node, Add):
        return lambda t: l(t) + r(t)
    if isinstance(node, Sub):
        return lambda t: l(t) - r(t)
    if isinstance(node, Mul):
        return lambda t: l(t) * r(t)
    return lambda t: _safe_div(l(t), r(t))


def _np_pow(x, p):
    if p < 0 and np.any(x == 0.0):
        raise DomainError("0 raised to a negative power")
    if not float(p).is_integer() and np.any(x < 0.0):
        raise DomainError(f"negative base with non-integer exponent {p!r}")
    return np.power(x, p)


def _np_log(x):
    if np.any(x <= 0.0):
        raise DomainError("log of non-positive value")
    return np.log(x)


def _np_div(x, y):
    if np.any(y == 0.0):
        raise DomainError("division by zero")
    return x / y


_ARRAY_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": _np_log, "abs": np.abs}


def _compile_array(node):
    if isinstance(node, Const):
        v = node.value
        return lambda t: np.full_like(t, v)
    if isinstance(node, Var):
        return lambda t: t
    if isinstance(node, Neg):
        a = _compile_array(node.arg)
        return lambda t: -a(t)
    if isinstance(node, Func):
        a, fn = _compile_array(node.arg), _ARRAY_FUNCS[node.name]
        return lambda t: fn(a(t))
    if isinstance(node, Pow):
        b, p = _compile_array(node.base), node.exponent
        return lambda t: _np_pow(b(t), p)
    l, r = _compile_array(node.left), _compile_array(node.right)
    if isinstance(node, Add):
        return lambda t: l(t) + r(t)
    if isinstance(node, Sub):
        return lambda t: l(t) - r(t)
    if isinstance(node, Mul):
        return lambda t: l(t) * r(t)
    return lambda t: _np_div(l(t), r(t))


# --------------------------------------------------------------------------- public API


@dataclass(frozen=True)
class Expression:
    """A parsed function of ``t``. Call it like a function of one float."""

    root: Node
    _scalar: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_scalar", _compile_scalar(self.root))

    def __call__(self, t: float) -> float:
        try:
            v = self._scalar(float(t))
        except OverflowError as exc:
            raise DomainError(f"overflow evaluating {self} at t={t!r}") from exc
        if not math.isfinite(v):
            raise DomainError(f"non-finite value evaluating {self} at t={t!r}")
        return v

    def values(self, ts) -> np.ndarray:
        """Vectorised evaluation over an array of points."""
        ts = np.asarray(ts, dtype=float)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            v = self._array(ts)
        if not np.all(np.isfinite(v)):
            raise DomainError(f"non-finite value evaluating {self} on the sample")
        return v

    @cached_property
    def _array(self):
        return _compile_array(self.root)

    def derivative(self) -> Expression:
        return differentiate(self)

    @property
    def is_constant(self) -> bool:
        return isinstance(self.root, Const)

    def __str__(self):
        return to_source(self.root)


def parse(source: str) -> Expression:
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    return Expression(_Parser(source).parse())


def evaluate(e: Expression, t: float) -> float:
    return e(t)


def differentiate(e: Expression) -> Expression:
    return Expression(simplify(_derive(e.root)))


def derivatives(e: Expression) -> tuple[Expression, Expression]:
    """Return ``(f', f'')``."""
    d1 = differentiate(e)
    return d1, differentiate(d1)
