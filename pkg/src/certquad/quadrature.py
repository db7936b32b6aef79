"""Companion two-point rule with derivative correction, composite forms, baselines.

Single interval, evaluation point ``x`` in ``[a, (a+b)/2]``, mirror ``x' = a+b-x``::

    S = h/4 [f(a) + f(x) + f(x') + f(b)] - h/4 (x - (a+b)/2) [f'(x) - f'(x')]

with ``|int f - S| <= bound_factor(x) * sup|f''|``. At ``x = (3a+b)/4`` the
coefficient is ``h^3/64``; at the midpoint ``h^3/48``; at ``x = a`` ``h^3/24``.

Every routine takes ``m2`` (an upper bound for ``sup|f''|``) explicitly; nothing
here estimates it behind the caller's back.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidN, InvalidPartition, NegativeNorm, OutOfDomain, XiOutOfRange
from .kernel import CLAMP_ULPS, Interval, admissible_point, as_interval, bound_factor

Fn = Callable[[float], float]

USER_CERTIFIED = "USER_CERTIFIED"
ESTIMATED = "ESTIMATED"
ANALYTIC = "ANALYTIC"


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    bound: float
    evals: int
    rule: str
    certificate_kind: str = USER_CERTIFIED
    n_intervals: int = 1


@dataclass(frozen=True)
class Partition:
    nodes: tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(float(v) for v in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if len(nodes) < 2:
            raise InvalidPartition("a partition needs at least two nodes")
        if not all(math.isfinite(v) for v in nodes):
            raise InvalidPartition("partition nodes must be finite")
        for i in range(len(nodes) - 1):
            if not nodes[i] < nodes[i + 1]:
                raise InvalidPartition(f"nodes not strictly ascending at index {i}")

    @classmethod
    def uniform(cls, iv, n: int) -> Partition:
        iv = as_interval(iv)
        if not isinstance(n, int) or n < 1:
            raise InvalidN(f"n must be a positive integer, got {n!r}")
        nodes = [iv.a + iv.width * i / n for i in range(n)] + [iv.b]
        return cls(tuple(nodes))

    @property
    def n(self) -> int:
        return len(self.nodes) - 1

    @property
    def widths(self) -> list[float]:
        return [self.nodes[i + 1] - self.nodes[i] for i in range(self.n)]

    @property
    def mesh(self) -> float:
        """Largest width. Diagnostic only; the remainder bound does not use it."""
        return max(self.widths)

    def intervals(self):
        for i in range(self.n):
            yield Interval(self.nodes[i], self.nodes[i + 1])


@dataclass(frozen=True)
class XiChoice:
    """Evaluation points per subinterval.

    ``kind`` is ``"optimal"`` ((3x_i+x_{i+1})/4), ``"midpoint"``, ``"left"`` (x_i),
    ``"fraction"`` (x_i + theta*h_i/2, 0 <= theta <= 1) or ``"explicit"``.
    """

    kind: str
    theta: float | None = None
    points: tuple[float, ...] | None = None

    @classmethod
    def fraction(cls, theta: float) -> XiChoice:
        if not 0.0 <= theta <= 1.0:
            raise OutOfDomain(f"theta must lie in [0, 1], got {theta!r}")
        return cls("fraction", theta=float(theta))

    @classmethod
    def explicit(cls, points: Sequence[float]) -> XiChoice:
        return cls("explicit", points=tuple(float(p) for p in points))

    @classmethod
    def from_name(cls, name: str) -> XiChoice:
        choices = {"optimal": OPTIMAL, "midpoint": MIDPOINT, "left": LEFT}
        try:
            return choices[name.lower()]
        except KeyError:
            raise ValueError(f"unknown xi choice {name!r}; expected one of {sorted(choices)}") from None

    def point_pair(self, lo: float, hi: float, index: int = 0) -> tuple[float, float]:
        """``(xi, mirror)`` on ``[lo, hi]``; the symbolic kinds avoid computing ``lo+hi-xi``."""
        if self.kind == "optimal":
            return (3 * lo + hi) / 4, (lo + 3 * hi) / 4
        if self.kind == "midpoint":
            m = (lo + hi) / 2
            return m, m
        if self.kind == "left":
            return lo, hi
        if self.kind == "fraction":
            xi = lo + self.theta * (hi - lo) / 2
        elif self.kind == "explicit":
            if self.points is None or index >= len(self.points):
                raise XiOutOfRange(index, None, lo, hi, "missing")
            xi = self.points[index]
        else:
            raise ValueError(f"unknown xi kind {self.kind!r}")
        return _check_xi(index, xi, lo, hi), lo + hi - xi

    def pairs(self, p: Partition) -> list[tuple[float, float]]:
        if self.kind == "explicit" and len(self.points) != p.n:
            raise ValueError(f"{len(self.points)} explicit points for {p.n} subintervals")
        return [self.point_pair(p.nodes[i], p.nodes[i + 1], i) for i in range(p.n)]


OPTIMAL = XiChoice("optimal")
MIDPOINT = XiChoice("midpoint")
LEFT = XiChoice("left")


def _check_xi(index, xi, lo, hi):
    mid = (lo + hi) / 2
    if xi < lo:
        raise XiOutOfRange(index, xi, lo, mid, "lower")
    if xi > mid:
        if xi <= mid + CLAMP_ULPS * math.ulp(mid):
            return mid
        raise XiOutOfRange(index, xi, lo, mid, "upper")
    return xi


def _check_m2(m2):
    if m2 < 0 or math.isnan(m2):
        raise NegativeNorm(f"derivative sup-norm must be >= 0, got {m2!r}")


def _rule(f: Fn, df: Fn, a: float, b: float, x: float, xm: float) -> float:
    h = b - a
    mid = (a + b) / 2
    return h / 4 * (f(a) + f(x) + f(xm) + f(b)) - h / 4 * (x - mid) * (df(x) - df(xm))


def _factor(kind: str, lo: float, hi: float, xi: float) -> float:
    if kind == "optimal":
        return (hi - lo) ** 3 / 64
    return bound_factor(Interval(lo, hi), xi)


def rule_single(f: Fn, df: Fn, iv, x: float) -> float:
    """Companion rule value on one interval at evaluation point ``x``."""
    iv = as_interval(iv)
    x = admissible_point(iv, x)
    return _rule(f, df, iv.a, iv.b, x, iv.mirror(x))


def bound_single(iv, x: float, m2: float) -> float:
    _check_m2(m2)
    return bound_factor(as_interval(iv), x) * m2


def integrate_composite(f: Fn, df: Fn, p: Partition, xi: XiChoice, m2: float) -> QuadratureResult:
    """Composite rule over ``p`` with a certified remainder bound.

    Values and bounds are summed with ``math.fsum`` so the result does not
    depend on accumulation order.
    """
    _check_m2(m2)
    values, factors = [], []
    for i, (x, xm) in enumerate(xi.pairs(p)):
        lo, hi = p.nodes[i], p.nodes[i + 1]
        values.append(_rule(f, df, lo, hi, x, xm))
        factors.append(_factor(xi.kind, lo, hi, x))
    return QuadratureResult(
        value=math.fsum(values),
        bound=math.fsum(factors) * m2,
        evals=6 * p.n,
        rule=f"companion[{xi.kind}]",
        n_intervals=p.n,
    )


def integrate_uniform(f: Fn, df: Fn, iv, n: int, m2: float) -> QuadratureResult:
    """Uniform ``n``-panel composite rule at the optimal points; bound ``m2 n h^3 / 64``."""
    return integrate_composite(f, df, Partition.uniform(iv, n), OPTIMAL, m2)


def baseline_midpoint(f: Fn, df: Fn, iv, x: float, m2: float) -> QuadratureResult:
    """One-point rule with derivative correction, any ``x`` in ``[a, b]``.

    Integral form: ``h {[f(x) + (f(a)+f(b))/2]/2 - (x-(a+b)/2) f'(x)/2}``, bound
    ``[1/48 + |x-(a+b)/2|^3 / (3h^3)] h^3 m2``.
    """
    iv = as_interval(iv)
    _check_m2(m2)
    if not iv.a <= x <= iv.b:
        raise OutOfDomain(f"x={x!r} outside [{iv.a!r}, {iv.b!r}]")
    a, b, h = iv.a, iv.b, iv.width
    value = h * (0.5 * (f(x) + (f(a) + f(b)) / 2) - 0.5 * (x - iv.mid) * df(x))
    bound = (h**3 / 48 + abs(x - iv.mid) ** 3 / 3) * m2
    return QuadratureResult(value, bound, evals=4, rule="midpoint-baseline")


def perturbed_trapezoid(f: Fn, df: Fn, iv, m2: float) -> QuadratureResult:
    """Trapezoid plus endpoint-derivative correction; bound ``h^3 m2 / 24``."""
    iv = as_interval(iv)
    _check_m2(m2)
    a, b, h = iv.a, iv.b, iv.width
    value = h * (f(a) + f(b)) / 2 - h * h / 8 * (df(b) - df(a))
    return QuadratureResult(value, h**3 / 24 * m2, evals=4, rule="perturbed-trapezoid")


def composite_baseline(
    single: Callable[..., QuadratureResult], f: Fn, df: Fn, p: Partition, m2: float
) -> QuadratureResult:
    """Sum a single-interval baseline over ``p`` (midpoint baseline at each panel midpoint)."""
    parts = []
    for iv in p.intervals():
        if single is baseline_midpoint:
            parts.append(baseline_midpoint(f, df, iv, iv.mid, m2))
        else:
            parts.append(single(f, df, iv, m2))
    return QuadratureResult(
        value=math.fsum(r.value for r in parts),
        bound=math.fsum(r.bound for r in parts),
        evals=sum(r.evals for r in parts),
        rule=parts[0].rule,
        n_intervals=p.n,
    )
