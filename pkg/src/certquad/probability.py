"""Expectation bounds for densities on a finite interval with bounded derivative.

Applying the companion inequality to the CDF ``F`` (so ``F' = f`` and
``F'' = f'``) and using ``E(X) = b - int_a^b F`` gives, for ``x`` in
``[a, (a+b)/2]``::

    | [ (F(x)+F(a+b-x))/2 + 1/2 ]/2 - (x-(a+b)/2)(f(x)-f(a+b-x))/4 - (b-E)/(b-a) |
        <= bound_factor(x) * sup|f'| / (b-a)

which rearranges into an enclosure for ``E(X)`` that needs no integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NormalizationError
from .expr import Expression, differentiate, parse
from .kernel import Interval, admissible_point, as_interval, bound_factor
from .verify import VerificationReport, make_report, reference_integral, resolve_sup

NORMALIZATION_TOL = 1e-9
_POSITIVITY_GRID = 1001


@dataclass(frozen=True)
class Distribution:
    """Density ``pdf`` on ``[a, b]``; ``cdf=None`` means F is computed by the oracle.

    ``m1`` bounds ``sup|pdf'|``; when omitted it is taken exactly for constant
    derivatives and estimated otherwise (see ``m1_kind``).
    """

    pdf: Expression
    interval: Interval
    cdf: Expression | None = None
    m1: float | None = None
    m1_kind: str = field(init=False)

    def __post_init__(self):
        iv = as_interval(self.interval)
        object.__setattr__(self, "interval", iv)
        ts = np.linspace(iv.a, iv.b, _POSITIVITY_GRID)
        if np.any(self.pdf.values(ts) < 0):
            raise NormalizationError(f"density {self.pdf} is negative somewhere on [{iv.a}, {iv.b}]")
        if self.cdf is not None:
            lo, hi = self.cdf(iv.a), self.cdf(iv.b)
            if abs(lo) > NORMALIZATION_TOL or abs(hi - 1) > NORMALIZATION_TOL:
                raise NormalizationError(f"cdf gives F(a)={lo!r}, F(b)={hi!r}; need 0 and 1")
        else:
            mass = reference_integral(self.pdf, iv)
            if abs(mass - 1) > NORMALIZATION_TOL:
                raise NormalizationError(f"density integrates to {mass!r}, not 1")
        m1, kind = resolve_sup(differentiate(self.pdf), iv, self.m1)
        object.__setattr__(self, "m1", m1)
        object.__setattr__(self, "m1_kind", kind)

    def F(self, x: float) -> float:
        iv = self.interval
        if self.cdf is not None:
            return self.cdf(x)
        if x <= iv.a:
            return 0.0
        return reference_integral(self.pdf, (iv.a, min(x, iv.b)))


def expectation(d: Distribution) -> float:
    """``E(X) = b - int_a^b F``.

    With an oracle CDF this equals ``int t f(t) dt`` by parts, which avoids a
    nested integration.
    """
    iv = d.interval
    if d.cdf is not None:
        return iv.b - reference_integral(d.cdf, iv)
    return reference_integral(lambda t: t * d.pdf(t), iv)


def _cdf_combination(d: Distribution, x: float) -> float:
    iv = d.interval
    xm = iv.mirror(x)
    avg = 0.5 * ((d.F(x) + d.F(xm)) / 2 + 0.5)
    return avg - 0.5 * (x - iv.mid) * (d.pdf(x) - d.pdf(xm)) / 2


def verify_prob_inequality(d: Distribution, x: float, mean: float | None = None) -> VerificationReport:
    iv = d.interval
    x = admissible_point(iv, x)
    if mean is None:
        mean = expectation(d)
    lhs = abs(_cdf_combination(d, x) - (iv.b - mean) / iv.width)
    rhs = bound_factor(iv, x) * d.m1 / iv.width
    return make_report(lhs, rhs, f=str(d.pdf), iv=iv, x=x, norm=d.m1, kind=d.m1_kind)


@dataclass(frozen=True)
class ExpectationInterval:
    center: float
    half_width: float
    x: float

    @property
    def lo(self) -> float:
        return self.center - self.half_width

    @property
    def hi(self) -> float:
        return self.center + self.half_width

    def contains(self, value: float, rtol: float = 1e-12) -> bool:
        slack = rtol * max(1.0, abs(value))
        return self.lo - slack <= value <= self.hi + slack


def expectation_interval(d: Distribution, x: float) -> ExpectationInterval:
    """Enclosure of ``E(X)`` from ``F`` and ``f`` at ``x`` and ``a+b-x`` alone."""
    iv = d.interval
    x = admissible_point(iv, x)
    center = iv.b - iv.width * _cdf_combination(d, x)
    return ExpectationInterval(center, bound_factor(iv, x) * d.m1, x)


def normalized_source(body: str, iv) -> str:
    """Source text ``c*(body)`` with ``c`` chosen so the density integrates to one."""
    iv = as_interval(iv)
    mass = reference_integral(parse(body), iv)
    if not mass > 0 or not math.isfinite(mass):
        raise NormalizationError(f"{body!r} has non-positive mass on [{iv.a}, {iv.b}]")
    return f"{1.0 / mass!r}*({body})"
