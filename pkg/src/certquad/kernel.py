"""Peano kernel of the two-point companion rule and its error coefficient.

For ``x`` in ``[a, (a+b)/2]`` the kernel is piecewise linear::

    K(t) = t - a          on [a, x]
    K(t) = t - (a+b)/2    on (x, a+b-x]
    K(t) = t - b          on (a+b-x, b]

and ``I(x) = int_a^b |K(t)| |t - (a+b)/2| dt`` controls the second-derivative
error bound. ``bound_factor`` is ``I(x)/2``: the coefficient ``c`` with
``|int f - S| <= c * sup|f''|`` for the single-interval rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidInterval, OutOfDomain

# how far past the midpoint a computed evaluation point may sit and still be clamped
CLAMP_ULPS = 4


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise InvalidInterval(f"interval endpoints must be finite, got [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise InvalidInterval(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def mid(self) -> float:
        return 0.5 * (self.a + self.b)

    def mirror(self, x: float) -> float:
        """Reflection ``a + b - x``."""
        return self.a + self.b - x


def as_interval(iv) -> Interval:
    if isinstance(iv, Interval):
        return iv
    a, b = iv
    return Interval(float(a), float(b))


def admissible_point(iv: Interval, x: float) -> float:
    """Validate ``x`` in ``[a, (a+b)/2]``, clamping a few-ulp overshoot of the midpoint."""
    mid = iv.mid
    if iv.a <= x <= mid:
        return float(x)
    if mid < x <= mid + CLAMP_ULPS * math.ulp(mid):
        return mid
    raise OutOfDomain(f"evaluation point {x!r} outside [{iv.a!r}, {mid!r}]")


def kernel_value(t: float, iv: Interval, x: float) -> float:
    iv = as_interval(iv)
    x = admissible_point(iv, x)
    if not iv.a <= t <= iv.b:
        raise OutOfDomain(f"t={t!r} outside [{iv.a!r}, {iv.b!r}]")
    if t <= x:
        return t - iv.a
    if t <= iv.mirror(x):
        return t - iv.mid
    return t - iv.b


def kernel_breakpoints(iv: Interval, x: float) -> tuple[float, float]:
    """Points where the kernel jumps; integrate across them piecewise."""
    iv = as_interval(iv)
    x = admissible_point(iv, x)
    return x, iv.mirror(x)


def moment_integral(iv: Interval, x: float) -> float:
    """Closed form of ``int_a^b |K(t)| |t-(a+b)/2| dt``."""
    iv = as_interval(iv)
    x = admissible_point(iv, x)
    a, b = iv.a, iv.b
    return (a + 3 * b - 4 * x) * (x - a) ** 2 / 6 + 2 / 3 * (iv.mid - x) ** 3


def bound_factor(iv: Interval, x: float) -> float:
    """Absolute error coefficient: ``|int_a^b f - S| <= bound_factor * sup|f''|``."""
    iv = as_interval(iv)
    x = admissible_point(iv, x)
    a, b = iv.a, iv.b
    return ((a + 3 * b) / 4 - x) * (x - a) ** 2 / 3 + (iv.mid - x) ** 3 / 3


def optimal_point(iv: Interval) -> float:
    """Minimiser of ``bound_factor`` over the admissible range: ``(3a+b)/4``."""
    iv = as_interval(iv)
    return (3 * iv.a + iv.b) / 4
