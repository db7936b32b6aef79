"""Reference integration, sup-norm estimation and direct checks of the companion inequality.

The reference integrator is adaptive Simpson with Richardson correction. It
shares no code with the quadrature rules so that agreement between the two is
evidence rather than a tautology.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import OracleNoConvergence
from .expr import Expression, derivatives
from .kernel import Interval, admissible_point, as_interval, bound_factor
from .quadrature import ANALYTIC, ESTIMATED, USER_CERTIFIED

ORACLE_RTOL = 1e-13
SUP_GRID = 4097
SUP_SAFETY = 1.001
_MAX_DEPTH = 60
_GOLDEN = (math.sqrt(5) - 1) / 2


# --------------------------------------------------------------------------- oracle


def _simpson_panels(f, a, b, rtol, max_depth):
    # coarse sweep sets the absolute target from the scale of |f|
    n0 = 16
    xs = [a + (b - a) * i / (2 * n0) for i in range(2 * n0)] + [b]
    fs = [f(x) for x in xs]
    scale = (b - a) * max(abs(v) for v in fs)
    eps = rtol * scale if scale > 0 else 0.0
    total = []
    stack = []
    for i in range(n0):
        lo, hi = xs[2 * i], xs[2 * i + 2]
        flo, fm, fhi = fs[2 * i], fs[2 * i + 1], fs[2 * i + 2]
        whole = (hi - lo) / 6 * (flo + 4 * fm + fhi)
        stack.append((lo, hi, flo, fm, fhi, whole, 0))
    stack.reverse()
    width = b - a
    while stack:
        lo, hi, flo, fm, fhi, whole, depth = stack.pop()
        m = (lo + hi) / 2
        lm, rm = (lo + m) / 2, (m + hi) / 2
        flm, frm = f(lm), f(rm)
        left = (m - lo) / 6 * (flo + 4 * flm + fm)
        right = (hi - m) / 6 * (fm + 4 * frm + fhi)
        delta = left + right - whole
        local_eps = eps * (hi - lo) / width
        noise = 64 * 2.2e-16 * (abs(left) + abs(right))
        if abs(delta) <= 15 * local_eps or abs(delta) <= noise:
            total.append(left + right + delta / 15)
            continue
        if depth >= max_depth or not (lo < lm < m < rm < hi):
            raise OracleNoConvergence(
                f"adaptive Simpson failed to converge near t={m!r} (depth {depth})"
            )
        stack.append((m, hi, fm, frm, fhi, right, depth + 1))
        stack.append((lo, m, flo, flm, fm, left, depth + 1))
    return math.fsum(total)


def reference_integral(
    f: Callable[[float], float],
    iv,
    rtol: float = ORACLE_RTOL,
    breakpoints: Iterable[float] = (),
) -> float:
    """Integral of ``f`` over ``iv`` to roughly ``rtol`` relative accuracy.

    ``breakpoints`` split the range where ``f`` has jumps or kinks.
    """
    iv = as_interval(iv)
    cuts = sorted({iv.a, iv.b, *(float(c) for c in breakpoints if iv.a < c < iv.b)})
    return math.fsum(
        _simpson_panels(f, lo, hi, rtol, _MAX_DEPTH) for lo, hi in zip(cuts, cuts[1:]) if hi > lo
    )


# --------------------------------------------------------------------------- sup norms


def _golden_max(g, lo, hi, iters=60):
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if hi - lo <= 1e-15 * max(1.0, abs(lo), abs(hi)):
            break
        if gc > gd:
            hi, d, gd = d, c, gc
            c = hi - _GOLDEN * (hi - lo)
            gc = g(c)
        else:
            lo, c, gc = c, d, gd
            d = lo + _GOLDEN * (hi - lo)
            gd = g(d)
    return max(gc, gd)


def estimate_sup_norm(g: Expression, iv, grid: int = SUP_GRID) -> float:
    """Estimated ``sup |g|`` on ``iv``, inflated by the 1.001 safety factor.

    Samples a uniform grid, then golden-section refines around the three best
    grid cells. The result is an estimate, not a rigorous enclosure.
    """
    iv = as_interval(iv)
    ts = np.linspace(iv.a, iv.b, grid)
    vals = np.abs(g.values(ts))
    best = float(vals.max())
    top = np.argsort(vals, kind="stable")[::-1][:3]
    absg = lambda t: abs(g(t))
    for i in top:
        lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, grid - 1)]
        best = max(best, _golden_max(absg, float(lo), float(hi)))
    return best * SUP_SAFETY


def analytic_sup(g: Expression) -> float | None:
    """Exact ``sup |g|`` when ``g`` simplified to a constant, else ``None``."""
    if g.is_constant:
        return abs(g.root.value)
    return None


def resolve_sup(g: Expression, iv, given: float | None = None) -> tuple[float, str]:
    """Pick a sup-norm and its provenance: caller value, exact constant, or estimate."""
    if given is not None:
        return float(given), USER_CERTIFIED
    exact = analytic_sup(g)
    if exact is not None:
        return exact, ANALYTIC
    return estimate_sup_norm(g, iv), ESTIMATED


# --------------------------------------------------------------------------- inequality checks


@dataclass(frozen=True)
class VerificationReport:
    lhs: float
    rhs: float
    ratio: float
    holds: bool
    f: str
    a: float
    b: float
    x: float
    norm: float = math.nan
    certificate_kind: str = USER_CERTIFIED

    def as_row(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}


CSV_COLUMNS = ("f", "a", "b", "x", "lhs", "rhs", "ratio", "holds")


def inequality_holds(lhs: float, rhs: float) -> bool:
    return lhs <= rhs * (1 + 1e-12) + 1e-15


def make_report(lhs, rhs, *, f, iv, x, norm, kind) -> VerificationReport:
    if rhs == 0:
        ratio = 0.0 if lhs == 0 else math.inf
    else:
        ratio = lhs / rhs
    return VerificationReport(
        lhs=lhs, rhs=rhs, ratio=ratio, holds=inequality_holds(lhs, rhs),
        f=f, a=iv.a, b=iv.b, x=x, norm=norm, certificate_kind=kind,
    )


def verify_inequality(
    f: Expression, iv, x: float, m2: float | None = None, integral: float | None = None
) -> VerificationReport:
    """Evaluate both sides of the averaged companion inequality at ``x``.

    ``m2`` defaults to the exact sup of ``f''`` when it is constant, otherwise
    to the sampled estimate. ``integral`` may be passed to reuse an oracle value.
    """
    iv = as_interval(iv)
    x = admissible_point(iv, x)
    df, ddf = derivatives(f)
    m2, kind = resolve_sup(ddf, iv, m2)
    if integral is None:
        integral = reference_integral(f, iv)
    a, b, h = iv.a, iv.b, iv.width
    xm = iv.mirror(x)
    combo = 0.5 * ((f(x) + f(xm)) / 2 + (f(a) + f(b)) / 2)
    correction = 0.5 * (x - iv.mid) * (df(x) - df(xm)) / 2
    lhs = abs(combo - correction - integral / h)
    rhs = bound_factor(iv, x) * m2 / h
    return make_report(lhs, rhs, f=str(f), iv=iv, x=x, norm=m2, kind=kind)


@dataclass
class ScanResult:
    reports: list[VerificationReport]

    @property
    def max_ratio(self) -> float:
        return max(r.ratio for r in self.reports)

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.reports)

    def per_function(self) -> dict[str, tuple[float, list[float]]]:
        """``f -> (max ratio, x values attaining it to 1e-9 relative)``."""
        out = {}
        for name in dict.fromkeys(r.f for r in self.reports):
            rows = [r for r in self.reports if r.f == name]
            top = max(r.ratio for r in rows)
            xs = [r.x for r in rows if r.ratio >= top * (1 - 1e-9)]
            out[name] = (top, xs)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for r in self.reports:
            writer.writerow(r.as_row())
        return buf.getvalue()

    def to_dicts(self) -> list[dict]:
        return [asdict(r) for r in self.reports]


def x_grid(iv: Interval, size: int) -> list[float]:
    """``size`` equally spaced admissible points from ``a`` to ``(a+b)/2``."""
    if size < 1:
        raise ValueError("grid size must be >= 1")
    if size == 1:
        return [iv.mid]
    return [iv.a + (iv.mid - iv.a) * i / (size - 1) for i in range(size - 1)] + [iv.mid]


def sharpness_scan(
    corpus: Sequence[Expression],
    iv,
    x_grid_size: int,
    m2: Sequence[float | None] | None = None,
) -> ScanResult:
    """Inequality ratios for every function in ``corpus`` at every grid point."""
    if not corpus:
        raise ValueError("corpus must be non-empty")
    iv = as_interval(iv)
    norms = list(m2) if m2 is not None else [None] * len(corpus)
    reports = []
    for f, given in zip(corpus, norms):
        _, ddf = derivatives(f)
        norm, _kind = resolve_sup(ddf, iv, given)
        integral = reference_integral(f, iv)
        for x in x_grid(iv, x_grid_size):
            r = verify_inequality(f, iv, x, m2=norm, integral=integral)
            if given is None:
                r = VerificationReport(**{**asdict(r), "certificate_kind": _kind})
            reports.append(r)
    return ScanResult(reports)
