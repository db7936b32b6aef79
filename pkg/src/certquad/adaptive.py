"""Certificate-driven adaptive integration by greedy bisection.

Each subinterval carries its own a-priori bound ``bound_factor * m2``. The
interval with the largest bound is bisected (leftmost wins ties) until the
summed bound is at most ``tol``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .errors import BudgetExceeded, ToleranceNotMet
from .expr import Expression
from .kernel import Interval, as_interval
from .quadrature import ESTIMATED, OPTIMAL, USER_CERTIFIED, QuadratureResult, XiChoice, _factor, _rule
from .verify import estimate_sup_norm

GLOBAL = "GLOBAL"
LOCAL = "LOCAL"

# grid for per-subinterval sup estimates in LOCAL mode
LOCAL_SUP_GRID = 257


@dataclass(frozen=True)
class AdaptiveConfig:
    tol: float
    max_intervals: int = 1_000_000
    xi: XiChoice = OPTIMAL
    m2_mode: str = GLOBAL
    m2: float | None = None  # user-certified global sup|f''|; overrides m2_mode

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol!r}")
        if self.max_intervals < 1:
            raise ValueError("max_intervals must be >= 1")
        if self.m2_mode not in (GLOBAL, LOCAL):
            raise ValueError(f"m2_mode must be GLOBAL or LOCAL, got {self.m2_mode!r}")
        if self.xi.kind == "explicit":
            raise ValueError("adaptive refinement needs a rule-based xi choice, not explicit points")


@dataclass(frozen=True)
class TraceEntry:
    a: float
    b: float
    xi: float
    bound: float
    value: float


@dataclass
class AdaptiveResult:
    result: QuadratureResult
    trace: list[TraceEntry]
    history: list[float] = field(default_factory=list)  # summed bound after each step

    @property
    def value(self) -> float:
        return self.result.value

    @property
    def bound(self) -> float:
        return self.result.bound


def _neumaier_add(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


def integrate_adaptive(
    f: Expression, df: Expression, ddf: Expression, iv, cfg: AdaptiveConfig
) -> AdaptiveResult:
    iv = as_interval(iv)
    if cfg.m2 is not None:
        global_m2, kind = float(cfg.m2), USER_CERTIFIED
    elif cfg.m2_mode == GLOBAL:
        global_m2, kind = estimate_sup_norm(ddf, iv), ESTIMATED
    else:
        global_m2, kind = None, ESTIMATED

    evals = 0

    def certify(lo, hi):
        nonlocal evals
        x, xm = cfg.xi.point_pair(lo, hi)
        value = _rule(f, df, lo, hi, x, xm)
        evals += 6
        m2 = global_m2 if global_m2 is not None else estimate_sup_norm(ddf, Interval(lo, hi), LOCAL_SUP_GRID)
        return TraceEntry(lo, hi, x, _factor(cfg.xi.kind, lo, hi, x) * m2, value)

    root = certify(iv.a, iv.b)
    heap = [(-root.bound, root.a, root)]
    running, comp = root.bound, 0.0
    history = [root.bound]

    def finish():
        entries = sorted((e for _, _, e in heap), key=lambda e: e.a)
        res = QuadratureResult(
            value=math.fsum(e.value for e in entries),
            bound=math.fsum(e.bound for e in entries),
            evals=evals,
            rule=f"adaptive-companion[{cfg.xi.kind}]",
            certificate_kind=kind,
            n_intervals=len(entries),
        )
        return AdaptiveResult(res, entries, history)

    while True:
        if running + comp <= cfg.tol:
            out = finish()
            if out.bound <= cfg.tol:
                return out
            running, comp = out.bound, 0.0  # drift in the running sum; resync and continue
            if running <= cfg.tol:
                return out
        if len(heap) >= cfg.max_intervals:
            out = finish()
            raise BudgetExceeded(
                f"max_intervals={cfg.max_intervals} reached with bound {out.bound:.3e} > tol {cfg.tol:.3e}",
                out,
            )
        _, _, worst = heapq.heappop(heap)
        mid = (worst.a + worst.b) / 2
        if not worst.a < mid < worst.b:
            heapq.heappush(heap, (-worst.bound, worst.a, worst))
            out = finish()
            raise ToleranceNotMet(
                f"cannot bisect [{worst.a!r}, {worst.b!r}] further; bound {out.bound:.3e}", out
            )
        left, right = certify(worst.a, mid), certify(mid, worst.b)
        heapq.heappush(heap, (-left.bound, left.a, left))
        heapq.heappush(heap, (-right.bound, right.a, right))
        running, comp = _neumaier_add(running, comp, -worst.bound)
        running, comp = _neumaier_add(running, comp, left.bound)
        running, comp = _neumaier_add(running, comp, right.bound)
        history.append(running + comp)
