"""Exit criteria. Each test records one PASS/FAIL line shown in the session summary."""

import math
import random
import time

import numpy as np

from certquad.adaptive import AdaptiveConfig, integrate_adaptive
from certquad.expr import derivatives, parse, to_source
from certquad.kernel import Interval, kernel_breakpoints, kernel_value, moment_integral
from certquad.probability import Distribution, expectation, expectation_interval, verify_prob_inequality
from certquad.quadrature import (
    Partition,
    XiChoice,
    bound_single,
    integrate_composite,
    integrate_uniform,
    perturbed_trapezoid,
    rule_single,
)
from certquad.verify import inequality_holds, reference_integral, verify_inequality, x_grid
from oracles import CORPUS, brute_moment, central_difference

SQ = parse("t^2")
DSQ = SQ.derivative()


def test_ac01_sharp_midpoint_constant(record):
    start = time.perf_counter()
    rng = random.Random(2024)
    cases = [(0.0, 1.0)] + [(a, a + rng.uniform(0.1, 5)) for a in (rng.uniform(-5, 5) for _ in range(10))]
    ratios = []
    for a, b in cases:
        rep = verify_inequality(parse(f"(t-{a!r})^2"), (a, b), (a + b) / 2)
        ratios.append(rep.ratio)
    elapsed = time.perf_counter() - start
    worst = max(abs(r - 1) for r in ratios)
    ok = worst <= 1e-9 and elapsed < 1.0
    record("AC1 sharpness of 1/48", ok, f"max|ratio-1|={worst:.2e} over {len(cases)} intervals, {elapsed:.3f}s")
    assert ok


def test_ac02_optimal_point_constant(record):
    s = rule_single(SQ, DSQ, (0, 1), 0.25)
    err = abs(s - reference_integral(SQ, (0, 1)))
    cert = bound_single((0, 1), 0.25, 2.0)
    ratio = cert / bound_single((0, 1), 0.5, 2.0)
    ok = abs(err - 1 / 96) <= 1e-12 and abs(cert - 1 / 32) <= 1e-15 and abs(ratio - 0.75) <= 1e-15
    record("AC2 optimal-point constant 1/64", ok, f"error={err!r} cert={cert!r} cert/midpoint={ratio!r}")
    assert ok


def test_ac03_perturbed_trapezoid(record):
    trap = perturbed_trapezoid(SQ, DSQ, (0, 1), 2.0)
    err = abs(trap.value - reference_integral(SQ, (0, 1)))
    left = rule_single(SQ, DSQ, (0, 1), 0.0)
    ok = (
        abs(trap.bound - 1 / 12) <= 1e-15
        and abs(bound_single((0, 1), 0.0, 2.0) - 1 / 12) <= 1e-15
        and inequality_holds(err, trap.bound)
        and abs(left - trap.value) <= 1e-15
    )
    record("AC3 perturbed trapezoid 1/24", ok, f"cert={trap.bound!r} error={err!r} |rule(a)-trap|={abs(left - trap.value):.1e}")
    assert ok


def test_ac04_certificate_soundness_sweep(record):
    start = time.perf_counter()
    thetas = (0.0, 0.25, 0.5, 0.75, 1.0)
    checked = violations = 0
    worst = 0.0
    for src, sups in CORPUS.items():
        f = parse(src)
        df = f.derivative()
        for iv, m2 in sups.items():
            oracle = reference_integral(f, iv)
            for n in range(1, 65):
                p = Partition.uniform(iv, n)
                for theta in thetas:
                    r = integrate_composite(f, df, p, XiChoice.fraction(theta), m2)
                    err = abs(r.value - oracle)
                    checked += 1
                    worst = max(worst, err / r.bound)
                    violations += not inequality_holds(err, r.bound)
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 30
    record("AC4 certificate soundness", ok,
           f"{checked} cases, {violations} violations, max error/bound={worst:.12f}, {elapsed:.2f}s")
    assert ok


def test_ac05_convergence_order(record):
    f = parse("exp(t)")
    df = f.derivative()
    ns = [4, 8, 16, 32, 64, 128, 256]
    runs = [integrate_uniform(f, df, (0, 1), n, math.e) for n in ns]
    exact = reference_integral(f, (0, 1))
    errs = [abs(r.value - exact) for r in runs]
    bounds = [r.bound for r in runs]
    s_err = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    s_bound = np.polyfit(np.log(ns), np.log(bounds), 1)[0]
    ok = abs(s_err + 2) <= 0.2 and abs(s_bound + 2) <= 0.2
    record("AC5 convergence order", ok, f"slope(error)={s_err:.4f} slope(certificate)={s_bound:.4f}")
    assert ok


def test_ac06_adaptive_soundness(record):
    f = parse("exp(t)")
    df, ddf = derivatives(f)
    cfg = AdaptiveConfig(tol=1e-8)
    first = integrate_adaptive(f, df, ddf, (0, 1), cfg)
    second = integrate_adaptive(f, df, ddf, (0, 1), cfg)
    err = abs(first.value - (math.e - 1))
    user = integrate_adaptive(f, df, ddf, (0, 1), AdaptiveConfig(tol=1e-8, m2=math.e))
    err_user = abs(user.value - (math.e - 1))
    ok = (
        err <= first.bound <= 1e-8
        and err_user <= user.bound <= 1e-8
        and first.trace == second.trace
        and first.value == second.value
    )
    record("AC6 adaptive soundness", ok,
           f"error={err:.3e} <= bound={first.bound:.3e} ({first.result.n_intervals} intervals), "
           f"user m2: error={err_user:.3e} <= {user.bound:.3e}, deterministic={first.trace == second.trace}")
    assert ok


def test_ac07_kernel_identity(record):
    iv = Interval(0, 1)
    worst = 0.0
    for src in ("sin(t)", "exp(t)", "t^3"):
        g = parse(src)
        dg = g.derivative()
        for x in (0.0, 0.1, 0.25, 0.4, 0.5):
            cuts = sorted({iv.a, *kernel_breakpoints(iv, x), iv.b})
            total = 0.0
            for lo, hi in zip(cuts, cuts[1:]):
                if hi <= lo:
                    continue
                inner = (math.nextafter(lo, hi), math.nextafter(hi, lo))
                total += reference_integral(
                    lambda t: kernel_value(min(max(t, inner[0]), inner[1]), iv, x) * dg(t), (lo, hi)
                )
            rhs = (g(x) + g(iv.mirror(x))) / 2 - reference_integral(g, iv)
            worst = max(worst, abs(total / iv.width - rhs))
    ok = worst <= 1e-9
    record("AC7 kernel identity", ok, f"max residual={worst:.2e} over 15 (g, x) pairs")
    assert ok


def test_ac08_moment_integral_brute_force(record):
    rng = random.Random(8)
    worst = 0.0
    for _ in range(50):
        a = rng.uniform(-10, 10)
        b = a + rng.uniform(0.01, 10)
        x = rng.uniform(a, (a + b) / 2)
        dev = abs(moment_integral(Interval(a, b), x) - brute_moment(a, b, x)) / (b - a) ** 3
        worst = max(worst, dev)
    ok = worst <= 1e-9
    record("AC8 moment integral vs brute force", ok, f"max |closed-brute|/(b-a)^3={worst:.2e} over 50 cases")
    assert ok


def test_ac09_probability(record):
    uniform_lhs = 0.0
    for a, b in ((0.0, 1.0), (2.0, 6.0), (-3.0, -1.0)):
        d = Distribution(parse(repr(1 / (b - a))), Interval(a, b))
        mean = expectation(d)
        for x in x_grid(d.interval, 21):
            uniform_lhs = max(uniform_lhs, verify_prob_inequality(d, x, mean=mean).lhs)

    lin = Distribution(parse("2*t"), Interval(0, 1))
    rep = verify_prob_inequality(lin, 0.25)
    ei = expectation_interval(lin, 0.25)
    grid = x_grid(lin.interval, 101)
    widths = [expectation_interval(lin, x).half_width for x in grid]
    argmin = grid[int(np.argmin(widths))]
    ok = (
        uniform_lhs <= 1e-12
        and abs(rep.lhs - 1 / 96) <= 1e-10
        and abs(rep.rhs - 1 / 32) <= 1e-15
        and ei.contains(2 / 3)
        and argmin == 0.25
    )
    record("AC9 probability bound", ok,
           f"uniform max lhs={uniform_lhs:.1e}; 2t: lhs={rep.lhs!r} rhs={rep.rhs!r} "
           f"E in [{ei.lo!r}, {ei.hi!r}]; width argmin x={argmin}")
    assert ok


def test_ac10_expression_layer(record):
    sources = sorted(CORPUS) + ["t^3", "log(2+t)*cos(t)"]
    rng = random.Random(10)
    worst = 0.0
    for src in sources:
        f = parse(src)
        df, ddf = derivatives(f)
        for _ in range(100):
            t = rng.uniform(-1.5, 3.0)
            for g, dg in ((f, df), (df, ddf)):
                exact = dg(t)
                worst = max(worst, abs(exact - central_difference(g, t)) / (1 + abs(exact)))
    round_trip = all(parse(to_source(parse(s).root)) == parse(s) for s in sources + ["-t^2", "(t-0)^2", "t--2"])
    ok = worst <= 1e-5 and round_trip
    record("AC10 expression layer", ok, f"max relative FD deviation={worst:.2e}, round trip stable={round_trip}")
    assert ok
