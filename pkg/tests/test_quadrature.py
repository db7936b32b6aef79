import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from certquad.errors import InvalidN, InvalidPartition, NegativeNorm, OutOfDomain, XiOutOfRange
from certquad.expr import parse
from certquad.kernel import Interval
from certquad.quadrature import (
    LEFT,
    MIDPOINT,
    OPTIMAL,
    Partition,
    XiChoice,
    baseline_midpoint,
    bound_single,
    composite_baseline,
    integrate_composite,
    integrate_uniform,
    perturbed_trapezoid,
    rule_single,
)
from certquad.verify import inequality_holds, reference_integral
from oracles import CORPUS, exact_integral

SQ = parse("t^2")
DSQ = SQ.derivative()


def fd(src):
    f = parse(src)
    return f, f.derivative()


# ------------------------------------------------------------------ single interval


def test_rule_single_linear_exact():
    f, df = fd("t")
    for x in (0.0, 0.1, 0.25, 0.5):
        assert rule_single(f, df, (0, 1), x) == 0.5


def test_rule_single_square_midpoint_is_sharp():
    s = rule_single(SQ, DSQ, (0, 1), 0.5)
    assert s == 3 / 8
    assert abs(s - 1 / 3) == pytest.approx(bound_single((0, 1), 0.5, 2.0), abs=1e-16)


def test_rule_single_square_optimal_point():
    s = rule_single(SQ, DSQ, (0, 1), 0.25)
    assert s == 11 / 32
    assert s - 1 / 3 == pytest.approx(1 / 96, abs=1e-15)
    assert bound_single((0, 1), 0.25, 2.0) == 1 / 32


def test_bound_single_examples():
    assert bound_single((0, 1), 0.5, 2.0) == pytest.approx(1 / 24, abs=1e-17)
    assert bound_single((0, 1), 0.25, 2.0) == 1 / 32
    assert bound_single((3, 8), 4.0, 0.0) == 0.0
    with pytest.raises(NegativeNorm):
        bound_single((0, 1), 0.25, -1.0)


def test_rule_rejects_inadmissible_point():
    with pytest.raises(OutOfDomain):
        rule_single(SQ, DSQ, (0, 1), 0.6)


# ------------------------------------------------------------------ composite


def test_composite_single_panel_matches_single_rule():
    r = integrate_composite(SQ, DSQ, Partition((0.0, 1.0)), OPTIMAL, 2.0)
    assert (r.value, r.bound, r.evals) == (11 / 32, 1 / 32, 6)


def test_composite_two_panels_bound():
    r = integrate_composite(SQ, DSQ, Partition.uniform((0, 1), 2), OPTIMAL, 2.0)
    assert r.bound == 1 / 128
    assert r.evals == 12


def test_uniform_examples():
    f, df = fd("sin(t)")
    r = integrate_uniform(f, df, (0, math.pi), 1, 1.0)
    assert r.bound == pytest.approx(math.pi**3 / 64, rel=1e-15)
    assert abs(r.value - 2.0) <= r.bound
    assert integrate_uniform(SQ, DSQ, (0, 1), 4, 2.0).bound == 1 / 512
    one = integrate_uniform(SQ, DSQ, (0, 1), 1, 2.0)
    assert one == integrate_composite(SQ, DSQ, Partition((0, 1)), OPTIMAL, 2.0)
    with pytest.raises(InvalidN):
        integrate_uniform(SQ, DSQ, (0, 1), 0, 2.0)


def test_optimal_bound_is_sum_of_cubes_over_64():
    rng = random.Random(3)
    nodes = sorted({0.0, 1.0, *(rng.random() for _ in range(9))})
    p = Partition(nodes)
    r = integrate_composite(SQ, DSQ, p, OPTIMAL, 3.0)
    assert r.bound == pytest.approx(3.0 * sum(h**3 for h in p.widths) / 64, rel=1e-14)
    assert p.mesh == max(p.widths)


@given(
    st.lists(st.floats(-50, 50, allow_nan=False), min_size=2, max_size=12, unique=True),
    st.floats(-5, 5, allow_nan=False),
    st.floats(-5, 5, allow_nan=False),
    st.sampled_from([OPTIMAL, MIDPOINT, LEFT, XiChoice.fraction(0.3)]),
)
@settings(max_examples=150, deadline=None)
def test_exact_for_linear_functions(nodes, slope, icpt, xi):
    nodes = sorted(nodes)
    if min(b - a for a, b in zip(nodes, nodes[1:])) < 1e-6:
        return
    f = parse(f"{slope!r}*t+{icpt!r}".replace("+-", "-"))
    r = integrate_composite(f, f.derivative(), Partition(nodes), xi, 0.0)
    a, b = nodes[0], nodes[-1]
    exact = slope * (b * b - a * a) / 2 + icpt * (b - a)
    scale = abs(slope) * max(a * a, b * b) + abs(icpt) * (b - a)
    assert abs(r.value - exact) <= 1e-13 * (1 + scale)
    assert r.bound == 0.0


@pytest.mark.parametrize("src", ["1", "t", "3*t-7"])
def test_exactness_random_intervals(src):
    rng = random.Random(src)
    f, df = fd(src)
    for _ in range(20):
        a = rng.uniform(-10, 10)
        b = a + rng.uniform(0.01, 10)
        exact = {"1": b - a, "t": (b * b - a * a) / 2, "3*t-7": 1.5 * (b * b - a * a) - 7 * (b - a)}[src]
        for xi in (OPTIMAL, MIDPOINT, LEFT):
            r = integrate_composite(f, df, Partition.uniform((a, b), rng.randint(1, 9)), xi, 0.0)
            assert abs(r.value - exact) <= 1e-13 * (1 + abs(exact))


def test_xi_validation():
    p = Partition((0.0, 1.0, 2.0))
    with pytest.raises(XiOutOfRange) as info:
        integrate_composite(SQ, DSQ, p, XiChoice.explicit([0.1, 1.7]), 2.0)
    assert info.value.index == 1 and info.value.side == "upper"
    with pytest.raises(XiOutOfRange) as info:
        integrate_composite(SQ, DSQ, p, XiChoice.explicit([-0.1, 1.2]), 2.0)
    assert info.value.index == 0 and info.value.side == "lower"
    r = integrate_composite(SQ, DSQ, p, XiChoice.explicit([0.25, 1.25]), 2.0)
    assert r.bound == pytest.approx(1 / 32 * 2 * 2 / 2, rel=1e-15)
    assert r.value == pytest.approx(integrate_composite(SQ, DSQ, p, OPTIMAL, 2.0).value, rel=1e-15)


@pytest.mark.parametrize("nodes", [(0.0,), (0.0, 0.0), (1.0, 0.5), (0.0, 1.0, 1.0)])
def test_partition_rejects_degenerate(nodes):
    with pytest.raises(InvalidPartition):
        Partition(nodes)


# ------------------------------------------------------------------ baselines


def test_baseline_midpoint_examples():
    r = baseline_midpoint(SQ, DSQ, (0, 1), 0.5, 2.0)
    assert r.value == 3 / 8 and r.bound == pytest.approx(1 / 24, abs=1e-17)
    assert r.value == rule_single(SQ, DSQ, (0, 1), 0.5)
    # [1/48 + (1/3)(1/2)^3] * 2 = 1/8
    assert baseline_midpoint(SQ, DSQ, (0, 1), 0.0, 2.0).bound == pytest.approx(1 / 8, abs=1e-17)
    f, df = fd("t")
    for x in (0.0, 0.3, 1.0):
        assert baseline_midpoint(f, df, (0, 1), x, 0.0).value == pytest.approx(0.5, abs=1e-16)
    with pytest.raises(OutOfDomain):
        baseline_midpoint(SQ, DSQ, (0, 1), 1.5, 2.0)


def test_perturbed_trapezoid_examples():
    r = perturbed_trapezoid(SQ, DSQ, (0, 1), 2.0)
    assert r.value == 0.25 and r.bound == pytest.approx(1 / 12, abs=1e-17)
    f, df = fd("t")
    assert perturbed_trapezoid(f, df, (2, 5), 0.0).value == 10.5
    f, df = fd("sin(t)")
    r = perturbed_trapezoid(f, df, (0, math.pi), 1.0)
    assert r.value == pytest.approx(math.pi**2 / 4, rel=1e-14)
    assert abs(r.value - 2.0) <= r.bound == pytest.approx(math.pi**3 / 24)


@pytest.mark.parametrize("src", sorted(CORPUS))
def test_left_point_equals_perturbed_trapezoid(src):
    f, df = fd(src)
    for iv in ((0, 1), (-2, 3), (0.5, 0.75)):
        s = rule_single(f, df, iv, iv[0])
        p = perturbed_trapezoid(f, df, iv, 0.0).value
        assert abs(s - p) <= 4e-16 * max(1.0, abs(p))


@pytest.mark.parametrize("src", sorted(CORPUS))
def test_reflection_symmetry(src):
    f, df = fd(src)
    a, b = -0.7, 1.9
    g = parse(str(f).replace("t", f"({a + b!r}-t)"))
    dg = g.derivative()
    for x in (a, a + 0.3, (3 * a + b) / 4, (a + b) / 2):
        assert rule_single(f, df, (a, b), x) == pytest.approx(rule_single(g, dg, (a, b), x), rel=1e-13, abs=1e-14)


def test_bound_dominance_over_midpoint_baseline():
    for a, b in ((0, 1), (-2, 3), (10, 10.5)):
        iv = Interval(a, b)
        assert bound_single(iv, (3 * a + b) / 4, 1.7) < baseline_midpoint(SQ, DSQ, iv, iv.mid, 1.7).bound


def test_composite_baselines_bound_ratio():
    f, df = fd("t^4")
    p = Partition.uniform((0, 1), 8)
    main = integrate_composite(f, df, p, OPTIMAL, 12.0)
    mid = composite_baseline(baseline_midpoint, f, df, p, 12.0)
    trap = composite_baseline(perturbed_trapezoid, f, df, p, 12.0)
    assert main.bound / mid.bound == pytest.approx(0.75, rel=1e-14)
    assert trap.bound / main.bound == pytest.approx(64 / 24, rel=1e-14)
    for r in (main, mid, trap):
        assert abs(r.value - 0.2) <= r.bound


# ------------------------------------------------------------------ soundness & order


@pytest.mark.parametrize("src", ["sin(t)", "exp(t)", "t^4", "1/(1+t^2)"])
@pytest.mark.parametrize("iv", [(0.0, 1.0), (-2.0, 3.0)])
def test_certificate_soundness(src, iv):
    f, df = fd(src)
    m2 = CORPUS[src][iv]
    exact = exact_integral(src, *iv)
    for n in (1, 2, 4, 8, 16, 32, 64):
        p = Partition.uniform(iv, n)
        for theta in (0.0, 0.25, 0.5, 0.75, 1.0):
            r = integrate_composite(f, df, p, XiChoice.fraction(theta), m2)
            assert inequality_holds(abs(r.value - exact), r.bound)


def test_convergence_order_exp():
    f, df = fd("exp(t)")
    ns = [4, 8, 16, 32, 64, 128, 256]
    errs = [abs(integrate_uniform(f, df, (0, 1), n, math.e).value - (math.e - 1)) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
    assert slope == pytest.approx(-2.0, abs=0.2)


def test_oracle_agrees_within_certificate():
    for src in ("sin(t)", "exp(t)", "t^4", "1/(1+t^2)"):
        f, df = fd(src)
        for iv in ((0.0, 1.0), (-2.0, 3.0)):
            r = integrate_uniform(f, df, iv, 1024, CORPUS[src][iv])
            assert abs(reference_integral(f, iv) - r.value) <= r.bound
