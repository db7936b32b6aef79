"""Reproduce the error constants 1/24, 1/48, 1/64 with f(t) = t^2 on [0, 1].

    python scripts/reproduce_constants.py
"""

from fractions import Fraction

from certquad import Interval, baseline_midpoint, bound_factor, parse, perturbed_trapezoid, rule_single
from certquad.verify import reference_integral

f = parse("t^2")
df = f.derivative()
iv = Interval(0, 1)
exact = reference_integral(f, iv)

print(f"{'x':>6} {'rule':>10} {'error':>12} {'bound (m2=2)':>14} {'coefficient':>12} {'ratio':>8}")
for x in (0.0, 0.125, 0.25, 0.375, 0.5):
    s = rule_single(f, df, iv, x)
    c = bound_factor(iv, x)
    err = abs(s - exact)
    print(f"{x:>6} {s:>10.6f} {err:>12.6e} {2 * c:>14.6e} {str(Fraction(c).limit_denominator(10_000)):>12} {err / (2 * c):>8.4f}")

mid = baseline_midpoint(f, df, iv, 0.5, 2.0)
trap = perturbed_trapezoid(f, df, iv, 2.0)
print()
print(f"midpoint baseline     value={mid.value:.6f} bound={mid.bound:.6e}")
print(f"perturbed trapezoid   value={trap.value:.6f} bound={trap.bound:.6e}")
print(f"optimal / midpoint bound ratio = {bound_factor(iv, 0.25) / bound_factor(iv, 0.5):.4f}")
