"""Error and certificate versus n for the companion rule and both baselines.

    python scripts/convergence_study.py --f "exp(t)" --a 0 --b 1 --m2 2.718281828459045 --csv out.csv
"""

import argparse
import csv
import math
import sys

import numpy as np

from certquad import OPTIMAL, Partition, baseline_midpoint, integrate_composite, parse, perturbed_trapezoid
from certquad.quadrature import composite_baseline
from certquad.verify import estimate_sup_norm, reference_integral


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--f", default="exp(t)")
    ap.add_argument("--a", type=float, default=0.0)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--m2", type=float, default=None, help="sup|f''|; estimated when omitted")
    ap.add_argument("--max-log2n", type=int, default=10)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    f = parse(args.f)
    df, ddf = f.derivative(), f.derivative().derivative()
    iv = (args.a, args.b)
    m2 = args.m2 if args.m2 is not None else estimate_sup_norm(ddf, iv)
    exact = reference_integral(f, iv)
    rules = {
        "companion": lambda p: integrate_composite(f, df, p, OPTIMAL, m2),
        "midpoint": lambda p: composite_baseline(baseline_midpoint, f, df, p, m2),
        "trapezoid+": lambda p: composite_baseline(perturbed_trapezoid, f, df, p, m2),
    }
    rows = []
    for k in range(args.max_log2n + 1):
        n = 2**k
        p = Partition.uniform(iv, n)
        for name, run in rules.items():
            r = run(p)
            rows.append({"n": n, "rule": name, "value": r.value, "bound": r.bound, "error": abs(r.value - exact)})

    print(f"f={args.f} on [{args.a}, {args.b}], m2={m2:.6g}, integral={exact!r}")
    print(f"{'n':>6} " + " ".join(f"{name + ' err':>16}{name + ' bnd':>16}" for name in rules))
    for k in range(args.max_log2n + 1):
        n = 2**k
        cells = [r for r in rows if r["n"] == n]
        print(f"{n:>6} " + " ".join(f"{r['error']:>16.3e}{r['bound']:>16.3e}" for r in cells))
    for name in rules:
        sel = [r for r in rows if r["rule"] == name and r["n"] >= 4 and r["error"] > 0]
        if len(sel) >= 2:
            slope = np.polyfit([math.log(r["n"]) for r in sel], [math.log(r["error"]) for r in sel], 1)[0]
            print(f"{name}: fitted error order {slope:.3f}")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
        print(f"wrote {len(rows)} rows to {args.csv}", file=sys.stderr)


if __name__ == "__main__":
    main()
