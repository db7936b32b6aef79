"""Inequality ratios lhs/rhs over the admissible x-grid for a small corpus.

    python scripts/sharpness_scan.py --grid 101 --csv scan.csv
"""

import argparse

from certquad import parse, sharpness_scan

CORPUS = ["(t-0)^2", "sin(t)", "exp(t)", "t^4", "1/(1+t^2)", "t^3-t", "t"]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, default=0.0)
    ap.add_argument("--b", type=float, default=1.0)
    ap.add_argument("--grid", type=int, default=101)
    ap.add_argument("--csv", default=None)
    args = ap.parse_args()

    scan = sharpness_scan([parse(s) for s in CORPUS], (args.a, args.b), args.grid)
    print(f"{'f':<14}{'max ratio':>12}  attained at x")
    for name, (top, xs) in scan.per_function().items():
        shown = ", ".join(f"{x:.4g}" for x in xs[:6]) + (f", ... ({len(xs)} points)" if len(xs) > 6 else "")
        print(f"{name:<14}{top:>12.6f}  {shown}")
    print(f"all hold: {scan.all_hold}")
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(scan.to_csv())


if __name__ == "__main__":
    main()
