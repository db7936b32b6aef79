"""Command-line front end.

Exit codes: 0 success, 2 input error (parse, domain, bad arguments),
3 tolerance not met by the adaptive integrator.

CSV columns per command::

    integrate  value,bound,certificate_kind,evals,n_intervals,oracle_error
    verify     f,a,b,x,lhs,rhs,ratio,holds
    compare    rule,value,bound,error,holds,evals
    prob       x,lhs,rhs,center,half_width,lo,hi,holds
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
import time

from .adaptive import GLOBAL, LOCAL, AdaptiveConfig, integrate_adaptive
from .errors import CertQuadError, ToleranceNotMet
from .expr import derivatives, differentiate, parse
from .kernel import Interval
from .probability import Distribution, expectation, expectation_interval, verify_prob_inequality
from .quadrature import (
    ESTIMATED,
    OPTIMAL,
    USER_CERTIFIED,
    Partition,
    XiChoice,
    baseline_midpoint,
    composite_baseline,
    integrate_composite,
    perturbed_trapezoid,
)
from .verify import CSV_COLUMNS, estimate_sup_norm, reference_integral, sharpness_scan, verify_inequality, x_grid

SCHEMA_VERSION = "1.0"

_NUM = {"type": "number"}
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema_version", "command", "inputs", "result", "timing_ms"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {"enum": ["integrate", "verify", "compare", "prob"]},
        "inputs": {"type": "object"},
        "result": {
            "type": "object",
            "required": ["value", "bound", "certificate_kind"],
            "properties": {
                "value": _NUM,
                "bound": _NUM,
                "certificate_kind": {"enum": ["USER_CERTIFIED", "ESTIMATED", "ANALYTIC"]},
                "oracle_error": _NUM,
            },
        },
        "trace": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "xi", "bound"],
                "properties": {"a": _NUM, "b": _NUM, "xi": _NUM, "bound": _NUM},
            },
        },
        "timing_ms": {"type": "number", "minimum": 0},
    },
}


def _sup_arg(text):
    if text is None or text == "auto":
        return text
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("sup-norm must be >= 0")
    return value


def _add_output(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", action="store_true", help="emit a JSON report")
    g.add_argument("--csv", action="store_true", help="emit CSV rows")


def _add_interval(p):
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=1.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="certquad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("integrate", help="composite or adaptive integration with a certified bound")
    p.add_argument("--f", required=True, help="integrand in t, e.g. 'sin(t)*t^2'")
    _add_interval(p)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--n", type=int, help="uniform partition with n subintervals")
    mode.add_argument("--tol", type=float, help="adaptive refinement to this absolute bound")
    p.add_argument("--xi", default="optimal", choices=["optimal", "midpoint", "left"])
    p.add_argument("--m2", type=_sup_arg, default="auto", help="sup|f''| or 'auto' (estimated)")
    p.add_argument("--m2-mode", default="global", choices=["global", "local"],
                   help="adaptive only, with --m2 auto: one estimate or one per subinterval")
    p.add_argument("--max-intervals", type=int, default=1_000_000)
    p.add_argument("--oracle", action="store_true", help="also report |value - reference integral|")
    p.add_argument("--trace", action="store_true", help="include the adaptive partition in text output")
    _add_output(p)

    p = sub.add_parser("verify", help="check the companion inequality at x or over a grid")
    p.add_argument("--f", required=True)
    _add_interval(p)
    where = p.add_mutually_exclusive_group()
    where.add_argument("--x", type=float)
    where.add_argument("--x-grid", type=int)
    p.add_argument("--m2", type=_sup_arg, default=None, help="sup|f''|; default exact if constant, else estimated")
    _add_output(p)

    p = sub.add_parser("compare", help="companion rule vs midpoint and perturbed-trapezoid baselines")
    p.add_argument("--f", required=True)
    _add_interval(p)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--m2", type=_sup_arg, default="auto")
    _add_output(p)

    p = sub.add_parser("prob", help="expectation bounds for a density on [a, b]")
    p.add_argument("--pdf", required=True)
    p.add_argument("--cdf", default=None, help="analytic CDF; omitted means computed by quadrature")
    _add_interval(p)
    where = p.add_mutually_exclusive_group()
    where.add_argument("--x", type=float)
    where.add_argument("--x-grid", type=int)
    p.add_argument("--m1", type=_sup_arg, default="auto", help="sup|f'| of the density or 'auto'")
    _add_output(p)
    return parser


# --------------------------------------------------------------------------- commands


def _m2_for(ddf, iv, arg):
    if arg == "auto" or arg is None:
        return estimate_sup_norm(ddf, iv), ESTIMATED
    return float(arg), USER_CERTIFIED


def cmd_integrate(args):
    f = parse(args.f)
    df, ddf = derivatives(f)
    iv = Interval(args.a, args.b)
    xi = XiChoice.from_name(args.xi)
    result, trace = {}, None
    if args.n is not None:
        m2, kind = _m2_for(ddf, iv, args.m2)
        res = integrate_composite(f, df, Partition.uniform(iv, args.n), xi, m2)
        result["m2"] = m2
    else:
        cfg = AdaptiveConfig(
            tol=args.tol,
            max_intervals=args.max_intervals,
            xi=xi,
            m2_mode=LOCAL if args.m2_mode == "local" else GLOBAL,
            m2=None if args.m2 == "auto" else args.m2,
        )
        out = integrate_adaptive(f, df, ddf, iv, cfg)
        res, kind = out.result, out.result.certificate_kind
        trace = [{"a": e.a, "b": e.b, "xi": e.xi, "bound": e.bound} for e in out.trace]
    result.update(value=res.value, bound=res.bound, certificate_kind=kind,
                  evals=res.evals, n_intervals=res.n_intervals, rule=res.rule)
    if args.oracle:
        result["oracle"] = reference_integral(f, iv)
        result["oracle_error"] = abs(res.value - result["oracle"])
    row = {k: result.get(k, "") for k in ("value", "bound", "certificate_kind", "evals", "n_intervals", "oracle_error")}
    return result, [row], trace


def cmd_verify(args):
    f = parse(args.f)
    iv = Interval(args.a, args.b)
    estimated = args.m2 == "auto"
    m2 = estimate_sup_norm(derivatives(f)[1], iv) if estimated else args.m2
    if args.x is not None:
        rep = verify_inequality(f, iv, args.x, m2=m2)
        kind = ESTIMATED if estimated else rep.certificate_kind
        result = {"value": rep.lhs, "bound": rep.rhs, "certificate_kind": kind,
                  "ratio": rep.ratio, "holds": rep.holds, "x": rep.x, "m2": rep.norm}
        return result, [rep.as_row()], None
    scan = sharpness_scan([f], iv, args.x_grid or 101, m2=[m2])
    best = max(scan.reports, key=lambda r: r.ratio)
    result = {
        "value": best.lhs, "bound": best.rhs,
        "certificate_kind": ESTIMATED if estimated else best.certificate_kind,
        "max_ratio": scan.max_ratio, "argmax_x": scan.per_function()[str(f)][1],
        "all_hold": scan.all_hold, "m2": best.norm,
        "rows": [r.as_row() for r in scan.reports],
    }
    return result, [r.as_row() for r in scan.reports], None


def cmd_compare(args):
    f = parse(args.f)
    df, ddf = derivatives(f)
    iv = Interval(args.a, args.b)
    m2, kind = _m2_for(ddf, iv, args.m2)
    p = Partition.uniform(iv, args.n)
    oracle = reference_integral(f, iv)
    runs = [
        integrate_composite(f, df, p, OPTIMAL, m2),
        composite_baseline(baseline_midpoint, f, df, p, m2),
        composite_baseline(perturbed_trapezoid, f, df, p, m2),
    ]
    rows = []
    for r in runs:
        err = abs(r.value - oracle)
        rows.append({"rule": r.rule, "value": r.value, "bound": r.bound, "error": err,
                     "holds": err <= r.bound * (1 + 1e-12) + 1e-15, "evals": r.evals})
    main = runs[0]
    result = {
        "value": main.value, "bound": main.bound, "certificate_kind": kind, "m2": m2,
        "oracle": oracle, "oracle_error": rows[0]["error"],
        "bound_ratio_vs_midpoint": main.bound / runs[1].bound if runs[1].bound else None,
        "rules": rows,
    }
    return result, rows, None


def cmd_prob(args):
    pdf = parse(args.pdf)
    cdf = parse(args.cdf) if args.cdf else None
    iv = Interval(args.a, args.b)
    m1, kind = _m2_for(differentiate(pdf), iv, args.m1)
    d = Distribution(pdf, iv, cdf=cdf, m1=m1)
    mean = expectation(d)
    xs = [args.x] if args.x is not None else x_grid(iv, args.x_grid or 101)
    rows = []
    for x in xs:
        rep = verify_prob_inequality(d, x, mean=mean)
        ei = expectation_interval(d, x)
        rows.append({"x": rep.x, "lhs": rep.lhs, "rhs": rep.rhs, "center": ei.center,
                     "half_width": ei.half_width, "lo": ei.lo, "hi": ei.hi, "holds": rep.holds,
                     "contains": ei.contains(mean)})
    best = min(rows, key=lambda r: r["half_width"])
    result = {
        "value": best["center"], "bound": best["half_width"], "certificate_kind": kind,
        "m1": d.m1, "expectation": mean, "interval": [best["lo"], best["hi"]], "x": best["x"],
        "lhs": best["lhs"], "rhs": best["rhs"], "holds": all(r["holds"] for r in rows),
        "contains": all(r["contains"] for r in rows),
    }
    if len(rows) > 1:
        result["min_width_x"] = best["x"]
        result["rows"] = rows
    csv_rows = [{k: r[k] for k in ("x", "lhs", "rhs", "center", "half_width", "lo", "hi", "holds")} for r in rows]
    return result, csv_rows, None


COMMANDS = {"integrate": cmd_integrate, "verify": cmd_verify, "compare": cmd_compare, "prob": cmd_prob}
_CSV_FIELDS = {
    "integrate": ["value", "bound", "certificate_kind", "evals", "n_intervals", "oracle_error"],
    "verify": list(CSV_COLUMNS),
    "compare": ["rule", "value", "bound", "error", "holds", "evals"],
    "prob": ["x", "lhs", "rhs", "center", "half_width", "lo", "hi", "holds"],
}


# --------------------------------------------------------------------------- output


def _inputs(args) -> dict:
    skip = {"json", "csv", "command", "trace"}
    return {k: v for k, v in vars(args).items() if k not in skip and v is not None}


def render_text(command, result, trace, show_trace=False) -> str:
    lines = [f"command: {command}"]
    for k, v in result.items():
        if k in ("rows", "rules"):
            continue
        lines.append(f"{k}: {v!r}" if isinstance(v, float) else f"{k}: {v}")
    if "rules" in result:
        lines.append(f"{'rule':<28}{'value':>24}{'bound':>14}{'error':>14}  holds")
        for r in result["rules"]:
            lines.append(f"{r['rule']:<28}{r['value']:>24.17g}{r['bound']:>14.6e}{r['error']:>14.6e}  {r['holds']}")
    if "rows" in result:
        lines.append(f"rows: {len(result['rows'])} (use --csv or --json for all)")
    if trace is not None and show_trace:
        for e in trace:
            lines.append(f"  [{e['a']!r}, {e['b']!r}] xi={e['xi']!r} bound={e['bound']:.3e}")
    return "\n".join(lines)


def render_csv(command, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=_CSV_FIELDS[command], lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, result, rows, trace, started, out):
    if args.json:
        report = {
            "schema_version": SCHEMA_VERSION,
            "command": args.command,
            "inputs": _inputs(args),
            "result": result,
            "timing_ms": (time.perf_counter() - started) * 1e3,
        }
        if trace is not None:
            report["trace"] = trace
        out.write(json.dumps(report, allow_nan=False) + "\n")
    elif args.csv:
        out.write(render_csv(args.command, rows))
    else:
        out.write(render_text(args.command, result, trace, getattr(args, "trace", False)) + "\n")


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stderr(err), contextlib.redirect_stdout(out):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command in ("verify", "prob") and args.x is None and args.x_grid is not None and args.x_grid < 1:
        err.write("error: --x-grid must be >= 1\n")
        return 2
    started = time.perf_counter()
    try:
        result, rows, trace = COMMANDS[args.command](args)
    except ToleranceNotMet as exc:
        err.write(f"error: {exc}\n")
        if exc.result is not None:
            res = exc.result.result
            result = {"value": res.value, "bound": res.bound, "certificate_kind": res.certificate_kind,
                      "evals": res.evals, "n_intervals": res.n_intervals, "status": "TOLERANCE_NOT_MET"}
            _emit(args, result, [result], None, started, out)
        return 3
    except (CertQuadError, ValueError, OverflowError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    _emit(args, result, rows, trace, started, out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
