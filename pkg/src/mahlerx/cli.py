"""Command-line surface.

Subcommands: measure-poly, mbar, mx, curve, threshold, weil-hx, verify.
Human output shows 12 significant digits with the enclosure width appended;
machine output (csv/json) carries both endpoints, rounded outward to floats so
containment survives serialization.  Exit codes: 0 success, 1 failed verify
suite, 2 input error, 3 precision budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction
from typing import Optional

import gmpy2

from . import __version__
from .engine import (
    SearchConfig,
    XParameter,
    mx_curve,
    mx_search,
    smallp_threshold,
    weil_hx,
    weil_hx_upper,
)
from .errors import PrecisionExhausted, ToleranceUnreachable
from .intervals import Interval, PrecisionPolicy
from .polynomials import mahler_measure_poly, parse_polynomial
from .radq import format_vector, mbar_ev, min_degree_ev, parse_vector, weil_height_ev
from .verify import SUITES, run_suites

CSV_HEADER = "x,value_lo,value_hi,exact_form,witness,certificate"
WITNESS_SEP = "|"
ENV_PRECISION = "MAHLER_PRECISION_BITS"


def _round_out(iv: Interval) -> tuple[float, float]:
    """Outward-rounded float64 endpoints; containment survives the narrowing."""
    dn = gmpy2.context(precision=53, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=53, round=gmpy2.RoundUp)
    return float(dn.add(iv.lo, 0)), float(up.add(iv.hi, 0))


def _human_value(iv: Interval) -> str:
    lo, hi = _round_out(iv)
    mid = (lo + hi) / 2
    width = float(iv.width())
    return f"{mid:.12g} (width <= {width:.3g})"


def _policy_from(args: argparse.Namespace) -> PrecisionPolicy:
    start = args.precision_bits
    if start is None:
        env = os.environ.get(ENV_PRECISION)
        start = int(env) if env else 128
    tie = Fraction(args.tie_eps) if args.tie_eps else Fraction(1, 2**64)
    return PrecisionPolicy(start_bits=start, max_bits=max(args.max_bits, start), tie_eps=tie)


def _config_from(args: argparse.Namespace) -> SearchConfig:
    return SearchConfig(
        denominator_bound=args.denom_bound,
        max_terms_override=args.max_terms,
        precision=_policy_from(args),
        infinity_term_cap=args.infinity_term_cap,
    )


def _emit_records(args: argparse.Namespace, command: str, records: list[dict]) -> None:
    fmt = args.format
    if fmt == "json":
        payload = records[0] if len(records) == 1 else {"command": command, "points": records}
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    if fmt == "csv":
        print(CSV_HEADER)
        for rec in records:
            row = [
                str(rec.get("x", "")),
                _csv_float(rec.get("value_lo")),
                _csv_float(rec.get("value_hi")),
                rec.get("exact_form") or "",
                WITNESS_SEP.join(rec.get("witness", [])),
                rec.get("certificate", ""),
            ]
            print(",".join(_csv_quote(cell) for cell in row))
        return
    for rec in records:
        for key in ("command", "input", "x", "value", "exact_form", "witness",
                    "certificate", "nodes", "precision_bits", "elapsed_ms"):
            if key not in rec:
                continue
            val = rec[key]
            if key == "witness":
                val = "[" + ", ".join(val) + "]"
            print(f"{key:>15}: {val}")
        print()


def _csv_float(v) -> str:
    return "" if v is None else repr(v)


def _csv_quote(cell: str) -> str:
    if "," in cell or '"' in cell:
        return '"' + cell.replace('"', '""') + '"'
    return cell


def _record(command: str, echo: str, started: float, **fields) -> dict:
    rec = {
        "command": command,
        "input": echo,
        "elapsed_ms": int((time.monotonic() - started) * 1000),
    }
    rec.update(fields)
    return rec


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_measure_poly(args: argparse.Namespace) -> int:
    started = time.monotonic()
    poly = parse_polynomial(args.polynomial)
    res = mahler_measure_poly(poly, Fraction(args.tol), _policy_from(args))
    lo, hi = _round_out(res.value)
    rec = _record(
        "measure-poly", str(poly), started,
        x="",
        value=_human_value(res.value) if not res.is_exact_zero else "0 (exact)",
        value_lo=0.0 if res.is_exact_zero else lo,
        value_hi=0.0 if res.is_exact_zero else hi,
        exact_form="0" if res.is_exact_zero else None,
        witness=[],
        certificate="certified",
        nodes=0,
        precision_bits=res.value.bits,
    )
    _emit_records(args, "measure-poly", [rec])
    return 0


def _mx_record(args: argparse.Namespace, command: str, started: float,
               target_text: str, x: XParameter) -> dict:
    target = parse_vector(target_text)
    res = mx_search(target, x, _config_from(args))
    assert res.witness.product().entries == target.entries, "witness product mismatch"
    lo, hi = _round_out(res.value)
    return _record(
        command, format_vector(target), started,
        x=str(x),
        value=_human_value(res.value),
        value_lo=lo,
        value_hi=hi,
        exact_form=res.exact_form,
        witness=[format_vector(t) for t in res.witness.terms],
        certificate=res.certificate,
        nodes=res.nodes,
        precision_bits=res.precision_bits,
    )


def _cmd_mx(args: argparse.Namespace) -> int:
    started = time.monotonic()
    rec = _mx_record(args, "mx", started, args.target, XParameter.parse(args.x))
    _emit_records(args, "mx", [rec])
    return 0


def _parse_grid(text: str) -> list[Fraction]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("grid must look like a:b:step")
    lo, hi, step = (Fraction(p) for p in parts)
    if step <= 0 or lo <= 0 or hi < lo:
        raise ValueError("grid needs 0 < a <= b and step > 0")
    out = []
    g = lo
    while g <= hi:
        out.append(g)
        g += step
    return out


def _cmd_curve(args: argparse.Namespace) -> int:
    started = time.monotonic()
    target = parse_vector(args.target)
    grid = _parse_grid(args.grid)
    points = mx_curve(target, grid, _config_from(args))
    records = []
    for pt in points:
        assert pt.witness.product().entries == target.entries, "witness product mismatch"
        lo, hi = _round_out(pt.value)
        records.append({
            "x": str(pt.x),
            "value": _human_value(pt.value),
            "value_lo": lo,
            "value_hi": hi,
            "exact_form": None,
            "witness": [format_vector(t) for t in pt.witness.terms],
            "certificate": "certified",
        })
    if args.format == "table":
        print(f"curve for {format_vector(target)} "
              f"(denominators to {args.denom_bound}), {len(points)} points")
        for rec in records:
            print(f"  x={rec['x']:>8}  {rec['value']:<40} witness "
                  + WITNESS_SEP.join(rec["witness"]))
        print(f"elapsed_ms={int((time.monotonic() - started) * 1000)}")
        return 0
    _emit_records(args, "curve", records)
    return 0


def _cmd_mbar(args: argparse.Namespace) -> int:
    started = time.monotonic()
    target = parse_vector(args.target)
    measure = mbar_ev(target)
    policy = _policy_from(args)
    iv = measure.eval(policy.start_bits)
    lo, hi = _round_out(iv)
    degree = None if target.is_identity() else min_degree_ev(target)
    rec = _record(
        "mbar", format_vector(target), started,
        x="",
        value=_human_value(iv),
        value_lo=lo,
        value_hi=hi,
        exact_form=str(measure),
        witness=[],
        certificate="certified",
        nodes=0,
        precision_bits=policy.start_bits,
        min_degree=degree,
        weil_height=str(weil_height_ev(target)),
    )
    _emit_records(args, "mbar", [rec])
    return 0


def _cmd_threshold(args: argparse.Namespace) -> int:
    started = time.monotonic()
    target = parse_vector(args.target)
    policy = _policy_from(args)
    iv = smallp_threshold(target, policy)
    if iv is None:
        rec = _record(
            "threshold", format_vector(target), started,
            x="", value="inf (measure equals log 2; every x collapses)",
            value_lo=None, value_hi=None, exact_form="inf", witness=[],
            certificate="certified", nodes=0, precision_bits=policy.start_bits,
        )
    else:
        lo, hi = _round_out(iv)
        rec = _record(
            "threshold", format_vector(target), started,
            x="", value=_human_value(iv), value_lo=lo, value_hi=hi,
            exact_form=None, witness=[], certificate="certified", nodes=0,
            precision_bits=policy.start_bits,
        )
    _emit_records(args, "threshold", [rec])
    return 0


def _cmd_weil_hx(args: argparse.Namespace) -> int:
    started = time.monotonic()
    target = parse_vector(args.target)
    x = XParameter.parse(args.x)
    policy = _policy_from(args)
    value = weil_hx(target, x)
    iv = value.enclosure(policy.start_bits)
    lo, hi = _round_out(iv)
    closed = str(weil_height_ev(target)) if (not x.is_infinite and x.value <= 1) else "0"
    rec = _record(
        "weil-hx", format_vector(target), started,
        x=str(x), value=_human_value(iv), value_lo=lo, value_hi=hi,
        exact_form=closed, witness=[], certificate="certified", nodes=0,
        precision_bits=policy.start_bits,
    )
    records = [rec]
    if args.bound_n is not None:
        upper = weil_hx_upper(target, x, args.bound_n, policy)
        ulo, uhi = _round_out(upper)
        records.append(_record(
            "weil-hx-upper", format_vector(target), started,
            x=str(x), value=_human_value(upper), value_lo=ulo, value_hi=uhi,
            exact_form=None, witness=[], certificate="certified", nodes=0,
            precision_bits=policy.start_bits, bound_n=args.bound_n,
        ))
    _emit_records(args, "weil-hx", records)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    started = time.monotonic()
    names = list(SUITES) if args.suite == "all" else [args.suite]
    lines, ok = run_suites(names, seed=args.seed, config=_config_from(args))
    for line in lines:
        print(line)
    print(f"elapsed_ms={int((time.monotonic() - started) * 1000)}")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mahlerx",
        description="Exact x-metric Mahler measures with certified enclosures",
    )
    parser.add_argument("--version", action="version", version=f"mahlerx {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"), default="table")
    common.add_argument("--precision-bits", type=int, default=None,
                        help=f"starting precision (default 128; env {ENV_PRECISION})")
    common.add_argument("--max-bits", type=int, default=1024,
                        help="precision ceiling for adaptive comparisons")
    common.add_argument("--tie-eps", type=str, default=None,
                        help="tie tolerance as an exact rational (default 1/2^64)")
    common.add_argument("--denom-bound", type=int, default=1,
                        help="search exponent denominators dividing this bound")
    common.add_argument("--max-terms", type=int, default=None,
                        help="override the factorization length ceiling")
    common.add_argument("--infinity-term-cap", type=int, default=8,
                        help="term cap for the max combiner (certificate degrades if it binds)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads; never changes any output byte except elapsed_ms")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized suites")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure-poly", parents=[common],
                       help="Mahler measure of an integer polynomial")
    p.add_argument("polynomial", help='e.g. "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1" or "[1,1,0,...]"')
    p.add_argument("--tol", type=str, default="1e-9", help="enclosure width bound")
    p.set_defaults(func=_cmd_measure_poly)

    p = sub.add_parser("mbar", parents=[common],
                       help="exact modified measure, minimal degree, Weil height")
    p.add_argument("target", help='rational or vector, e.g. "12", "2/3", "2^(3/2)"')
    p.set_defaults(func=_cmd_mbar)

    p = sub.add_parser("mx", parents=[common], help="certified x-metric measure with witness")
    p.add_argument("target")
    p.add_argument("--x", required=True, help='positive rational or "inf"')
    p.set_defaults(func=_cmd_mx)

    p = sub.add_parser("curve", parents=[common], help="value curve over an x grid")
    p.add_argument("target")
    p.add_argument("--grid", default="1/4:4:1/20", help="a:b:step with rational entries")
    p.set_defaults(func=_cmd_curve)

    p = sub.add_parser("threshold", parents=[common],
                       help="largest x with guaranteed collapse to the modified measure")
    p.add_argument("target")
    p.set_defaults(func=_cmd_threshold)

    p = sub.add_parser("weil-hx", parents=[common], help="x-metric Weil height (closed form)")
    p.add_argument("target")
    p.add_argument("--x", required=True)
    p.add_argument("--bound-n", type=int, default=None,
                   help="also print the N-th-root upper bound (finite x > 1)")
    p.set_defaults(func=_cmd_weil_hx)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("suite", choices=SUITES + ("all",))
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.threads < 1:
        print("--threads must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (PrecisionExhausted, ToleranceUnreachable) as exc:
        print(f"precision budget exceeded: {exc}", file=sys.stderr)
        return 3
    except (ValueError, ZeroDivisionError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
