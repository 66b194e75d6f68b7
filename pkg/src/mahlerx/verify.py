"""Named verification suites behind the `verify` CLI command.

Each suite re-derives a published statement as a concrete, certified
computation on desk-scale inputs and reports one pass/fail line per
assertion.  Reports are deterministic for a fixed seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .engine import (
    CERTIFIED,
    CheckReport,
    CurvePoint,
    SearchConfig,
    XParameter,
    continuity_check,
    m0_check,
    mx_curve,
    mx_search,
    rational_below_threshold,
    weil_hx,
    weil_hx_upper,
)
from .exact import LogReal, LogValue
from .framework import framework_properties, indicator_model, radq_model
from .intervals import (
    Const,
    GREATER,
    IntervalReal,
    PowReal,
    ProductReal,
    TIE,
    refine_compare,
)
from .radq import ExponentVector, ev_from_rational, mbar_ev, weil_height_ev

SUITES = ("smallp", "notuniform", "weil", "framework", "continuity")


def suite_smallp(config: SearchConfig = SearchConfig()) -> CheckReport:
    """Below the collapse threshold the search value equals the modified
    measure and the witness is a single class."""
    report = CheckReport("smallp")
    for n in (4, 9, 12, 25):
        target = ev_from_rational(n)
        x = rational_below_threshold(target, Fraction(9, 10), config.precision)
        assert x is not None, "all suite targets have finite thresholds"
        res = mx_search(target, XParameter.finite(x), config)
        measure = mbar_ev(target)
        tie = refine_compare(res.value_real, LogReal(measure), config.precision) == TIE
        report.add(
            f"collapse n={n}",
            tie and len(res.witness) == 1 and res.certificate == CERTIFIED,
            f"x={float(x):.6g}, value={measure}, witness {res.witness}",
        )
        # the small-x limit agrees with the modified measure
        sub = m0_check(target, config)
        report.add(f"small-x limit n={n}", sub.ok, "; ".join(e.label for e in sub.entries))
    return report


def suite_notuniform(config: SearchConfig = SearchConfig()) -> CheckReport:
    """The optimal witness for p^2 changes shape across x = 1: one class below
    the threshold, at least two nontrivial classes for every x > 1."""
    report = CheckReport("notuniform")
    for p in (2, 3, 5):
        target = ev_from_rational(p * p)
        res = mx_search(target, XParameter.finite(Fraction(1, 2)), config)
        expected = mbar_ev(target)
        ok_small = (
            len(res.witness) == 1
            and refine_compare(res.value_real, LogReal(expected), config.precision) == TIE
            and res.certificate == CERTIFIED
        )
        report.add(f"p={p} single class at x=1/2", ok_small, f"witness {res.witness}")
        for x in (Fraction(3, 2), Fraction(2)):
            cfg = SearchConfig(
                denominator_bound=2,
                precision=config.precision,
                infinity_term_cap=config.infinity_term_cap,
            )
            res = mx_search(target, XParameter.finite(x), cfg)
            split_value = ProductReal(
                PowReal(Const(2), 1 / x),
                LogReal(LogValue(((p, Fraction(1)),))),
            )
            ok_large = (
                len(res.witness) >= 2
                and refine_compare(res.value_real, split_value, config.precision) == TIE
                and res.certificate == CERTIFIED
            )
            report.add(
                f"p={p} split at x={x} (denominators to 2)",
                ok_large,
                f"witness {res.witness}, value {res.value}",
            )
    return report


def _random_vector(rng: random.Random) -> ExponentVector:
    primes = (2, 3, 5, 7, 11)
    pairs = []
    for p in primes:
        if rng.random() < 0.5:
            num = rng.randint(-3, 3)
            den = rng.choice((1, 1, 2))
            if num:
                pairs.append((p, Fraction(num, den)))
    if not pairs:
        pairs.append((2, Fraction(1)))
    return ExponentVector.from_pairs(pairs)


def suite_weil(seed: int = 0, config: SearchConfig = SearchConfig()) -> CheckReport:
    """Closed form of the x-metric Weil height, the integer-power rule, and
    the root upper bound with its decay."""
    report = CheckReport("weil")
    rng = random.Random(seed)
    policy = config.precision
    failures_closed = 0
    failures_powers = 0
    for _ in range(100):
        e = _random_vector(rng)
        h = weil_height_ev(e)
        for x in (XParameter.finite(Fraction(1, 2)), XParameter.finite(1)):
            if refine_compare(weil_hx(e, x), LogReal(h), policy) != TIE:
                failures_closed += 1
        for x in (XParameter.finite(Fraction(3, 2)), XParameter.infinity()):
            if refine_compare(weil_hx(e, x), Const(0), policy) != TIE:
                failures_closed += 1
        n = rng.randint(-5, 5)
        scaled_h = weil_height_ev(e.scaled(n)) if n != 0 else LogValue()
        if scaled_h != h.scaled(abs(n)):
            failures_powers += 1
    report.add("closed form on 100 random classes", failures_closed == 0,
               f"{failures_closed} failures")
    report.add("integer powers scale the height", failures_powers == 0,
               f"{failures_powers} failures")

    e = ExponentVector.from_pairs({2: Fraction(1)})
    h = weil_height_ev(e)
    upper = weil_hx_upper(e, XParameter.finite(2), 10**6, policy)
    bound = ProductReal(Const(Fraction(1, 1000)), LogReal(h))
    report.add(
        "root bound at N=10^6 within 10^-3 of the height",
        refine_compare(IntervalReal(upper), bound, policy) != GREATER,
        f"upper {upper}",
    )
    decay_ok = True
    prev = weil_hx_upper(e, XParameter.finite(2), 1, policy)
    for n in (10, 100, 10**4):
        cur = weil_hx_upper(e, XParameter.finite(2), n, policy)
        if not cur.hi < prev.lo:
            decay_ok = False
        prev = cur
    report.add("root bound decreases with N", decay_ok)
    return report


def suite_framework(seed: int = 0, samples: int = 200) -> CheckReport:
    report = CheckReport("framework")
    for model in (radq_model(), indicator_model()):
        sub = framework_properties(model, samples=samples, seed=seed)
        detail = next((e.detail for e in sub.entries if e.label == "summary"), "")
        report.add(f"properties on {model.name}", sub.ok, detail)
    return report


def suite_continuity(config: SearchConfig = SearchConfig()) -> CheckReport:
    report = CheckReport("continuity")
    grid = [Fraction(1, 2) + Fraction(k, 4) for k in range(11)]  # 1/2 .. 3
    for n in (4, 12):
        target = ev_from_rational(n)
        curve = mx_curve(target, grid, config)
        mono = all(b.value.lo <= a.value.hi for a, b in zip(curve, curve[1:]))
        report.add(f"curve n={n} non-increasing", mono)
        sub = continuity_check(curve, target)
        bad = [e.label for e in sub.entries if not e.passed]
        report.add(f"slope bounds n={n}", sub.ok, ", ".join(bad) if bad else "all pairs pass")
    target = ev_from_rational(2)
    curve = mx_curve(target, grid, config)
    flat = all(
        pt.value.contains_interval(curve[0].value) or curve[0].value.contains_interval(pt.value)
        or abs(float(pt.value.lo) - float(curve[0].value.lo)) < 1e-20
        for pt in curve
    )
    report.add("curve n=2 constant", flat)
    sub = continuity_check(curve, target)
    report.add("slope bounds n=2", sub.ok)

    # negative control: an injected upward jump must be reported
    doubled = mbar_ev(ev_from_rational(4)).eval(128)
    jump = [curve[0], CurvePoint(curve[1].x, doubled, curve[1].witness)]
    sub = continuity_check(jump, target)
    report.add("injected jump is flagged", not sub.ok)
    return report


def run_suites(names: list[str], seed: int = 0, config: SearchConfig = SearchConfig()) -> tuple[list[str], bool]:
    """Run the named suites; returns the report lines and overall success."""
    lines: list[str] = []
    ok = True
    for name in names:
        if name == "smallp":
            rep = suite_smallp(config)
        elif name == "notuniform":
            rep = suite_notuniform(config)
        elif name == "weil":
            rep = suite_weil(seed, config)
        elif name == "framework":
            rep = suite_framework(seed)
        elif name == "continuity":
            rep = suite_continuity(config)
        else:
            raise ValueError(f"unknown suite {name!r}")
        lines.extend(rep.lines())
        ok = ok and rep.ok
    lines.append("RESULT " + ("OK" if ok else "FAILED"))
    return lines, ok
