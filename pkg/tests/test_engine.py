"""The x-metric search engine: combiner, certified search, thresholds, curves."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from mahlerx.engine import (
    CAPPED_UPPER_BOUND,
    CERTIFIED,
    CurvePoint,
    Factorization,
    SearchConfig,
    XParameter,
    combine_x,
    continuity_check,
    default_grid,
    m0_check,
    mx_curve,
    mx_search,
    rational_below_threshold,
    smallp_threshold,
    weil_hx,
    weil_hx_upper,
)
from mahlerx.errors import PrecisionExhausted, UnsupportedTarget
from mahlerx.exact import LogReal, LogValue
from mahlerx.intervals import (
    Const,
    GREATER,
    IntervalReal,
    LESS,
    PowReal,
    PrecisionPolicy,
    ProductReal,
    TIE,
    refine_compare,
)
from mahlerx.radq import ExponentVector, ev_from_rational, mbar_ev

X_HALF = XParameter.finite(Fraction(1, 2))
X_ONE = XParameter.finite(1)
X_TWO = XParameter.finite(2)
X_INF = XParameter.infinity()


def ev(pairs) -> ExponentVector:
    return ExponentVector.from_pairs({p: Fraction(e) for p, e in pairs.items()})


def test_xparameter_parsing():
    assert XParameter.parse("1/2").value == Fraction(1, 2)
    assert XParameter.parse("inf").is_infinite
    assert str(XParameter.parse("3")) == "3"
    with pytest.raises(ValueError):
        XParameter.parse("0")
    with pytest.raises(ValueError):
        XParameter.parse("-2")


def test_combine_examples():
    log2 = LogValue({2: Fraction(1)})
    both = [log2, log2]
    assert refine_compare(combine_x(both, X_ONE), LogReal(LogValue({2: Fraction(2)}))) == TIE
    assert refine_compare(combine_x(both, X_INF), LogReal(log2)) == TIE
    assert float(combine_x([], X_TWO).enclosure(64).hi) == 0.0
    mixed = combine_x([LogValue({2: Fraction(2)}), LogValue({3: Fraction(1)})], X_TWO)
    assert mixed.enclosure(128).contains(
        Fraction("1.7688304091928620154887311958626696723775480667377540615813"))


def test_search_examples_from_small_collapse():
    res = mx_search(ev_from_rational(4), X_HALF)
    assert str(res.witness) == "[2^2]"
    assert res.certificate == CERTIFIED
    assert refine_compare(res.value_real, LogReal(LogValue({2: Fraction(2)}))) == TIE
    assert res.exact_form == "2*log(2)"


def test_search_split_at_x_two_with_denominator_two():
    res = mx_search(ev_from_rational(4), X_TWO, SearchConfig(denominator_bound=2))
    assert [str(t) for t in res.witness.terms] == ["2^1", "2^1"]
    assert res.certificate == CERTIFIED
    assert res.value.contains(Fraction(
        "0.980258143468547191713901723635233381291460699099054721042246"))
    assert res.exact_form == "2^(1/2)*(log(2))"


def test_search_ultrametric_example():
    res = mx_search(ev_from_rational(12), X_INF)
    assert [str(t) for t in res.witness.terms] == ["2^1", "2^1", "3^1"]
    assert res.certificate == CERTIFIED
    assert refine_compare(res.value_real, LogReal(LogValue({3: Fraction(1)}))) == TIE
    assert res.exact_form == "log(3)"


def test_search_identity_and_validation():
    res = mx_search(ExponentVector.identity(), X_ONE)
    assert len(res.witness) == 0 and res.value.contains(0) and res.exact_form == "0"
    with pytest.raises(UnsupportedTarget):
        mx_search(ev({2: Fraction(1, 2)}), X_ONE, SearchConfig(denominator_bound=1))
    # fractional targets work once the lattice includes them
    res = mx_search(ev({2: Fraction(1, 2)}), X_ONE, SearchConfig(denominator_bound=2))
    assert str(res.witness) == "[2^(1/2)]"


def test_search_capped_certificate_when_cap_binds():
    # 2^10 wants ten singleton terms at the max combiner; the default cap is 8
    res = mx_search(ev_from_rational(1024), X_INF)
    assert res.certificate == CAPPED_UPPER_BOUND
    relaxed = mx_search(ev_from_rational(1024), X_INF, SearchConfig(infinity_term_cap=12))
    assert relaxed.certificate == CERTIFIED
    assert len(relaxed.witness) == 10
    assert refine_compare(relaxed.value_real, LogReal(LogValue({2: Fraction(1)}))) == TIE


def test_search_override_cap_downgrades_finite_certificate():
    res = mx_search(ev_from_rational(12), X_TWO, SearchConfig(max_terms_override=1))
    assert res.certificate == CAPPED_UPPER_BOUND
    assert str(res.witness) == "[2^2 * 3^1]"


def test_c_override_flags_non_certified():
    res = mx_search(ev_from_rational(4), X_TWO, SearchConfig(c_override=Fraction(1, 2)))
    assert res.certificate == CAPPED_UPPER_BOUND
    assert res.value.contains(Fraction("0.980258143468547191713901723635233381291460699099054721042246"))


def test_precision_exhausted_propagates():
    policy = PrecisionPolicy(start_bits=16, max_bits=16, tie_eps=Fraction(1, 2**200))
    with pytest.raises(PrecisionExhausted):
        mx_search(ev_from_rational(4), X_ONE, SearchConfig(precision=policy))


def _random_target(rng: random.Random) -> ExponentVector:
    pairs = {}
    for p, span in ((2, 2), (3, 2), (5, 1)):
        e = rng.randint(-span, span)
        if e:
            pairs[p] = Fraction(e)
    if not pairs:
        pairs[2] = Fraction(1)
    return ev(pairs)


def test_witness_validity_and_value_bounds_fuzz():
    rng = random.Random(5)
    xs = [X_HALF, X_ONE, X_TWO, X_INF]
    c = LogValue({2: Fraction(1)})
    for _ in range(40):
        target = _random_target(rng)
        x = rng.choice(xs)
        res = mx_search(target, x)
        # witness terms multiply back to the target, none trivial, canonical order
        assert res.witness.product().entries == target.entries
        keys = [(mbar_ev(t), t.entries) for t in res.witness.terms]
        assert keys == sorted(keys)
        assert all(not t.is_identity() for t in res.witness.terms)
        # never exceeds the one-term value
        assert refine_compare(res.value_real, LogReal(mbar_ev(target))) != GREATER
        # the per-term floor: one term costs at least log 2, two cost 2^(1/x) more
        if len(res.witness) == 1:
            assert refine_compare(res.value_real, LogReal(c)) != LESS
        elif not x.is_infinite:
            floor = ProductReal(PowReal(Const(2), 1 / x.value), LogReal(c))
            assert refine_compare(res.value_real, floor) != LESS


def test_witness_term_count_bound():
    rng = random.Random(19)
    for _ in range(25):
        target = _random_target(rng)
        for x in (X_HALF, X_ONE, X_TWO):
            res = mx_search(target, x)
            bound = float(mbar_ev(target).eval(64).hi)
            cap = 1 + (bound / 0.6931471805599452) ** float(x.value)
            assert len(res.witness) <= cap + 1e-9


def test_inverse_symmetry():
    rng = random.Random(43)
    for _ in range(25):
        target = _random_target(rng)
        x = rng.choice([X_HALF, X_ONE, X_TWO, X_INF])
        plus = mx_search(target, x)
        minus = mx_search(-target, x)
        assert refine_compare(plus.value_real, minus.value_real) == TIE
        negated = sorted((-t).entries for t in minus.witness.terms)
        assert negated == sorted(t.entries for t in plus.witness.terms)


def test_pruning_soundness_against_explicit_factorizations():
    # the returned value never exceeds any explicitly constructed factorization
    rng = random.Random(3)
    for target_n in (4, 12, 18, 30):
        target = ev_from_rational(target_n)
        for x in (X_HALF, X_ONE, X_TWO, X_INF):
            res = mx_search(target, x)
            for _ in range(125):
                pieces = []
                rest = target
                for _ in range(rng.randint(1, 3)):
                    chip = {}
                    for p, e in rest.entries:
                        if rng.random() < 0.5 and e != 0:
                            step = rng.randint(1, 2) * (1 if e > 0 else -1)
                            chip[p] = Fraction(step)
                    if chip:
                        piece = ev(chip)
                        pieces.append(piece)
                        rest = rest - piece
                if not rest.is_identity():
                    pieces.append(rest)
                pieces = [t for t in pieces if not t.is_identity()]
                if not pieces:
                    continue
                explicit = combine_x([mbar_ev(t) for t in pieces], x)
                assert refine_compare(res.value_real, explicit) != GREATER


def _small_target(rng: random.Random) -> ExponentVector:
    pairs = {}
    for p in (2, 3):
        e = rng.randint(-2, 2)
        if e:
            pairs[p] = Fraction(e)
    if not pairs:
        pairs[3] = Fraction(1)
    return ev(pairs)


def test_triangle_inequality_of_results():
    rng = random.Random(47)
    for _ in range(15):
        u = _small_target(rng)
        v = _small_target(rng)
        w = u + v
        if w.is_identity():
            continue
        for x in (X_HALF, X_ONE, X_TWO, X_INF):
            ru = mx_search(u, x)
            rv = mx_search(v, x)
            rw = mx_search(w, x)
            rhs = combine_x([ru.value_real, rv.value_real], x)
            assert refine_compare(rw.value_real, rhs) != GREATER


def test_tie_break_prefers_fewest_terms():
    # at x = 1 the one-term and two-term splits of 4 have exactly equal value
    res = mx_search(ev_from_rational(4), X_ONE)
    assert str(res.witness) == "[2^2]"
    assert res.exact_form == "2*log(2)"


def test_threshold_examples():
    iv = smallp_threshold(ev_from_rational(4))
    assert iv is not None and iv.contains(1)
    iv = smallp_threshold(ev_from_rational(9))
    assert iv is not None
    assert iv.contains(Fraction("0.600799529310640073767924970527229774754192160122102016864323"))
    assert smallp_threshold(ev_from_rational(2)) is None
    x = rational_below_threshold(ev_from_rational(4), Fraction(9, 10))
    assert x is not None and 0 < x < 1


def test_collapse_below_threshold_single_witness():
    for n in (4, 9, 12, 25):
        target = ev_from_rational(n)
        x = rational_below_threshold(target, Fraction(9, 10))
        res = mx_search(target, XParameter.finite(x))
        assert len(res.witness) == 1
        assert refine_compare(res.value_real, LogReal(mbar_ev(target))) == TIE


def test_m0_check_examples():
    assert m0_check(ev_from_rational(4)).ok
    assert m0_check(ev_from_rational(12)).ok
    assert m0_check(ev_from_rational(2)).ok  # infinite threshold path
    assert m0_check(ExponentVector.identity()).ok


def test_curve_shapes():
    grid = [Fraction(1, 2), Fraction(1), Fraction(2)]
    points = mx_curve(ev_from_rational(4), grid)
    assert [str(p.witness) for p in points] == ["[2^2]", "[2^2]", "[2^1, 2^1]"]
    assert points[0].value.contains(Fraction("1.38629436111989061883446424291635313615100026872051050824136"))
    assert points[2].value.contains(Fraction("0.980258143468547191713901723635233381291460699099054721042246"))

    flat = mx_curve(ev_from_rational(2), [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)])
    for p in flat:
        assert p.value.contains(Fraction("0.69314718055994530941723212145817656807550013436025525412068"))

    zeros = mx_curve(ExponentVector.identity(), grid)
    assert all(p.value.contains(0) for p in zeros)


def test_curve_rejects_bad_grids():
    with pytest.raises(ValueError):
        mx_curve(ev_from_rational(4), [Fraction(2), Fraction(1)])
    with pytest.raises(ValueError):
        mx_curve(ev_from_rational(4), [Fraction(0), Fraction(1)])
    assert len(default_grid()) == 76


def test_continuity_check_passes_on_true_curves():
    grid = [Fraction(1) + Fraction(k, 4) for k in range(5)]  # 1 .. 2
    target = ev_from_rational(4)
    report = continuity_check(mx_curve(target, grid), target)
    assert report.ok

    flat_target = ev_from_rational(2)
    report = continuity_check(mx_curve(flat_target, grid), flat_target)
    assert report.ok


def test_continuity_check_flags_synthetic_jump():
    target = ev_from_rational(2)
    grid = [Fraction(1), Fraction(3, 2)]
    curve = mx_curve(target, grid)
    bumped = [curve[0], CurvePoint(curve[1].x, mbar_ev(ev_from_rational(4)).eval(128),
                                   curve[1].witness)]
    report = continuity_check(bumped, target)
    assert not report.ok


def test_weil_hx_closed_form():
    e = ev_from_rational(2)
    assert refine_compare(weil_hx(e, X_ONE), LogReal(LogValue({2: Fraction(1)}))) == TIE
    assert refine_compare(weil_hx(e, X_TWO), Const(0)) == TIE
    assert refine_compare(weil_hx(e, X_INF), Const(0)) == TIE
    assert refine_compare(weil_hx(ExponentVector.identity(), X_ONE), Const(0)) == TIE


def test_weil_hx_upper_examples():
    e = ev_from_rational(2)
    half_log2 = LogValue({2: Fraction(1, 2)})
    got = weil_hx_upper(e, X_TWO, 4)
    assert refine_compare(IntervalReal(got), LogReal(half_log2)) == TIE
    got = weil_hx_upper(e, X_TWO, 1)
    assert refine_compare(IntervalReal(got), LogReal(LogValue({2: Fraction(1)}))) == TIE
    tiny = weil_hx_upper(e, X_TWO, 10**6)
    bound = ProductReal(Const(Fraction(1, 1000)), LogReal(LogValue({2: Fraction(1)})))
    assert refine_compare(IntervalReal(tiny), bound) != GREATER
    with pytest.raises(ValueError):
        weil_hx_upper(e, X_ONE, 4)
    with pytest.raises(ValueError):
        weil_hx_upper(e, X_TWO, 0)


def test_factorization_validation():
    with pytest.raises(ValueError):
        Factorization.of([ExponentVector.identity()])
    f = Factorization.of([ev({3: 1}), ev({2: 1})])
    assert [str(t) for t in f.terms] == ["2^1", "3^1"]
