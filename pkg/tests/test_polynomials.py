"""Classical measure of integer polynomials, the zero test, surd minimal polynomials."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product

import mpmath
import pytest

from mahlerx.errors import ToleranceUnreachable
from mahlerx.intervals import PrecisionPolicy
from mahlerx.polynomials import (
    IntPolynomial,
    cyclotomic,
    format_polynomial,
    is_kronecker,
    mahler_measure_poly,
    parse_polynomial,
    surd_min_poly,
)

mpmath.mp.dps = 60

LEHMER = "x^10+x^9-x^7-x^6-x^5-x^4-x^3+x+1"


def measure_oracle(coeffs_const_first, dps: int = 60) -> mpmath.mpf:
    """Independent root-based evaluation: log|lead| + sum log+ |roots|."""
    with mpmath.workdps(dps):
        desc = [mpmath.mpf(c) for c in reversed(coeffs_const_first)]
        # strip zero roots for the solver; they contribute nothing
        tail = 0
        while desc and desc[-1] == 0:
            desc.pop()
            tail += 1
        total = mpmath.log(abs(desc[0]))
        if len(desc) > 1:
            roots = mpmath.polyroots(desc, maxsteps=300, extraprec=300)
            for r in roots:
                m = abs(r)
                if m > 1:
                    total += mpmath.log(m)
        return total


def test_parse_and_format_round_trip():
    f = parse_polynomial(LEHMER)
    assert f.coefficients == (1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1)
    assert format_polynomial(f) == LEHMER
    assert parse_polynomial(format_polynomial(f)) == f
    assert parse_polynomial("[1,1,0,-1,-1,-1,-1,-1,0,1,1]") == f
    assert parse_polynomial("2x - 1").coefficients == (-1, 2)
    assert parse_polynomial("x^2") .coefficients == (0, 0, 1)
    assert parse_polynomial("-x+3").coefficients == (3, -1)


def test_parse_rejects_garbage():
    for bad in ("", "[]", "x^", "x**2", "[1,,2]", "y+1", "x^2 2"):
        with pytest.raises(ValueError):
            parse_polynomial(bad)


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        IntPolynomial(())
    with pytest.raises(ValueError):
        IntPolynomial((0, 0))


def test_measure_frozen_examples():
    # Lehmer's degree-10 polynomial; digits locked in by the root oracle above
    res = mahler_measure_poly(parse_polynomial(LEHMER), Fraction(1, 10**9))
    assert not res.is_exact_zero
    assert float(res.value.width()) <= 1e-9
    assert res.value.contains(Fraction(
        "0.16235761200773813943219880355496580770786270030620720631666878748896907139205962"))

    res = mahler_measure_poly(parse_polynomial("x-2"), Fraction(1, 10**6))
    assert res.value.contains(Fraction("0.69314718055994530941723212145817656807550013436025525412068"))

    res = mahler_measure_poly(parse_polynomial("x^2-x+1"), Fraction(1, 10**12))
    assert res.is_exact_zero and res.value.is_point() and res.value.contains(0)

    res = mahler_measure_poly(parse_polynomial("2x-1"), Fraction(1, 10**6))
    assert res.value.contains(Fraction("0.69314718055994530941723212145817656807550013436025525412068"))


def test_measure_agrees_with_root_oracle_on_random_polys():
    rng = random.Random(7)
    for _ in range(40):
        deg = rng.randint(1, 6)
        coeffs = [rng.randint(-9, 9) for _ in range(deg)] + [rng.choice([-3, -2, -1, 1, 2, 3])]
        f = IntPolynomial(tuple(coeffs))
        res = mahler_measure_poly(f, Fraction(1, 10**8))
        want = measure_oracle(f.coefficients)
        assert float(res.value.lo) - 1e-12 <= want <= float(res.value.hi) + 1e-12, f


def test_measure_additive_over_products():
    rng = random.Random(11)
    for _ in range(100):
        f = IntPolynomial(tuple(rng.randint(-5, 5) for _ in range(rng.randint(1, 6))) + (rng.choice([1, 2, -1]),))
        g = IntPolynomial(tuple(rng.randint(-5, 5) for _ in range(rng.randint(1, 6))) + (rng.choice([1, -2, 3]),))
        tol = Fraction(1, 10**8)
        mf = mahler_measure_poly(f, tol).value
        mg = mahler_measure_poly(g, tol).value
        mfg = mahler_measure_poly(f * g, tol).value
        assert float(mfg.lo) <= float(mf.hi) + float(mg.hi) + 1e-7
        assert float(mfg.hi) >= float(mf.lo) + float(mg.lo) - 1e-7


def test_measure_nonnegative_and_reciprocal_invariant():
    rng = random.Random(13)
    for _ in range(60):
        coeffs = [rng.choice([-2, -1, 1, 2])] + [rng.randint(-4, 4) for _ in range(rng.randint(0, 5))] \
            + [rng.choice([-2, -1, 1, 2])]
        f = IntPolynomial(tuple(coeffs))
        res = mahler_measure_poly(f, Fraction(1, 10**7))
        assert res.value.lo >= 0
        rev = mahler_measure_poly(f.reversed(), Fraction(1, 10**7))
        assert float(rev.value.lo) <= float(res.value.hi) + 1e-6
        assert float(rev.value.hi) >= float(res.value.lo) - 1e-6


def test_kronecker_examples():
    assert is_kronecker(parse_polynomial("x^2-x+1"))
    assert is_kronecker(parse_polynomial("x^3+x"))       # x (x^2 + 1)
    assert not is_kronecker(parse_polynomial("x-2"))
    assert is_kronecker(parse_polynomial("x-1"))
    assert is_kronecker(parse_polynomial("x+1"))
    assert not is_kronecker(parse_polynomial("2x-1"))
    assert not is_kronecker(parse_polynomial(LEHMER))


def test_cyclotomic_construction():
    assert cyclotomic(1).coefficients == (-1, 1)
    assert cyclotomic(2).coefficients == (1, 1)
    assert cyclotomic(6).coefficients == (1, -1, 1)
    assert cyclotomic(12).coefficients == (1, 0, -1, 0, 1)
    prod = cyclotomic(1)
    for n in (2, 3, 6):
        prod = prod * cyclotomic(n)
    # product over divisors of 6 gives x^6 - 1
    assert prod.coefficients == (-1, 0, 0, 0, 0, 0, 1)


def test_kronecker_iff_zero_measure_exhaustive_pm1():
    # every polynomial with all coefficients in {-1, +1} and degree <= 8
    for deg in range(0, 9):
        for coeffs in product((-1, 1), repeat=deg + 1):
            f = IntPolynomial(coeffs)
            flag = is_kronecker(f)
            res = mahler_measure_poly(f, Fraction(1, 10**12))
            assert flag == res.is_exact_zero, f
            point_zero = res.value.is_point() and res.value.contains(0)
            assert flag == point_zero, f
            if not flag:
                assert res.value.lo > 0, f


def test_surd_min_poly_examples():
    assert surd_min_poly(Fraction(8), 2).coefficients == (-8, 0, 1)
    assert surd_min_poly(Fraction(2), 1).coefficients == (-2, 1)
    # the pair (4, 2) reduces: the square root of 4 is the rational 2
    assert surd_min_poly(Fraction(4), 2).coefficients == (-2, 1)
    assert surd_min_poly(Fraction(1), 12).coefficients == (-1, 1)
    assert surd_min_poly(Fraction(3, 2), 3).coefficients == (-3, 0, 0, 2)
    assert surd_min_poly(Fraction(27, 8), 6).coefficients == (-3, 0, 2)


def test_surd_min_poly_vanishes_at_the_surd():
    rng = random.Random(17)
    for _ in range(50):
        q = Fraction(rng.randint(1, 60), rng.randint(1, 60))
        L = rng.randint(1, 6)
        f = surd_min_poly(q, L)
        root = mpmath.power(mpmath.mpf(q.numerator) / q.denominator, mpmath.mpf(1) / L)
        val = mpmath.polyval([mpmath.mpf(c) for c in reversed(f.coefficients)], root)
        scale = max(abs(c) for c in f.coefficients) * max(1, root) ** f.degree
        assert abs(val) / scale < mpmath.mpf("1e-45")
        assert f.leading > 0
        # degree equals the reduced root index: q^(1/d) rational for d = L/deg
        d = L // f.degree
        assert L % f.degree == 0
        num_root = mpmath.power(mpmath.mpf(q.numerator), mpmath.mpf(1) / d)
        assert abs(num_root - mpmath.nint(num_root)) < mpmath.mpf("1e-40")


def test_tolerance_unreachable():
    policy = PrecisionPolicy(start_bits=64, max_bits=128)
    with pytest.raises(ToleranceUnreachable):
        mahler_measure_poly(parse_polynomial("x-2"), Fraction(1, 10**200), policy)
    with pytest.raises(ToleranceUnreachable):
        mahler_measure_poly(parse_polynomial(LEHMER), Fraction(1, 10**200), policy)
