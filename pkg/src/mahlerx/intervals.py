"""Directed-rounding interval arithmetic and adaptive certified comparison.

Endpoints are MPFR floats (via gmpy2).  Every elementary operation rounds the
lower endpoint toward -inf and the upper endpoint toward +inf, so an interval
produced from enclosures of its operands always contains the exact real result.
Refining the working precision can only shrink intervals produced from exact
inputs, never move the true value outside.

On top of the raw intervals sits a tiny expression layer (`LazyReal`): a node
knows how to evaluate itself to an enclosure at any requested precision.  All
inexact comparisons in the package go through `refine_compare`, which evaluates
both sides at increasing precision until the enclosures separate, and reports a
tie only when they still overlap at the precision ceiling while both are
already narrower than the tie tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import PrecisionExhausted

Ordering = int
LESS: Ordering = -1
TIE: Ordering = 0
GREATER: Ordering = 1

_EMAX = gmpy2.get_emax_max()
_EMIN = gmpy2.get_emin_min()

# context cache: bits -> (round-down ctx, round-up ctx)
_CTX_CACHE: dict[int, tuple[gmpy2.context, gmpy2.context]] = {}


def _contexts(bits: int) -> tuple[gmpy2.context, gmpy2.context]:
    try:
        return _CTX_CACHE[bits]
    except KeyError:
        dn = gmpy2.context(precision=bits, round=gmpy2.RoundDown, emax=_EMAX, emin=_EMIN)
        up = gmpy2.context(precision=bits, round=gmpy2.RoundUp, emax=_EMAX, emin=_EMIN)
        _CTX_CACHE[bits] = (dn, up)
        return dn, up


ExactScalar = Union[int, Fraction, mpq]


def _as_exact(x: ExactScalar) -> Union[int, mpq]:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return x


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with MPFR endpoints; the true value lies inside."""

    lo: mpfr
    hi: mpfr
    bits: int

    def __post_init__(self) -> None:
        if not self.lo <= self.hi:
            raise ValueError(f"inverted interval [{self.lo}, {self.hi}]")

    def width(self) -> mpfr:
        up = _contexts(self.bits)[1]
        return up.sub(self.hi, self.lo)

    def contains(self, x: ExactScalar) -> bool:
        x = _as_exact(x)
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    def strictly_below(self, other: "Interval") -> bool:
        return self.hi < other.lo

    def midpoint_fraction(self) -> Fraction:
        """Exact dyadic midpoint (endpoints are dyadic rationals)."""
        lo = Fraction(*self.lo.as_integer_ratio())
        hi = Fraction(*self.hi.as_integer_ratio())
        return (lo + hi) / 2

    def lo_fraction(self) -> Fraction:
        return Fraction(*self.lo.as_integer_ratio())

    def hi_fraction(self) -> Fraction:
        return Fraction(*self.hi.as_integer_ratio())

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


class IntervalContext:
    """All interval operations at one working precision, rounding outward."""

    def __init__(self, bits: int):
        if bits < 2:
            raise ValueError("precision must be at least 2 bits")
        self.bits = bits
        self._dn, self._up = _contexts(bits)

    # -- constructors --------------------------------------------------

    def zero(self) -> Interval:
        z = mpfr(0)
        return Interval(z, z, self.bits)

    def from_exact(self, x: ExactScalar) -> Interval:
        x = _as_exact(x)
        zero = mpfr(0)
        return Interval(self._dn.add(zero, x), self._up.add(zero, x), self.bits)

    def point(self, x: mpfr) -> Interval:
        return Interval(x, x, self.bits)

    # -- arithmetic ----------------------------------------------------

    def add(self, a: Interval, b: Interval) -> Interval:
        return Interval(self._dn.add(a.lo, b.lo), self._up.add(a.hi, b.hi), self.bits)

    def sub(self, a: Interval, b: Interval) -> Interval:
        return Interval(self._dn.sub(a.lo, b.hi), self._up.sub(a.hi, b.lo), self.bits)

    def neg(self, a: Interval) -> Interval:
        return Interval(-a.hi, -a.lo, self.bits)

    def sum(self, items: Sequence[Interval]) -> Interval:
        lo = mpfr(0)
        hi = mpfr(0)
        for it in items:
            lo = self._dn.add(lo, it.lo)
            hi = self._up.add(hi, it.hi)
        return Interval(lo, hi, self.bits)

    def mul(self, a: Interval, b: Interval) -> Interval:
        dn, up = self._dn, self._up
        lo = min(dn.mul(a.lo, b.lo), dn.mul(a.lo, b.hi), dn.mul(a.hi, b.lo), dn.mul(a.hi, b.hi))
        hi = max(up.mul(a.lo, b.lo), up.mul(a.lo, b.hi), up.mul(a.hi, b.lo), up.mul(a.hi, b.hi))
        return Interval(lo, hi, self.bits)

    def mul_exact(self, a: Interval, c: ExactScalar) -> Interval:
        c = _as_exact(c)
        if c >= 0:
            return Interval(self._dn.mul(a.lo, c), self._up.mul(a.hi, c), self.bits)
        return Interval(self._dn.mul(a.hi, c), self._up.mul(a.lo, c), self.bits)

    def div(self, a: Interval, b: Interval) -> Interval:
        if b.lo <= 0 <= b.hi:
            raise ZeroDivisionError("division by an interval containing zero")
        dn, up = self._dn, self._up
        lo = min(dn.div(a.lo, b.lo), dn.div(a.lo, b.hi), dn.div(a.hi, b.lo), dn.div(a.hi, b.hi))
        hi = max(up.div(a.lo, b.lo), up.div(a.lo, b.hi), up.div(a.hi, b.lo), up.div(a.hi, b.hi))
        return Interval(lo, hi, self.bits)

    def sqr(self, a: Interval) -> Interval:
        dn, up = self._dn, self._up
        if a.lo >= 0:
            return Interval(dn.mul(a.lo, a.lo), up.mul(a.hi, a.hi), self.bits)
        if a.hi <= 0:
            return Interval(dn.mul(a.hi, a.hi), up.mul(a.lo, a.lo), self.bits)
        return Interval(mpfr(0), max(up.mul(a.lo, a.lo), up.mul(a.hi, a.hi)), self.bits)

    def scale_2exp(self, a: Interval, n: int) -> Interval:
        # multiplication by 2^n only shifts the exponent, so the directed
        # context operations are exact here; the module-level gmpy2 helpers
        # would silently round to the 53-bit global context instead
        if n >= 0:
            lo = self._dn.mul_2exp(a.lo, n)
            hi = self._up.mul_2exp(a.hi, n)
        else:
            lo = self._dn.div_2exp(a.lo, -n)
            hi = self._up.div_2exp(a.hi, -n)
        return Interval(lo, hi, self.bits)

    # -- elementary functions -------------------------------------------

    def log(self, a: Interval) -> Interval:
        if a.lo <= 0:
            raise ValueError("log of an interval touching (-inf, 0]")
        return Interval(self._dn.log(a.lo), self._up.log(a.hi), self.bits)

    def log_int(self, n: int) -> Interval:
        if n < 1:
            raise ValueError("log_int needs a positive integer")
        x = self.from_exact(n)
        if n == 1:
            return self.zero()
        return self.log(x)

    def exp(self, a: Interval) -> Interval:
        return Interval(self._dn.exp(a.lo), self._up.exp(a.hi), self.bits)

    def pow_exact(self, a: Interval, q: ExactScalar) -> Interval:
        """a^q for exact rational q; requires a >= 0, and a > 0 when q < 0."""
        q = _as_exact(q)
        if q == 0:
            one = mpfr(1)
            return Interval(one, one, self.bits)
        if isinstance(q, int) or (isinstance(q, mpq) and q.denominator == 1):
            k = int(q)
            if k > 0 and k == 2:
                if a.lo >= 0:
                    return self.sqr(a)
        if a.lo < 0:
            raise ValueError("pow_exact needs a nonnegative base interval")
        dn, up = self._dn, self._up
        if q > 0:
            # x^q is increasing for x >= 0
            if a.hi == 0:
                z = mpfr(0)
                return Interval(z, z, self.bits)
            lo = mpfr(0) if a.lo == 0 else dn.exp(dn.mul(q, dn.log(a.lo)))
            hi = up.exp(up.mul(q, up.log(a.hi)))
            return Interval(lo, hi, self.bits)
        # q < 0: x^q decreasing, base must be strictly positive
        if a.lo == 0:
            raise ZeroDivisionError("negative power of an interval touching zero")
        lo = dn.exp(dn.mul(q, up.log(a.hi)))
        hi = up.exp(up.mul(q, dn.log(a.lo)))
        return Interval(lo, hi, self.bits)

    def max(self, a: Interval, b: Interval) -> Interval:
        return Interval(max(a.lo, b.lo), max(a.hi, b.hi), self.bits)

    def clamp_lo(self, a: Interval, floor: ExactScalar) -> Interval:
        """Intersect with [floor, +inf); the true value is known to be >= floor."""
        floor = _as_exact(floor)
        zero = mpfr(0)
        f = self._dn.add(zero, floor)
        if a.lo >= f:
            return a
        return Interval(f, a.hi if a.hi >= f else f, self.bits)


@dataclass(frozen=True)
class PrecisionPolicy:
    """Adaptive-precision schedule used by every certified comparison."""

    start_bits: int = 128
    max_bits: int = 1024
    tie_eps: Fraction = Fraction(1, 2**64)

    def __post_init__(self) -> None:
        if self.start_bits < 2 or self.start_bits > self.max_bits:
            raise ValueError("need 2 <= start_bits <= max_bits")
        if self.tie_eps <= 0:
            raise ValueError("tie_eps must be positive")

    def ladder(self) -> list[int]:
        bits = [self.start_bits]
        while bits[-1] < self.max_bits:
            bits.append(min(2 * bits[-1], self.max_bits))
        return bits


DEFAULT_POLICY = PrecisionPolicy()


# ---------------------------------------------------------------------------
# Lazily evaluable reals
# ---------------------------------------------------------------------------

class LazyReal:
    """A real number that can be enclosed at any requested precision.

    Subclasses implement `_eval`; enclosures are memoized per precision so that
    repeated comparisons against the same node stay cheap.
    """

    __slots__ = ("_cache",)

    def __init__(self) -> None:
        self._cache: dict[int, Interval] = {}

    def enclosure(self, bits: int) -> Interval:
        iv = self._cache.get(bits)
        if iv is None:
            iv = self._eval(bits)
            self._cache[bits] = iv
        return iv

    def _eval(self, bits: int) -> Interval:
        raise NotImplementedError


class Const(LazyReal):
    """An exact rational constant."""

    __slots__ = ("value",)

    def __init__(self, value: Union[int, Fraction]):
        super().__init__()
        self.value = Fraction(value)

    def _eval(self, bits: int) -> Interval:
        return IntervalContext(bits).from_exact(self.value)

    def __repr__(self) -> str:
        return f"Const({self.value})"


class SumReal(LazyReal):
    __slots__ = ("terms",)

    def __init__(self, terms: Sequence[LazyReal]):
        super().__init__()
        self.terms = tuple(terms)

    def _eval(self, bits: int) -> Interval:
        ctx = IntervalContext(bits)
        return ctx.sum([t.enclosure(bits) for t in self.terms])


class DiffReal(LazyReal):
    __slots__ = ("a", "b")

    def __init__(self, a: LazyReal, b: LazyReal):
        super().__init__()
        self.a, self.b = a, b

    def _eval(self, bits: int) -> Interval:
        ctx = IntervalContext(bits)
        return ctx.sub(self.a.enclosure(bits), self.b.enclosure(bits))


class ProductReal(LazyReal):
    __slots__ = ("a", "b")

    def __init__(self, a: LazyReal, b: LazyReal):
        super().__init__()
        self.a, self.b = a, b

    def _eval(self, bits: int) -> Interval:
        ctx = IntervalContext(bits)
        return ctx.mul(self.a.enclosure(bits), self.b.enclosure(bits))


class QuotientReal(LazyReal):
    __slots__ = ("a", "b")

    def __init__(self, a: LazyReal, b: LazyReal):
        super().__init__()
        self.a, self.b = a, b

    def _eval(self, bits: int) -> Interval:
        ctx = IntervalContext(bits)
        return ctx.div(self.a.enclosure(bits), self.b.enclosure(bits))


class PowReal(LazyReal):
    """base^exponent with an exact rational exponent and nonnegative base."""

    __slots__ = ("base", "exponent")

    def __init__(self, base: LazyReal, exponent: Union[int, Fraction]):
        super().__init__()
        self.base = base
        self.exponent = Fraction(exponent)

    def _eval(self, bits: int) -> Interval:
        ctx = IntervalContext(bits)
        # guard digits: the outer power magnifies relative error by ~|exponent|
        inner_bits = bits + max(8, self.exponent.numerator.bit_length()
                                + self.exponent.denominator.bit_length() + 8)
        base = self.base.enclosure(inner_bits)
        base = IntervalContext(inner_bits).clamp_lo(base, 0) if base.lo < 0 else base
        iv = IntervalContext(inner_bits).pow_exact(base, self.exponent)
        return Interval(ctx._dn.add(mpfr(0), iv.lo), ctx._up.add(mpfr(0), iv.hi), bits)


class LogOfReal(LazyReal):
    """Natural log of a positive lazily-evaluable real."""

    __slots__ = ("arg",)

    def __init__(self, arg: LazyReal):
        super().__init__()
        self.arg = arg

    def _eval(self, bits: int) -> Interval:
        ctx = IntervalContext(bits)
        return ctx.log(self.arg.enclosure(bits))


class MaxReal(LazyReal):
    __slots__ = ("items",)

    def __init__(self, items: Sequence[LazyReal]):
        super().__init__()
        if not items:
            raise ValueError("MaxReal needs at least one item")
        self.items = tuple(items)

    def _eval(self, bits: int) -> Interval:
        ctx = IntervalContext(bits)
        out = self.items[0].enclosure(bits)
        for it in self.items[1:]:
            out = ctx.max(out, it.enclosure(bits))
        return out


class IntervalReal(LazyReal):
    """A real known only through a fixed enclosure (cannot be refined further)."""

    __slots__ = ("interval",)

    def __init__(self, interval: Interval):
        super().__init__()
        self.interval = interval

    def _eval(self, bits: int) -> Interval:
        return self.interval


ZERO = Const(0)
ONE = Const(1)


# ---------------------------------------------------------------------------
# Certified comparison
# ---------------------------------------------------------------------------

@dataclass
class CompareStats:
    """Optional instrumentation for adaptive comparisons."""

    calls: int = 0
    max_bits_used: int = 0

    def record(self, bits: int) -> None:
        self.calls += 1
        if bits > self.max_bits_used:
            self.max_bits_used = bits


def refine_compare(
    a: LazyReal,
    b: LazyReal,
    policy: PrecisionPolicy = DEFAULT_POLICY,
    stats: Optional[CompareStats] = None,
) -> Ordering:
    """Compare two lazily-evaluable reals with certified directed enclosures.

    Returns LESS or GREATER only once the enclosures are disjoint at some
    precision not exceeding ``policy.max_bits``.  Returns TIE when, at the
    precision ceiling, the enclosures still overlap but both are narrower than
    ``policy.tie_eps`` (downstream code treats a tie as equality).  Raises
    PrecisionExhausted otherwise.  Deterministic for fixed inputs and policy.
    """
    last_bits = policy.start_bits
    for bits in policy.ladder():
        last_bits = bits
        ia = a.enclosure(bits)
        ib = b.enclosure(bits)
        if stats is not None:
            stats.record(bits)
        if ia.hi < ib.lo:
            return LESS
        if ib.hi < ia.lo:
            return GREATER
    eps = mpq(policy.tie_eps.numerator, policy.tie_eps.denominator)
    ia = a.enclosure(last_bits)
    ib = b.enclosure(last_bits)
    if ia.width() < eps and ib.width() < eps:
        return TIE
    raise PrecisionExhausted(
        f"enclosures still overlap at {policy.max_bits} bits with width >= tie_eps"
    )


def compare_sign(a: LazyReal, policy: PrecisionPolicy = DEFAULT_POLICY) -> Ordering:
    """Sign of a lazily-evaluable real: compare against exact zero."""
    return refine_compare(a, ZERO, policy)


def float_approx(a: LazyReal, bits: int = 64) -> float:
    """A plain float close to the value; for display and sorting keys only."""
    iv = a.enclosure(bits)
    return float(iv.lo + (iv.hi - iv.lo) / 2)


# ---------------------------------------------------------------------------
# Directed float64 layer
# ---------------------------------------------------------------------------
# Certified 1-ulp-outward arithmetic on plain floats: IEEE 754 operations
# round to nearest, so nudging the result one ulp outward with nextafter
# yields a sound directed bound at 53 bits.  Search engines use this layer to
# decide the overwhelming majority of pruning comparisons for free.

def next_down(v: float) -> float:
    return math.nextafter(v, -math.inf)


def next_up(v: float) -> float:
    return math.nextafter(v, math.inf)


def float_bounds(iv: Interval) -> tuple[float, float]:
    """Outward-rounded float64 endpoints of a certified interval."""
    dn, up = _contexts(53)
    return float(dn.add(iv.lo, 0)), float(up.add(iv.hi, 0))
