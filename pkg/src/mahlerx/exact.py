"""Exact integer factorization and formal log-prime values.

A `LogValue` is a finite formal sum  sum_p c_p * log(p)  over distinct primes
with positive rational coefficients; it represents every measure and height
value that arises from rationals and surds in this package, exactly.  Ordering
of two such sums is decidable without any floating point: clear denominators
and compare the resulting integer products p1^e1 * p2^e2 * ...
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from .intervals import Interval, IntervalContext, LazyReal

_TRIAL_LIMIT = 10**6
_TRIAL_CERT_BOUND = _TRIAL_LIMIT * _TRIAL_LIMIT
# Deterministic Miller-Rabin witness set, valid for all n < 3317044064679887385961981
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=1)
def _small_primes() -> tuple[int, ...]:
    limit = 1000
    sieve = bytearray(b"\x01") * (limit + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, int(limit**0.5) + 1):
        if sieve[p]:
            start = p * p
            sieve[start:limit + 1:p] = b"\x00" * ((limit - start) // p + 1)
    return tuple(i for i, v in enumerate(sieve) if v)


def is_prime(n: int) -> bool:
    """Deterministic primality test for n < 3.3e24 (fixed Miller-Rabin bases)."""
    if n < 2:
        return False
    for p in _small_primes():
        if n == p:
            return True
        if n % p == 0:
            return False
    if n >= 3317044064679887385961981:
        raise ValueError(f"primality of {n} exceeds the deterministic witness range")
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor_integer(n: int) -> list[tuple[int, int]]:
    """Factor a positive integer into (prime, exponent) pairs, primes ascending.

    Trial division up to 10^6 plus a deterministic primality certificate for
    the remaining cofactor; inputs here are user-chosen desk-scale numbers.
    """
    if n < 1:
        raise ValueError("factor_integer needs n >= 1")
    out: list[tuple[int, int]] = []
    for p in _small_primes():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    if n > 1:
        # continue trial division with odd candidates beyond the prime table
        p = 1009
        while p * p <= n and p <= _TRIAL_LIMIT:
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
            p += 2
        if n > 1:
            if n <= _TRIAL_CERT_BOUND or is_prime(n):
                out.append((n, 1))
            else:
                raise ValueError(f"cofactor {n} is composite and beyond the trial-division range")
    return out


class LogValue:
    """Formal nonnegative combination  sum c_p * log(p)  in nats, exact."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Union[Mapping[int, Fraction], Iterable[tuple[int, Fraction]]] = ()):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        acc: dict[int, Fraction] = {}
        for p, c in items:
            c = Fraction(c)
            if c == 0:
                continue
            acc[p] = acc.get(p, Fraction(0)) + c
        cleaned = []
        for p in sorted(acc):
            c = acc[p]
            if c == 0:
                continue
            if c < 0:
                raise ValueError(f"negative coefficient {c} for prime {p}")
            if p < 2 or not is_prime(p):
                raise ValueError(f"{p} is not a prime")
            cleaned.append((p, c))
        self.terms: tuple[tuple[int, Fraction], ...] = tuple(cleaned)
        self._hash = hash(self.terms)

    @classmethod
    def from_integer(cls, n: int) -> "LogValue":
        """log(n) for a positive integer n, as a formal sum over its prime factors."""
        return cls((p, Fraction(e)) for p, e in factor_integer(n))

    @classmethod
    def log2(cls) -> "LogValue":
        return cls(((2, Fraction(1)),))

    # -- structure -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LogValue) and self.terms == other.terms

    def __hash__(self) -> int:
        return self._hash

    def __add__(self, other: "LogValue") -> "LogValue":
        return LogValue(tuple(self.terms) + tuple(other.terms))

    def scaled(self, c: Union[int, Fraction]) -> "LogValue":
        c = Fraction(c)
        if c < 0:
            raise ValueError("LogValue coefficients must stay nonnegative")
        if c == 0:
            return LogValue()
        return LogValue((p, coef * c) for p, coef in self.terms)

    # -- exact ordering ----------------------------------------------------

    def compare(self, other: "LogValue") -> int:
        """Exact three-way comparison: -1, 0, or 1.

        sum c_p log p <=> sum d_p log p  iff  prod p^(m c_p) <=> prod p^(m d_p)
        for the common denominator m, by strict monotonicity of log.
        """
        if self.terms == other.terms:
            return 0
        m = 1
        for _, c in self.terms:
            m = m * c.denominator // math.gcd(m, c.denominator)
        for _, c in other.terms:
            m = m * c.denominator // math.gcd(m, c.denominator)
        left = 1
        for p, c in self.terms:
            left *= p ** int(c * m)
        right = 1
        for p, c in other.terms:
            right *= p ** int(c * m)
        if left < right:
            return -1
        if left > right:
            return 1
        return 0

    def __lt__(self, other: "LogValue") -> bool:
        return self.compare(other) < 0

    def __le__(self, other: "LogValue") -> bool:
        return self.compare(other) <= 0

    # -- evaluation --------------------------------------------------------

    def eval(self, bits: int) -> Interval:
        """Certified enclosure of the value in nats.

        The result width is at most 2^(3-bits) * (1 + number of terms): the sum
        is evaluated with enough guard bits to absorb the magnitude of the
        coefficients.
        """
        if bits < 2:
            raise ValueError("need bits >= 2")
        if not self.terms:
            return IntervalContext(bits).zero()
        # guard precision absorbs the coefficient magnitudes; the endpoints are
        # kept at the working precision so the width bound holds even for
        # values much larger than one
        mag = 0.0
        for p, c in self.terms:
            mag += float(c) * max(1, p.bit_length())
        guard = max(8, int(math.log2(mag)) + 6 if mag > 1 else 8)
        ctx = IntervalContext(bits + guard)
        total = ctx.zero()
        for p, c in self.terms:
            total = ctx.add(total, ctx.mul_exact(ctx.log_int(p), c))
        return Interval(total.lo, total.hi, bits)

    def as_real(self) -> "LogReal":
        return LogReal(self)

    # -- formatting ----------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for p, c in self.terms:
            if c == 1:
                parts.append(f"log({p})")
            elif c.denominator == 1:
                parts.append(f"{c.numerator}*log({p})")
            else:
                parts.append(f"({c.numerator}/{c.denominator})*log({p})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"LogValue({dict((p, c) for p, c in self.terms)!r})"


class LogReal(LazyReal):
    """Lazy view of a LogValue for the comparison machinery."""

    __slots__ = ("value",)

    def __init__(self, value: LogValue):
        super().__init__()
        self.value = value

    def _eval(self, bits: int) -> Interval:
        return self.value.eval(bits)

    def __repr__(self) -> str:
        return f"LogReal({self.value})"


def logvalue_eval(v: LogValue, bits: int) -> Interval:
    """Module-level alias for LogValue.eval (certified enclosure in nats)."""
    return v.eval(bits)
