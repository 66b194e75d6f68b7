"""Torsion classes of radicals of rationals as sparse prime-exponent vectors.

An algebraic number with some power in Q, taken modulo roots of unity, is
described completely by a finite map prime -> rational exponent.  Addition of
vectors is multiplication of classes; the empty vector is the class of 1.
Signs and roots of unity are never represented: every measure and height used
here is invariant under them, so searches happen directly on the quotient.

For a vector e with reduced surd form (a, L)  (a = L*e integral, L minimal),
the positive real representative is the L-th root of the rational
prod p^(a_p), whose minimal polynomial is den*x^L - num.  Its measure is
max(log num, log den), its degree L, and its Weil height the measure over L.
All three are exact `LogValue`/integer data.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import IdentityInput, ZeroInput
from .exact import LogValue, factor_integer, is_prime


@dataclass(frozen=True)
class ExponentVector:
    """Sparse map prime -> nonzero rational exponent; the group is written additively."""

    entries: tuple[tuple[int, Fraction], ...]

    def __post_init__(self) -> None:
        seen: dict[int, Fraction] = {}
        for p, e in self.entries:
            e = Fraction(e)
            if e == 0:
                continue
            if p in seen:
                raise ValueError(f"duplicate prime {p}")
            if p < 2 or not is_prime(p):
                raise ValueError(f"{p} is not a prime")
            seen[p] = e
        object.__setattr__(self, "entries", tuple(sorted(seen.items())))

    # -- constructors -----------------------------------------------------

    @classmethod
    def from_pairs(cls, pairs: Union[Mapping[int, Fraction], Iterable[tuple[int, Fraction]]]) -> "ExponentVector":
        if isinstance(pairs, Mapping):
            pairs = tuple(pairs.items())
        merged: dict[int, Fraction] = {}
        for p, e in pairs:
            merged[p] = merged.get(p, Fraction(0)) + Fraction(e)
        return cls(tuple((p, e) for p, e in merged.items() if e != 0))

    @classmethod
    def identity(cls) -> "ExponentVector":
        return cls(())

    # -- group structure ----------------------------------------------------

    def is_identity(self) -> bool:
        return not self.entries

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        return ExponentVector.from_pairs(tuple(self.entries) + tuple(other.entries))

    def __neg__(self) -> "ExponentVector":
        return ExponentVector(tuple((p, -e) for p, e in self.entries))

    def __sub__(self, other: "ExponentVector") -> "ExponentVector":
        return self + (-other)

    def scaled(self, n: Union[int, Fraction]) -> "ExponentVector":
        n = Fraction(n)
        if n == 0:
            return ExponentVector.identity()
        return ExponentVector(tuple((p, e * n) for p, e in self.entries))

    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.entries)

    def exponent(self, p: int) -> Fraction:
        for q, e in self.entries:
            if q == p:
                return e
        return Fraction(0)

    def sort_key(self) -> tuple:
        return self.entries

    def __str__(self) -> str:
        return format_vector(self)


def ev_from_rational(q: Union[int, Fraction]) -> ExponentVector:
    """Embed a nonzero rational: exponents of its primes; the sign is torsion."""
    q = Fraction(q)
    if q == 0:
        raise ZeroInput("the zero rational has no torsion class")
    pairs = [(p, Fraction(e)) for p, e in factor_integer(abs(q.numerator))]
    pairs += [(p, Fraction(-e)) for p, e in factor_integer(q.denominator)]
    return ExponentVector.from_pairs(pairs)


@dataclass(frozen=True)
class SurdForm:
    """Integral exponent data (a, L) with a = L*e and gcd(gcd_p |a_p|, L) = 1."""

    a: tuple[tuple[int, int], ...]
    L: int


def ev_reduce(e: ExponentVector) -> SurdForm:
    """Clear denominators minimally: L = lcm of exponent denominators, a = L*e."""
    L = 1
    for _, exp in e.entries:
        L = L * exp.denominator // math.gcd(L, exp.denominator)
    a = {p: int(exp * L) for p, exp in e.entries}
    # defensive normalization; the lcm construction already guarantees this
    g = L
    for v in a.values():
        g = math.gcd(g, abs(v))
    if g > 1:
        L //= g
        a = {p: v // g for p, v in a.items()}
    return SurdForm(tuple(sorted(a.items())), L)


def mbar_ev(e: ExponentVector) -> LogValue:
    """Exact modified Mahler measure of the class: the measure of its positive
    surd representative, max(log of numerator, log of denominator) of a^(1/L)."""
    form = ev_reduce(e)
    pos = LogValue((p, Fraction(v)) for p, v in form.a if v > 0)
    neg = LogValue((p, Fraction(-v)) for p, v in form.a if v < 0)
    return pos if pos.compare(neg) >= 0 else neg


def weil_height_ev(e: ExponentVector) -> LogValue:
    """Exact Weil height: the measure divided by the minimal degree L."""
    form = ev_reduce(e)
    return mbar_ev(e).scaled(Fraction(1, form.L))


def min_degree_ev(e: ExponentVector) -> int:
    """Minimal degree over Q of a torsion multiple of the class: the Kummer
    degree L of the positive representative."""
    if e.is_identity():
        raise IdentityInput("the identity class is rational of degree 1")
    return ev_reduce(e).L


def c_constant() -> LogValue:
    """Smallest positive measure among non-torsion elements when the ambient
    field is Q: log 2."""
    return LogValue.log2()


# ---------------------------------------------------------------------------
# Text form: "2^2 * 3^-1", "2^(3/2)", plain rationals "12", "2/3"
# ---------------------------------------------------------------------------

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_FACTOR_RE = re.compile(
    r"^(?P<prime>\d+)\^(?:\((?P<paren>[+-]?\d+(?:/\d+)?)\)|(?P<bare>[+-]?\d+(?:/\d+)?))$"
)


def format_vector(e: ExponentVector) -> str:
    if e.is_identity():
        return "1"
    parts = []
    for p, exp in e.entries:
        if exp.denominator == 1:
            parts.append(f"{p}^{exp.numerator}")
        else:
            parts.append(f"{p}^({exp.numerator}/{exp.denominator})")
    return " * ".join(parts)


def parse_vector(text: str) -> ExponentVector:
    """Parse the printed form or a plain rational into a torsion class."""
    s = text.strip()
    if not s:
        raise ValueError("empty vector")
    if s == "1":
        return ExponentVector.identity()
    if _RATIONAL_RE.match(s):
        return ev_from_rational(Fraction(s))
    pairs: list[tuple[int, Fraction]] = []
    for token in s.split("*"):
        token = token.strip()
        m = _FACTOR_RE.match(token)
        if not m:
            raise ValueError(f"cannot parse vector factor {token!r}")
        p = int(m.group("prime"))
        exp = Fraction(m.group("paren") or m.group("bare"))
        pairs.append((p, exp))
    return ExponentVector.from_pairs(pairs)
