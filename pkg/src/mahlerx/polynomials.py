"""Integer polynomials: classical Mahler measure, the zero-measure test, and
minimal polynomials of surds.

The measure  log|lead| + sum log+ |roots|  is enclosed by root squaring: if
f_k is the k-th iterate (roots raised to the 2^k-th power) and N = deg f, then

    ||f_k||_2 / binom(2N, N)^(1/2)  <=  exp(M(f_k))  <=  ||f_k||_2

(Landau's inequality on the right, the binomial coefficient bound on the
left), and M(f) = M(f_k) / 2^k, so the gap collapses like 2^-k.  The iterates
are carried as directed-rounding interval coefficients, rescaled by an exact
power of two each step to keep magnitudes bounded; the accumulated scale is
re-added exactly at the end.  The zero-measure case is decided exactly first
(a polynomial has measure zero iff it is +-x^k times a product of
cyclotomics), so the enclosure [0, 0] is produced only by the exact path.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import gmpy2

from .errors import ToleranceUnreachable
from .exact import factor_integer
from .intervals import Interval, IntervalContext, PrecisionPolicy, DEFAULT_POLICY


@dataclass(frozen=True)
class IntPolynomial:
    """Nonzero integer polynomial; coefficients constant-term first."""

    coefficients: tuple[int, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        if not coeffs:
            raise ValueError("the zero polynomial has no Mahler measure")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1]

    @property
    def constant(self) -> int:
        return self.coefficients[0]

    def __mul__(self, other: "IntPolynomial") -> "IntPolynomial":
        a, b = self.coefficients, other.coefficients
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return IntPolynomial(tuple(out))

    def try_divide(self, d: "IntPolynomial") -> Optional["IntPolynomial"]:
        """Exact quotient self / d over the integers, or None if it does not divide."""
        if d.degree > self.degree:
            return None
        rem = list(self.coefficients)
        dc = d.coefficients
        lead = dc[-1]
        q = [0] * (self.degree - d.degree + 1)
        for k in range(self.degree - d.degree, -1, -1):
            c = rem[k + d.degree]
            if c % lead != 0:
                return None
            qk = c // lead
            q[k] = qk
            if qk:
                for j, dj in enumerate(dc):
                    rem[k + j] -= qk * dj
        if any(rem):
            return None
        return IntPolynomial(tuple(q))

    def strip_root_zero(self) -> tuple["IntPolynomial", int]:
        """Split f = x^k * g with g(0) != 0; returns (g, k)."""
        k = 0
        coeffs = self.coefficients
        while coeffs[k] == 0:
            k += 1
        return IntPolynomial(coeffs[k:]), k

    def reversed(self) -> "IntPolynomial":
        return IntPolynomial(tuple(reversed(self.coefficients)))

    def __str__(self) -> str:
        return format_polynomial(self)


@dataclass(frozen=True)
class MeasureResult:
    """Certified Mahler-measure enclosure (nats)."""

    value: Interval
    is_exact_zero: bool


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(
    r"\s*(?P<sign>[+-]?)\s*(?:(?P<coef>\d+)\s*\*?\s*)?(?P<var>x)?(?:\^(?P<exp>\d+))?\s*"
)


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse 'x^10+x^9-x^7-...-x^3+x+1' or a coefficient list '[1,1,0,...]' (constant first)."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial")
    if s.startswith("["):
        if not s.endswith("]"):
            raise ValueError(f"unterminated coefficient list: {text!r}")
        body = s[1:-1].strip()
        if not body:
            raise ValueError("empty coefficient list")
        coeffs = tuple(int(part.strip()) for part in body.split(","))
        return IntPolynomial(coeffs)
    coeffs: dict[int, int] = {}
    pos = 0
    first = True
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {s[pos:pos + 12]!r}")
        sign, coef, var, exp = m.group("sign", "coef", "var", "exp")
        if not sign and not first:
            raise ValueError(f"missing sign before term at {s[pos:pos + 12]!r}")
        if coef is None and var is None:
            raise ValueError(f"empty term in {text!r}")
        if exp is not None and var is None:
            raise ValueError(f"exponent without variable in {text!r}")
        c = int(coef) if coef is not None else 1
        if sign == "-":
            c = -c
        e = int(exp) if exp is not None else (1 if var else 0)
        coeffs[e] = coeffs.get(e, 0) + c
        pos = m.end()
        first = False
    degree = max(coeffs)
    return IntPolynomial(tuple(coeffs.get(i, 0) for i in range(degree + 1)))


def format_polynomial(f: IntPolynomial) -> str:
    parts = []
    for e in range(f.degree, -1, -1):
        c = f.coefficients[e]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if e == 0:
            body = str(mag)
        elif e == 1:
            body = "x" if mag == 1 else f"{mag}x"
        else:
            body = f"x^{e}" if mag == 1 else f"{mag}x^{e}"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        out += sign + body
    return out


# ---------------------------------------------------------------------------
# Cyclotomic factors and the zero-measure test
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def cyclotomic(n: int) -> IntPolynomial:
    """The n-th cyclotomic polynomial, by exact division of x^n - 1."""
    if n < 1:
        raise ValueError("cyclotomic index must be positive")
    xn1 = IntPolynomial((-1,) + (0,) * (n - 1) + (1,))
    quot = xn1
    for d in range(1, n):
        if n % d == 0:
            q = quot.try_divide(cyclotomic(d))
            assert q is not None, "cyclotomic division is always exact"
            quot = q
    return quot


def _euler_phi(n: int) -> int:
    out = n
    for p, _ in factor_integer(n):
        out = out // p * (p - 1)
    return out


@lru_cache(maxsize=None)
def _cyclotomic_candidates(max_degree: int) -> tuple[int, ...]:
    # phi(n) >= sqrt(n/2), so phi(n) <= d forces n <= 2 d^2
    return tuple(n for n in range(1, 2 * max_degree * max_degree + 2)
                 if _euler_phi(n) <= max_degree)


def is_kronecker(f: IntPolynomial) -> bool:
    """True iff f = +-x^k times a product of cyclotomic polynomials (measure zero).

    Decided by exact trial division, so the measure-zero boundary never depends
    on floating point.
    """
    g, _ = f.strip_root_zero()
    if abs(g.leading) != 1:
        return False
    if g.leading < 0:
        g = IntPolynomial(tuple(-c for c in g.coefficients))
    if g.degree == 0:
        return True
    if abs(g.constant) != 1:
        return False
    for n in _cyclotomic_candidates(g.degree):
        phi = cyclotomic(n)
        while g.degree >= phi.degree:
            q = g.try_divide(phi)
            if q is None:
                break
            g = q
        if g.degree == 0:
            break
    return g.degree == 0 and abs(g.constant) == 1


# ---------------------------------------------------------------------------
# Minimal polynomials of surds
# ---------------------------------------------------------------------------

def surd_min_poly(q: Fraction, root_index: int) -> IntPolynomial:
    """Minimal polynomial over Z of the positive real root_index-th root of q > 0.

    The pair is first reduced: if q is a d-th power of a rational for some
    d | root_index, replace (q, L) by (q^(1/d), L/d).  After reduction,
    b*x^L - a is irreducible (binomial criterion; q > 0 rules out the
    negative-fourth-power exception), content-free, with positive leading
    coefficient, and its degree is exactly the reduced L.
    """
    q = Fraction(q)
    if q <= 0:
        raise ValueError("surd_min_poly needs a positive rational")
    if root_index < 1:
        raise ValueError("root index must be a positive integer")
    num = {p: e for p, e in factor_integer(q.numerator)}
    den = {p: e for p, e in factor_integer(q.denominator)}
    g = 0
    for e in num.values():
        g = math.gcd(g, e)
    for e in den.values():
        g = math.gcd(g, e)
    d = math.gcd(root_index, g)  # gcd(L, 0) = L handles q = 1
    L = root_index // d
    a = 1
    for p, e in sorted(num.items()):
        a *= p ** (e // d)
    b = 1
    for p, e in sorted(den.items()):
        b *= p ** (e // d)
    return IntPolynomial((-a,) + (0,) * (L - 1) + (b,))


# ---------------------------------------------------------------------------
# Mahler measure by interval root squaring
# ---------------------------------------------------------------------------

def _graeffe_step(ctx: IntervalContext, coeffs: list[Interval]) -> list[Interval]:
    """One root-squaring step: coefficients of +-f(sqrt(y)) f(-sqrt(y))."""
    n = len(coeffs) - 1
    out: list[Interval] = []
    for l in range(n + 1):
        acc = ctx.sqr(coeffs[l])
        sign = -1
        for s in range(1, min(l, n - l) + 1):
            prod = ctx.mul(coeffs[l - s], coeffs[l + s])
            prod = ctx.scale_2exp(prod, 1)
            acc = ctx.add(acc, prod) if sign > 0 else ctx.sub(acc, prod)
            sign = -sign
        # the dropped (-1)^l sign pattern is invariant under the step and
        # cancels in the squared norm
        out.append(acc)
    return out


def _rescale(ctx: IntervalContext, coeffs: list[Interval]) -> tuple[list[Interval], int]:
    mag = max(max(abs(c.lo), abs(c.hi)) for c in coeffs)
    if mag == 0 or not gmpy2.is_finite(mag):
        return coeffs, 0
    s = gmpy2.frexp(mag)[0]  # 2^(s-1) <= mag < 2^s
    if s == 0:
        return coeffs, 0
    return [ctx.scale_2exp(c, -s) for c in coeffs], s


def _measure_via_graeffe(f: IntPolynomial, tol: Fraction, bits: int) -> Optional[Interval]:
    """One fixed-precision attempt; None when interval slop exceeded the budget."""
    n = f.degree
    ctx = IntervalContext(bits)
    half_log_binom = ctx.mul_exact(ctx.log_int(math.comb(2 * n, n)), Fraction(1, 2))
    # steps needed for the structural gap, plus slack for rounding slop
    gap = float(half_log_binom.hi)
    k_target = max(1, math.ceil(math.log2(max(gap, 1e-9) * 4 / float(tol))))
    coeffs = [ctx.from_exact(c) for c in f.coefficients]
    scale = 0
    for _ in range(k_target):
        coeffs = _graeffe_step(ctx, coeffs)
        coeffs, s = _rescale(ctx, coeffs)
        scale = 2 * scale + s
    norm_sq = ctx.sum([ctx.sqr(c) for c in coeffs])
    if norm_sq.lo <= 0:
        return None  # cancellation ate the enclosure; retry at higher precision
    log_norm = ctx.mul_exact(ctx.log(norm_sq), Fraction(1, 2))
    log_norm = ctx.add(log_norm, ctx.mul_exact(ctx.log_int(2), scale))
    upper = ctx.scale_2exp(log_norm, -k_target)
    lower = ctx.scale_2exp(ctx.sub(log_norm, half_log_binom), -k_target)
    value = ctx.clamp_lo(Interval(lower.lo, upper.hi, bits), 0)
    if value.width() <= gmpy2.mpq(tol.numerator, tol.denominator):
        return value
    return None


def mahler_measure_poly(
    f: IntPolynomial,
    tol: Fraction | float | str,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> MeasureResult:
    """Certified enclosure of log|lead| + sum log+ |roots|, of width <= tol.

    Measure-zero inputs are recognized exactly and return the point enclosure
    [0, 0]; everything else goes through the interval root-squaring loop,
    doubling the working precision until the requested width is met or the
    policy ceiling is hit (ToleranceUnreachable).
    """
    tol = Fraction(tol)
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if is_kronecker(f):
        ctx = IntervalContext(policy.start_bits)
        return MeasureResult(ctx.zero(), True)
    if f.degree == 0:
        bits = policy.start_bits
        while True:
            ctx = IntervalContext(bits)
            value = ctx.log_int(abs(f.leading))
            if value.width() <= gmpy2.mpq(tol.numerator, tol.denominator):
                return MeasureResult(value, False)
            bits *= 2
            if bits > policy.max_bits:
                raise ToleranceUnreachable(f"tolerance {tol} needs more than {policy.max_bits} bits")
    bits = policy.start_bits
    while True:
        value = _measure_via_graeffe(f, tol, bits)
        if value is not None:
            return MeasureResult(value, False)
        bits *= 2
        if bits > policy.max_bits:
            raise ToleranceUnreachable(f"tolerance {tol} needs more than {policy.max_bits} bits")
