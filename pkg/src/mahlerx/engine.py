"""The x-metric machinery on rational torsion classes.

`mx_search` minimizes the L^x combination of exact measures over all finite
factorizations of a target class inside the configured lattice subgroup
(exponent denominators dividing D, primes restricted to the target's support;
the support restriction is lossless because coordinate projection never
increases a term's measure and preserves the product).

Finiteness of the reduction: every term of a factorization whose combined
value does not exceed the one-term incumbent B has measure at most B, and the
per-coordinate inequality |e_p| log p <= measure(e) confines the terms to a
finite box.  Candidate terms are enumerated once, ordered canonically by
(measure, lexicographic entries) so that factorizations are explored as
non-decreasing sequences and permutation symmetry never multiplies the tree.

Pruning is certified: a subtree is cut only when a lower bound on every
completion provably exceeds the incumbent (an uncertain comparison never
prunes, so all optimal-value witnesses are seen and the canonical one is
kept).  The bounds charge every unavoidable remaining term at least the
current candidate's measure (terms are non-decreasing along a branch), and
charge the residual through height subadditivity: for x <= 1 via the power
subadditivity of t^x, for x > 1 via sum v^x >= v_j^(x-1) * sum v.  For
x = infinity the combiner is a maximum, the per-term count bound fails, and
the search runs under a term cap: the certificate degrades to a capped upper
bound whenever a branch that could still have beaten the final result was cut
by the cap alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import gmpy2

from .errors import IdentityInput, UnsupportedTarget
from .exact import LogReal, LogValue
from .intervals import (
    Const,
    CompareStats,
    DEFAULT_POLICY,
    DiffReal,
    Interval,
    IntervalContext,
    LazyReal,
    LESS,
    LogOfReal,
    MaxReal,
    PowReal,
    PrecisionPolicy,
    ProductReal,
    QuotientReal,
    SumReal,
    TIE,
    float_bounds,
    next_down,
    refine_compare,
)
from .radq import ExponentVector, mbar_ev, weil_height_ev

CERTIFIED = "certified"
CAPPED_UPPER_BOUND = "capped-upper-bound"

_DN53 = gmpy2.context(precision=53, round=gmpy2.RoundDown,
                      emax=gmpy2.get_emax_max(), emin=gmpy2.get_emin_min())


def _pow_float_down(value: float, qq: "gmpy2.mpq") -> float:
    """Certified float64 lower bound of value^q for value >= 0, q > 0."""
    if value <= 0:
        return 0.0
    return float(_DN53.exp(_DN53.mul(qq, _DN53.log(gmpy2.mpfr(value)))))


@dataclass(frozen=True)
class XParameter:
    """A point of (0, infinity]: a positive rational, or the max-combiner."""

    value: Optional[Fraction]  # None encodes infinity

    @classmethod
    def finite(cls, q: Union[int, Fraction, str]) -> "XParameter":
        q = Fraction(q)
        if q <= 0:
            raise ValueError("x must be positive")
        return cls(q)

    @classmethod
    def infinity(cls) -> "XParameter":
        return cls(None)

    @classmethod
    def parse(cls, text: str) -> "XParameter":
        s = text.strip().lower()
        if s in ("inf", "infinity", "oo"):
            return cls.infinity()
        return cls.finite(Fraction(s))

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)


@dataclass(frozen=True)
class SearchConfig:
    """Search-space and precision knobs for the factorization engine."""

    denominator_bound: int = 1
    max_terms_override: Optional[int] = None
    precision: PrecisionPolicy = DEFAULT_POLICY
    infinity_term_cap: int = 8
    # experimental replacement for the certified constant log 2 in the pruning
    # bounds; any search that uses it reports a non-certified result
    c_override: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.denominator_bound < 1:
            raise ValueError("denominator bound must be >= 1")
        if self.infinity_term_cap < 1:
            raise ValueError("infinity term cap must be >= 1")
        if self.max_terms_override is not None and self.max_terms_override < 1:
            raise ValueError("max terms override must be >= 1")
        if self.c_override is not None and self.c_override <= 0:
            raise ValueError("c override must be positive")


@dataclass(frozen=True)
class Factorization:
    """Multiset of nonidentity classes in canonical (measure, lex) order."""

    terms: tuple[ExponentVector, ...]

    @classmethod
    def of(cls, terms: Sequence[ExponentVector]) -> "Factorization":
        for t in terms:
            if t.is_identity():
                raise ValueError("factorizations never store identity terms")
        ordered = sorted(terms, key=lambda t: (mbar_ev(t), t.entries))
        return cls(tuple(ordered))

    @classmethod
    def empty(cls) -> "Factorization":
        return cls(())

    def product(self) -> ExponentVector:
        total = ExponentVector.identity()
        for t in self.terms:
            total = total + t
        return total

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        return "[" + ", ".join(str(t) for t in self.terms) + "]"


@dataclass(frozen=True)
class CertifiedResult:
    """Search outcome: value enclosure, witness, and an honest certificate."""

    value: Interval
    exact_form: Optional[str]
    witness: Factorization
    certificate: str
    nodes: int
    precision_bits: int
    value_real: LazyReal = field(compare=False, repr=False, default=None)  # type: ignore[assignment]


@dataclass(frozen=True)
class CurvePoint:
    x: Fraction
    value: Interval
    witness: Factorization


@dataclass
class CheckEntry:
    label: str
    passed: bool
    detail: str = ""


@dataclass
class CheckReport:
    """Outcome of a verification run: one entry per assertion."""

    name: str
    entries: list[CheckEntry] = field(default_factory=list)

    def add(self, label: str, passed: bool, detail: str = "") -> None:
        self.entries.append(CheckEntry(label, passed, detail))

    @property
    def ok(self) -> bool:
        return all(e.passed for e in self.entries)

    def lines(self) -> list[str]:
        out = []
        for e in self.entries:
            mark = "PASS" if e.passed else "FAIL"
            detail = f" :: {e.detail}" if e.detail else ""
            out.append(f"[{mark}] {self.name}/{e.label}{detail}")
        return out


# ---------------------------------------------------------------------------
# The L^x combiner
# ---------------------------------------------------------------------------

ValueLike = Union[LazyReal, LogValue]


def _as_real(v: ValueLike) -> LazyReal:
    return v.as_real() if isinstance(v, LogValue) else v


def combine_x(values: Sequence[ValueLike], x: XParameter) -> LazyReal:
    """(sum v_i^x)^(1/x) for finite x, max v_i at infinity, 0 for the empty list."""
    reals = [_as_real(v) for v in values]
    if not reals:
        return Const(0)
    if x.is_infinite:
        return MaxReal(reals)
    q = x.value
    assert q is not None
    if q == 1:
        return SumReal(reals)
    power_sum = SumReal([PowReal(r, q) for r in reals])
    return PowReal(power_sum, 1 / q)


# ---------------------------------------------------------------------------
# Candidate terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Candidate:
    vector: ExponentVector
    measure: LogValue
    # the measure of a reduced surd form has integer coefficients, so it is
    # log of an exact integer; comparisons reduce to integer comparisons
    measure_key: int


def _measure_key(m: LogValue) -> int:
    out = 1
    for p, c in m.terms:
        assert c.denominator == 1, "surd measures have integer coefficients"
        out *= p ** c.numerator
    return out


def _enumerate_candidates(target: ExponentVector, denom: int, bound: LogValue) -> list[_Candidate]:
    """All nonidentity vectors on the target's support with denominators
    dividing `denom` and measure <= bound, in canonical (measure, lex) order."""
    support = target.support()
    per_prime: list[list[Fraction]] = []
    for p in support:
        kmax = 0
        while LogValue(((p, Fraction(kmax + 1, denom)),)).compare(bound) <= 0:
            kmax += 1
        per_prime.append([Fraction(k, denom) for k in range(-kmax, kmax + 1)])
    out: list[_Candidate] = []

    def rec(i: int, acc: list[tuple[int, Fraction]]) -> None:
        if i == len(support):
            if not acc:
                return
            vec = ExponentVector(tuple(acc))
            m = mbar_ev(vec)
            if m.compare(bound) <= 0:
                out.append(_Candidate(vec, m, _measure_key(m)))
            return
        for e in per_prime[i]:
            rec(i + 1, acc + [(support[i], e)] if e != 0 else list(acc))

    rec(0, [])
    out.sort(key=lambda c: (c.measure_key, c.vector.entries))
    return out


def _suffix_max_steps(cands: list[_Candidate], support: tuple[int, ...]) -> list[dict[int, Fraction]]:
    """suffix[i][p] = max |t_p| over candidates with index >= i."""
    suffix: list[dict[int, Fraction]] = [dict((p, Fraction(0)) for p in support)]
    for cand in reversed(cands):
        prev = suffix[0]
        cur = dict(prev)
        for p, e in cand.vector.entries:
            a = abs(e)
            if a > cur[p]:
                cur[p] = a
        suffix.insert(0, cur)
    return suffix


# ---------------------------------------------------------------------------
# mx_search
# ---------------------------------------------------------------------------

def _validate_target(target: ExponentVector, denom: int) -> None:
    for _, e in target.entries:
        if denom % e.denominator != 0:
            raise UnsupportedTarget(
                f"exponent {e} has denominator outside the 1/{denom} lattice"
            )


def _exact_form(witness: Factorization, x: XParameter, values: list[LogValue]) -> Optional[str]:
    if not witness.terms:
        return "0"
    if len(witness.terms) == 1:
        return str(values[0])
    if x.is_infinite:
        return str(max(values))
    if all(v == values[0] for v in values[1:]):
        n = len(values)
        inv = 1 / x.value  # type: ignore[operator]
        return f"{n}^({inv})*({values[0]})"
    return None


def _result(
    witness_terms: Sequence[ExponentVector],
    x: XParameter,
    certificate: str,
    nodes: int,
    policy: PrecisionPolicy,
    stats: CompareStats,
) -> CertifiedResult:
    witness = Factorization.of(witness_terms)
    values = [mbar_ev(t) for t in witness.terms]
    value_real = combine_x(values, x)
    enclosure = value_real.enclosure(policy.start_bits)
    return CertifiedResult(
        value=enclosure,
        exact_form=_exact_form(witness, x, values),
        witness=witness,
        certificate=certificate,
        nodes=nodes,
        precision_bits=max(policy.start_bits, stats.max_bits_used),
        value_real=value_real,
    )


def mx_search(target: ExponentVector, x: XParameter, config: SearchConfig = SearchConfig()) -> CertifiedResult:
    """Minimize the L^x combination of exact measures over factorizations of
    the target within the configured lattice; returns the canonical witness.

    The certificate is `certified` when the finite reduction was exhausted
    with sound pruning (always, for finite x); at x = infinity it degrades to
    `capped-upper-bound` when the term cap cut a branch that could still have
    improved on the result.
    """
    policy = config.precision
    stats = CompareStats()
    _validate_target(target, config.denominator_bound)
    if target.is_identity():
        return _result((), x, CERTIFIED, 0, policy, stats)

    bound = mbar_ev(target)
    cands = _enumerate_candidates(target, config.denominator_bound, bound)
    suffix = _suffix_max_steps(cands, target.support())
    non_certified = config.c_override is not None
    c_value: LazyReal = (
        Const(config.c_override) if config.c_override is not None else LogValue.log2().as_real()
    )

    if x.is_infinite:
        terms, nodes, capped = _search_infinity(target, config, cands, suffix, stats)
    else:
        terms, nodes, capped = _search_finite(
            target, x.value, config, cands, suffix, c_value, policy, stats
        )
    cert = CAPPED_UPPER_BOUND if (capped or non_certified) else CERTIFIED
    return _result(terms, x, cert, nodes, policy, stats)


def _search_finite(
    target: ExponentVector,
    q: Fraction,
    config: SearchConfig,
    cands: list[_Candidate],
    suffix: list[dict[int, Fraction]],
    c_value: LazyReal,
    policy: PrecisionPolicy,
    stats: CompareStats,
) -> tuple[tuple[ExponentVector, ...], int, bool]:
    """Certified pruning runs on a two-tier comparison ladder: a directed
    float64 layer (1-ulp outward rounding via nextafter) decides the vast
    majority of cuts for free; anything the floats cannot separate is simply
    explored, and only incumbent updates pay for adaptive-precision compares.
    A cut therefore always means a certified strict improvement is impossible,
    while an uncertain branch costs time, never correctness."""
    bits = policy.start_bits
    denom = config.denominator_bound
    support = target.support()
    k = len(support)
    q_mpq = gmpy2.mpq(q.numerator, q.denominator)

    # hot-path state is integer coordinate vectors scaled by the denominator
    def coords_of(vec: ExponentVector) -> tuple[int, ...]:
        return tuple(int(vec.exponent(p) * denom) for p in support)

    def vector_of(coords: Sequence[int]) -> ExponentVector:
        return ExponentVector.from_pairs(
            tuple((p, Fraction(a, denom)) for p, a in zip(support, coords)))

    cand_coords = [coords_of(c.vector) for c in cands]
    suffix_steps = [tuple(int(s[p] * denom) for p in support) for s in suffix]

    pow_nodes = [PowReal(LogReal(c.measure), q) for c in cands]
    pow_lo = [float_bounds(p.enclosure(bits))[0] for p in pow_nodes]
    # for x > 1: sum of remaining v^x >= v_j^(x-1) * sum of remaining v,
    # because every remaining term has measure at least v_j in canonical order
    if q > 1:
        slope_lo = [float_bounds(PowReal(LogReal(c.measure), q - 1).enclosure(bits))[0]
                    for c in cands]
    else:
        slope_lo = []
    ln_lo = [next_down(float_bounds(LogValue(((p, Fraction(1)),)).eval(64))[0] / denom)
             for p in support]

    def height_lo(rho: tuple[int, ...]) -> float:
        """Certified float lower bound of the residual Weil height."""
        pos = 0.0
        neg = 0.0
        for idx in range(k):
            a = rho[idx]
            if a > 0:
                pos = next_down(pos + next_down(a * ln_lo[idx]))
            elif a < 0:
                neg = next_down(neg + next_down(-a * ln_lo[idx]))
        return max(pos, neg)

    # hard depth ceiling from the per-term floor: N <= (B / c)^x, plus slack;
    # branches at the derived ceiling are always value-pruned first, so only a
    # user override can make the cut bind (and then the certificate degrades)
    b_hi = float(mbar_ev(target).eval(64).hi)
    c_lo = float(c_value.enclosure(64).lo)
    derived_cap = max(1, math.ceil((b_hi / c_lo) ** float(q))) + 2
    depth_cap = config.max_terms_override or derived_cap

    # the incumbent witness is a non-decreasing candidate-index tuple; index
    # order is canonical (measure, lex) order, so the tie-break "fewest terms,
    # then lexicographically smallest canonical term list" is a plain tuple
    # comparison on index sequences
    target_index = next(j for j, c in enumerate(cands) if c.vector.entries == target.entries)
    best_terms: list[tuple[int, ...]] = [(target_index,)]
    best_sum: list[LazyReal] = [SumReal([pow_nodes[target_index]])]
    best_hi = [float_bounds(best_sum[0].enclosure(bits))[1]]
    capped = [False]
    nodes = 0

    def consider(chosen: tuple[int, ...], power_sum: LazyReal) -> None:
        order = refine_compare(power_sum, best_sum[0], policy, stats)
        if order == LESS:
            best_terms[0] = chosen
            best_sum[0] = power_sum
            best_hi[0] = float_bounds(power_sum.enclosure(bits))[1]
        elif order == TIE and (len(chosen), chosen) < (len(best_terms[0]), best_terms[0]):
            best_terms[0] = chosen

    def explore(i: int, rho: tuple[int, ...], chosen: tuple[int, ...],
                pows: tuple[LazyReal, ...], partial_lo: float) -> None:
        # rho is never all-zero here: complete factorizations are handled
        # inline below, and extending one only adds positive cost
        nonlocal nodes
        nodes += 1
        if len(chosen) >= depth_cap:
            capped[0] = True
            return
        for j in range(i, len(cands)):
            new_lo = next_down(partial_lo + pow_lo[j])
            # cheapest-possible completion ignoring the residual: monotone in j
            if new_lo > best_hi[0]:
                break
            step = cand_coords[j]
            new_rho = tuple(a - b for a, b in zip(rho, step))
            if not any(new_rho):
                consider(chosen + (j,), SumReal(pows + (pow_nodes[j],)))
                continue
            steps = suffix_steps[j]
            need = 0
            unreachable = False
            for idx in range(k):
                a = new_rho[idx]
                if a:
                    s = steps[idx]
                    if not s:
                        unreachable = True
                        break
                    r = -(-abs(a) // s)
                    if r > need:
                        need = r
            if unreachable:
                continue  # residual unreachable from the remaining candidates
            # every remaining term has measure >= cand.measure (canonical order)
            if next_down(new_lo + next_down(max(1, need) * pow_lo[j])) > best_hi[0]:
                continue
            if q > 1:
                if next_down(new_lo + next_down(slope_lo[j] * height_lo(new_rho))) > best_hi[0]:
                    continue
            else:
                # power subadditivity plus height subadditivity
                if next_down(new_lo + _pow_float_down(height_lo(new_rho), q_mpq)) > best_hi[0]:
                    continue
            explore(j, new_rho, chosen + (j,), pows + (pow_nodes[j],), new_lo)

    explore(0, coords_of(target), (), (), 0.0)
    return tuple(cands[j].vector for j in best_terms[0]), nodes, capped[0]


def _search_infinity(
    target: ExponentVector,
    config: SearchConfig,
    cands: list[_Candidate],
    suffix: list[dict[int, Fraction]],
    stats: CompareStats,
) -> tuple[tuple[ExponentVector, ...], int, bool]:
    """Max-combiner search: every value in play is the measure of some
    candidate, so comparisons are exact integer comparisons of measure keys,
    and the hot-path state is integer coordinate vectors."""
    cap = config.max_terms_override or config.infinity_term_cap
    denom = config.denominator_bound
    support = target.support()
    k = len(support)

    def coords_of(vec: ExponentVector) -> tuple[int, ...]:
        return tuple(int(vec.exponent(p) * denom) for p in support)

    cand_coords = [coords_of(c.vector) for c in cands]
    keys = [c.measure_key for c in cands]
    suffix_steps = [tuple(int(s[p] * denom) for p in support) for s in suffix]

    target_index = next(j for j, c in enumerate(cands) if c.vector.entries == target.entries)
    best_key = [keys[target_index]]
    # witnesses are non-decreasing candidate-index tuples; index order is the
    # canonical (measure, lex) term order, so tuple comparison is the tie-break
    best_terms: list[tuple[int, ...]] = [(target_index,)]
    # branches cut by the term cap alone, post-checked against the final value
    cap_cuts: dict[tuple[tuple[int, ...], int], None] = {}
    nodes = 0

    def beatable_beyond_cap(rho: tuple[int, ...], start: int, incumbent_key: int) -> bool:
        """Could a factorization with more terms than the cap still be strictly
        better than the incumbent?  Only if the residual is reachable using
        candidates whose measure is strictly below it (there is no term-count
        bound for the max combiner, so reachability is the only obstruction)."""
        steps = [0] * k
        for j in range(start, len(cands)):
            if keys[j] >= incumbent_key:
                break
            for idx in range(k):
                a = abs(cand_coords[j][idx])
                if a > steps[idx]:
                    steps[idx] = a
        return all(steps[idx] > 0 for idx in range(k) if rho[idx])

    def explore(i: int, rho: tuple[int, ...], chosen: tuple[int, ...]) -> None:
        nonlocal nodes
        nodes += 1
        for j in range(i, len(cands)):
            # terms are chosen in non-decreasing value order: this candidate is
            # the max of any completion through this branch
            key = keys[j]
            if key > best_key[0]:
                break
            new_rho = tuple(a - b for a, b in zip(rho, cand_coords[j]))
            if not any(new_rho):
                new_chosen = chosen + (j,)
                if key < best_key[0] or (key == best_key[0] and
                                         (len(new_chosen), new_chosen)
                                         < (len(best_terms[0]), best_terms[0])):
                    best_key[0] = key
                    best_terms[0] = new_chosen
                continue
            steps = suffix_steps[j]
            need = 0
            unreachable = False
            for idx in range(k):
                a = new_rho[idx]
                if a:
                    s = steps[idx]
                    if not s:
                        unreachable = True
                        break
                    r = -(-abs(a) // s)
                    if r > need:
                        need = r
            if unreachable:
                continue
            if key == best_key[0]:
                # already tied with the incumbent: the max cannot shrink, so
                # only a witness that wins the tie-break could displace it
                if len(chosen) + 1 + max(1, need) > len(best_terms[0]):
                    continue
            if len(chosen) + 1 + need > cap:
                cap_cuts.setdefault((new_rho, j), None)
                continue
            explore(j, new_rho, chosen + (j,))

    explore(0, coords_of(target), ())
    capped = any(
        keys[j] < best_key[0] and beatable_beyond_cap(rho, j, best_key[0])
        for rho, j in cap_cuts
    )
    return tuple(cands[j].vector for j in best_terms[0]), nodes, capped


# ---------------------------------------------------------------------------
# Thresholds, curves, reports
# ---------------------------------------------------------------------------

def smallp_threshold_real(target: ExponentVector) -> Optional[LazyReal]:
    """log 2 / (log measure - log c) as a lazy real; None when the measure
    already equals c (every positive x collapses, the threshold is infinite)."""
    if target.is_identity():
        raise IdentityInput("threshold needs a nontrivial class")
    m = mbar_ev(target)
    c = LogValue.log2()
    order = m.compare(c)
    if order == 0:
        return None
    if order < 0:
        raise AssertionError("measure below log 2 on a nontrivial class")
    return QuotientReal(
        LogReal(c),
        DiffReal(LogOfReal(LogReal(m)), LogOfReal(LogReal(c))),
    )


def smallp_threshold(target: ExponentVector, policy: PrecisionPolicy = DEFAULT_POLICY) -> Optional[Interval]:
    """Enclosure of the collapse threshold: any x below it forces the search
    value to equal the modified measure with a single-term witness."""
    expr = smallp_threshold_real(target)
    if expr is None:
        return None
    return expr.enclosure(policy.start_bits)


def rational_below_threshold(
    target: ExponentVector,
    scale: Fraction = Fraction(9, 10),
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> Optional[Fraction]:
    """An exact rational x with x <= scale * threshold (None when infinite)."""
    if not 0 < scale < 1:
        raise ValueError("scale must be in (0, 1)")
    expr = smallp_threshold_real(target)
    if expr is None:
        return None
    iv = expr.enclosure(64)
    x = Fraction(*iv.lo.as_integer_ratio()) * scale
    if x <= 0:
        raise AssertionError("threshold enclosure lost positivity")
    return x


def mx_curve(
    target: ExponentVector,
    grid: Sequence[Fraction],
    config: SearchConfig = SearchConfig(),
) -> list[CurvePoint]:
    """One certified search per grid point; the value map is non-increasing."""
    xs = [Fraction(g) for g in grid]
    if any(g <= 0 for g in xs):
        raise ValueError("grid values must be positive")
    if sorted(xs) != xs:
        raise ValueError("grid must be sorted ascending")
    points = []
    for g in xs:
        res = mx_search(target, XParameter.finite(g), config)
        points.append(CurvePoint(g, res.value, res.witness))
    for a, b in zip(points, points[1:]):
        if not b.value.lo <= a.value.hi:
            raise AssertionError(f"curve increased between x={a.x} and x={b.x}")
    return points


def default_grid(lo: Fraction = Fraction(1, 4), hi: Fraction = Fraction(4), step: Fraction = Fraction(1, 20)) -> list[Fraction]:
    """Grid straddling the collapse threshold and the x = 1 transition."""
    out = []
    g = Fraction(lo)
    while g <= hi:
        out.append(g)
        g += step
    return out


def continuity_check(
    curve: Sequence[CurvePoint],
    target: ExponentVector,
    bits: int = 128,
) -> CheckReport:
    """Two-sided slope test on every adjacent pair (xbar < y <= xbar + 1):

        (y - xbar) * Dmin <= log v(y) - log v(xbar) <= 0,

    where Dmin = ((2 xbar + 1) / xbar^2) * log(c / measure) is the minimum over
    [xbar, xbar+1] of the mean-value lower bound for the log-curve slope (the
    positive factor (x + xbar + 1)/x^2 is decreasing, the log factor is
    nonpositive, so the minimum sits at the left endpoint).  A violation means
    an implementation bug, not new mathematics.
    """
    if target.is_identity():
        raise IdentityInput("continuity check needs a nontrivial class")
    report = CheckReport("continuity")
    ctx = IntervalContext(bits)
    measure = mbar_ev(target).eval(bits)
    c = LogValue.log2().eval(bits)
    log_ratio = ctx.sub(ctx.log(c), ctx.log(measure))  # log(c / measure) <= 0
    for a, b in zip(curve, curve[1:]):
        gap = b.x - a.x
        if gap <= 0 or gap > 1:
            report.add(f"pair x={a.x}->{b.x}", False, "grid pair outside (0, 1]")
            continue
        if a.value.lo <= 0 or b.value.lo <= 0:
            report.add(f"pair x={a.x}->{b.x}", False, "value enclosure touches zero")
            continue
        dmin_factor = Fraction(2 * a.x + 1, 1) / (a.x * a.x)
        dmin = ctx.mul_exact(log_ratio, dmin_factor)
        lhs = ctx.mul_exact(dmin, gap)
        diff = ctx.sub(ctx.log(Interval(b.value.lo, b.value.hi, bits)),
                       ctx.log(Interval(a.value.lo, a.value.hi, bits)))
        up_violation = diff.lo > 0
        down_violation = diff.hi < lhs.lo
        ok = not (up_violation or down_violation)
        detail = (
            f"allowed [{float(lhs.lo):.6g}, 0], observed "
            f"[{float(diff.lo):.6g}, {float(diff.hi):.6g}]"
        )
        report.add(f"pair x={a.x}->{b.x}", ok, detail)
    return report


def m0_check(target: ExponentVector, config: SearchConfig = SearchConfig()) -> CheckReport:
    """The small-x limit equals the modified measure: run the search at half
    the collapse threshold (or x = 1 when the threshold is infinite) and
    compare for a certified tie."""
    report = CheckReport("m0")
    if target.is_identity():
        report.add("identity", True, "0 = 0")
        return report
    x = rational_below_threshold(target, Fraction(1, 2), config.precision)
    if x is None:
        x = Fraction(1)
        report.add("threshold", True, "infinite threshold, using x = 1")
    res = mx_search(target, XParameter.finite(x), config)
    order = refine_compare(res.value_real, LogReal(mbar_ev(target)), config.precision)
    report.add(
        f"tie at x~{float(x):.6g}",
        order == TIE,
        f"value enclosure {res.value}, measure {mbar_ev(target)}",
    )
    return report


# ---------------------------------------------------------------------------
# Weil height closed form
# ---------------------------------------------------------------------------

def weil_hx(e: ExponentVector, x: XParameter) -> LazyReal:
    """The x-metric Weil height: the height itself for x <= 1, else zero
    (including x = infinity)."""
    if x.is_infinite or x.value > 1:
        return Const(0)
    return LogReal(weil_height_ev(e))


def weil_hx_upper(
    e: ExponentVector,
    x: XParameter,
    n: int,
    policy: PrecisionPolicy = DEFAULT_POLICY,
) -> Interval:
    """Enclosure of N^(1/x - 1) * height: the N-th-root upper bound for the
    x-metric Weil height at finite x > 1; it decays to zero as N grows."""
    if x.is_infinite or x.value <= 1:
        raise ValueError("the upper bound applies to finite x > 1")
    if n < 1:
        raise ValueError("N must be a positive integer")
    expr = ProductReal(
        PowReal(Const(n), 1 / x.value - 1),
        LogReal(weil_height_ev(e)),
    )
    return expr.enclosure(policy.start_bits)
