"""Exact x-metric Mahler measures of rationals and integer polynomials.

The package computes, with certified interval enclosures and exact formal
log-prime values:

* the classical Mahler measure of integer polynomials and the exact
  zero-measure (cyclotomic) test,
* the modified measure, minimal degree, and Weil height of torsion classes
  of rational radicals, represented as sparse prime-exponent vectors,
* the x-metric measure for every x in (0, infinity]: a certified
  branch-and-bound over factorizations with a canonical optimal witness,
* collapse thresholds, value curves with slope diagnostics, the closed form
  of the x-metric Weil height, and a generic height framework on finitely
  generated abelian groups with a seeded property harness.
"""

__version__ = "0.1.0"

from .engine import (
    CAPPED_UPPER_BOUND,
    CERTIFIED,
    CertifiedResult,
    CheckReport,
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
from .errors import (
    IdentityInput,
    PrecisionExhausted,
    ToleranceUnreachable,
    UnsupportedTarget,
    ZeroInput,
)
from .exact import LogReal, LogValue, factor_integer, is_prime, logvalue_eval
from .framework import (
    GenericResult,
    GroupModel,
    SearchBudget,
    framework_properties,
    generic_xmetric,
    indicator_model,
    radq_model,
)
from .intervals import (
    GREATER,
    Interval,
    IntervalContext,
    LESS,
    LazyReal,
    PrecisionPolicy,
    TIE,
    refine_compare,
)
from .polynomials import (
    IntPolynomial,
    MeasureResult,
    cyclotomic,
    format_polynomial,
    is_kronecker,
    mahler_measure_poly,
    parse_polynomial,
    surd_min_poly,
)
from .radq import (
    ExponentVector,
    SurdForm,
    c_constant,
    ev_from_rational,
    ev_reduce,
    format_vector,
    mbar_ev,
    min_degree_ev,
    parse_vector,
    weil_height_ev,
)
