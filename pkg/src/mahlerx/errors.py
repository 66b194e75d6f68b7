"""Exception types shared across the package."""


class PrecisionExhausted(ArithmeticError):
    """A comparison could not be decided within the configured precision budget.

    Raised when two enclosures still overlap at ``max_bits`` while at least one
    of them is wider than ``tie_eps``.  The caller should retry with a higher
    precision policy.
    """


class ToleranceUnreachable(ArithmeticError):
    """A requested output tolerance needs more precision than the policy allows."""


class UnsupportedTarget(ValueError):
    """A search target has exponent denominators outside the configured lattice."""


class ZeroInput(ValueError):
    """Zero was passed where a nonzero rational is required."""


class IdentityInput(ValueError):
    """The identity class was passed to an operation that needs a nontrivial one."""
