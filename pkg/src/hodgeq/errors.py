"""Exception types shared across the package."""


class HodgeqError(Exception):
    """Base class for all package-specific errors."""


class NonUnitConstantTerm(HodgeqError, ValueError):
    """Series inversion requested for a series whose constant term is not a unit."""


class InsufficientPrecision(HodgeqError, ArithmeticError):
    """A numeric result cannot be rounded/certified at the working precision."""


class OddDimension(HodgeqError, ValueError):
    """Hodge polynomial centering requires an even complex dimension."""


class TruncationExceeded(HodgeqError, IndexError):
    """A coefficient beyond the truncation order of a stored series was requested."""


class HypothesisViolation(HodgeqError, ValueError):
    """Input surface violates the hypotheses of the requested formula."""


class NonpositiveCuspWeight(HodgeqError, ValueError):
    """The cusp-growth bracket of a Bessel term is not positive."""


class DomainError(HodgeqError, ValueError):
    """Argument outside the mathematical domain of the function."""


class ZeroDenominator(HodgeqError, ZeroDivisionError):
    """A proportion was requested at an index where the normalizing sum vanishes."""


class ConvergenceFailure(HodgeqError, ArithmeticError):
    """A truncated expansion cannot reach the requested accuracy."""
