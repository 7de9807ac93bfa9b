"""Exception hierarchy shared by every module."""


class SchwarzianLabError(Exception):
    """Base class for all library errors."""


class UsageError(SchwarzianLabError, ValueError):
    """Malformed call: mismatched base points, bad configuration, unknown fields."""


class DomainError(SchwarzianLabError, ValueError):
    """An argument lies outside the region where the operation is defined."""


class SensePreservationError(DomainError):
    """The dilatation reached modulus >= 1 at a queried point."""


class SingularEvaluationError(SchwarzianLabError, ArithmeticError):
    """Division by a vanishing quantity, a branch-cut crossing, or a non-finite result."""


class NumericError(SchwarzianLabError, RuntimeError):
    """An iterative numerical procedure failed to converge."""
