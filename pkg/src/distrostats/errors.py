"""Exception types raised by the library.

Every failure mode has a dedicated class so callers (and the CLI) can
report structured errors instead of bare assertion failures.
"""

__all__ = [
    "DistroStatsError",
    "ValidationError",
    "UnsupportedFamilyError",
    "DomainError",
    "EmptyInputError",
    "DegenerateVariableError",
    "ShapeMismatchError",
    "SingularMatrixError",
    "InvalidMetricError",
    "InvalidKError",
    "ParseError",
]


class DistroStatsError(Exception):
    """Base class for all library errors."""


class ValidationError(DistroStatsError, ValueError):
    """An input violates a structural invariant; the message names it."""


class UnsupportedFamilyError(ValidationError):
    """Parametric family not in the registry."""


class DomainError(DistroStatsError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class EmptyInputError(DistroStatsError, ValueError):
    """An operation that needs at least one element received none."""


class DegenerateVariableError(DistroStatsError, ValueError):
    """A variable with zero spread was passed where spread is required."""


class ShapeMismatchError(DistroStatsError, ValueError):
    """Lengths or dimensions of paired inputs do not agree."""


class SingularMatrixError(DistroStatsError, ValueError):
    """Matrix not invertible, even after ridge regularization."""


class InvalidMetricError(DistroStatsError, ValueError):
    """A quadratic form that must be nonnegative came out negative."""


class InvalidKError(DistroStatsError, ValueError):
    """Cluster count outside 1..n."""


class ParseError(DistroStatsError, ValueError):
    """Malformed table or report input; the message carries the locus."""
