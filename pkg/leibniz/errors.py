"""
Exception types raised by the toolkit.

Every error also derives from ValueError, so callers that only know about
ValueError keep working.
"""


class LeibnizError(ValueError):
    """Base class for toolkit errors."""


class DimensionMismatchError(LeibnizError):
    """Vectors, measures or matrices of incompatible size were combined."""


class PreconditionError(LeibnizError):
    """An operation was called outside of its stated domain."""


class NonInvertibleError(PreconditionError):
    """A variable or matrix that must be invertible is (numerically) singular."""


class NonFaithfulStateError(PreconditionError):
    """A density matrix is not positive definite or not normalized."""


class UnsupportedExponentError(PreconditionError):
    """The exponent p is outside the range an operation supports."""


class EnumerationLimitError(PreconditionError):
    """An enumeration was requested above its size guard."""
