"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`QcentError`.
Argument-validation errors also subclass :class:`ValueError` so callers that
only care about bad input can catch that.
"""


class QcentError(Exception):
    """Base class for all package errors."""


class NonHermitian(QcentError, ValueError):
    pass


class NoConvergence(QcentError, ArithmeticError):
    pass


class InvalidState(QcentError, ValueError):
    pass


class NegativeWeight(QcentError, ValueError):
    pass


class OutOfRange(QcentError, ValueError):
    pass


class DimensionMismatch(QcentError, ValueError):
    pass


class UnknownDescriptor(QcentError, ValueError):
    pass


class CutoffTooLow(QcentError, ValueError):
    pass


class TailNotControlled(QcentError, ArithmeticError):
    """A truncated infinite sum could not be certified within tolerance."""


class HorizonNotReached(QcentError, ArithmeticError):
    pass


class BelowD0(QcentError, ValueError):
    pass


class EmptyIndexSet(QcentError, ValueError):
    pass


class ZeroDenominator(QcentError, ArithmeticError):
    pass


class TOutOfRange(OutOfRange):
    pass


class NotIsometry(QcentError, ValueError):
    pass


class TooLarge(QcentError, ValueError):
    pass


class BudgetExceeded(QcentError, RuntimeError):
    pass


class ParseError(QcentError, ValueError):
    pass


class SamplingBudgetExceeded(BudgetExceeded):
    pass
