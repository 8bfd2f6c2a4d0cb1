"""Exception hierarchy shared by every module."""


class ZetaMomentsError(Exception):
    """Base class for all package errors."""


class DomainError(ZetaMomentsError, ValueError):
    """Argument outside the domain of a function."""


class PoleError(DomainError):
    """Argument sits on a pole."""


class NonconvergenceError(ZetaMomentsError, ArithmeticError):
    """An iterative method failed to meet its tolerance."""


class ConvergenceError(NonconvergenceError):
    """Eigenvalue iteration exceeded its cap."""


class CapacityError(ZetaMomentsError, ValueError):
    """Request exceeds the size of a precomputed table."""


class AccuracyError(ZetaMomentsError, ValueError):
    """Requested height exceeds the configured accuracy ceiling."""


class MissedZeroError(ZetaMomentsError):
    """A Gram block could not be reconciled with its expected zero count."""


class WindowError(ZetaMomentsError, ValueError):
    """The zero table does not cover the requested zero-sum window."""


class ZeroNotFoundError(ZetaMomentsError, KeyError):
    """Ordinate is not present in the zero table."""


class DegenerateSampleError(ZetaMomentsError, ValueError):
    """Two eigenangles coincide to within the degeneracy threshold."""


class ValidationError(ZetaMomentsError, ValueError):
    """Ingested data violates an invariant."""


class ParseError(ValidationError):
    """Malformed input line."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
