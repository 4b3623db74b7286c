"""Exception types shared across the package."""


class DnormLabError(Exception):
    """Base class for all package errors."""


class PreconditionError(DnormLabError, ValueError):
    """An operation was called with inputs that violate its stated contract."""


class GridMismatchError(PreconditionError):
    """Binary operation on functions living on different grids."""


class DuplicateSpikeError(PreconditionError):
    """A step function was given two spikes at the same location."""


class NormalizationError(PreconditionError):
    """A supposed probability density does not integrate to one."""


class QuadratureNonConvergence(DnormLabError, RuntimeError):
    """Adaptive integration ran out of budget before reaching tolerance.

    Carries the partial value and the last error estimate so callers can
    report a diagnostic instead of silently trusting a bad number.
    """

    def __init__(self, message, partial_value, error_estimate):
        super().__init__(message)
        self.partial_value = float(partial_value)
        self.error_estimate = float(error_estimate)
