"""Exception types shared across the package."""


class PcohError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(PcohError, ValueError):
    """Operands have incompatible shapes or factor dimensions."""


class ValidationError(PcohError, ValueError):
    """Input violates a documented precondition or invariant."""


class ConditioningError(ValidationError):
    """Conditioning on an event of (numerically) zero probability."""


class SolverFailure(PcohError, RuntimeError):
    """A numerical routine did not reach its residual targets.

    Carries the diagnostics that were available when the routine gave up so
    callers can report them instead of silently retrying.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = dict(residuals) if residuals else {}
