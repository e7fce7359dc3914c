"""Exception types shared across the package."""


class ParaEPError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(ParaEPError, ValueError):
    """Invalid parameters, state, or configuration."""


class EigenConvergenceError(ParaEPError, RuntimeError):
    """Dense eigensolver failed to converge within bounded effort."""


class IntegrationError(ParaEPError, RuntimeError):
    """Time integration failed (step-size underflow / blow-up).

    The partially computed trajectory, when available, is attached as
    ``partial`` so callers can inspect how far the run got.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class AboveThresholdError(ParaEPError, ValueError):
    """Operation requires a below-threshold (stable) working point."""


class SearchError(ParaEPError, RuntimeError):
    """A numerical search terminated without a usable result."""
