"""Exception hierarchy shared across the package."""


class UavtcError(Exception):
    """Base class for all package-specific errors."""


class DomainError(UavtcError, ValueError):
    """An argument lies outside a function's mathematical domain."""


class NumericalError(UavtcError):
    """A numerical routine failed to reach its tolerance.

    Carries the best estimate obtained so far in ``best_estimate``.
    """

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class ScenarioError(UavtcError, ValueError):
    """A scenario file or override failed validation."""


class InfeasibleTrafficError(UavtcError, ValueError):
    """Offered load cannot be stabilized by any fading threshold."""


class DegenerateFitError(UavtcError, ValueError):
    """Moment pair admits no valid two-parameter Gamma fit."""
