"""Exception types shared across the package."""


class SpherebotError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(SpherebotError):
    """Invalid physical parameters or configuration values."""


class ParameterDomainError(ParameterError):
    """Parameters outside the domain of a closed-form expression."""


class DegenerateConfigurationError(SpherebotError):
    """The constrained mass matrix is numerically singular.

    Carries the conditioning estimate of the augmented system so callers
    can report how close to singular the configuration was.
    """

    def __init__(self, message, cond_estimate=None):
        super().__init__(message)
        self.cond_estimate = cond_estimate


class DynamicsError(SpherebotError):
    """A derivative evaluation produced a non-finite result.

    The offending state is attached for diagnosis.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class StiffnessError(SpherebotError):
    """The adaptive integrator underflowed its step size."""


class InsufficientDataError(SpherebotError):
    """A trajectory is too short to extract the requested metric."""


class NotCircularError(SpherebotError):
    """The path deviates too far from a circle to report a radius."""


class LinearizationSingularityError(SpherebotError):
    """The wobble-control gain G_theta is below the singularity floor."""


class ScenarioError(SpherebotError):
    """Unknown scenario name or invalid scenario definition."""


class IncompleteRunError(SpherebotError):
    """A report was requested over an artifact set with missing files."""
