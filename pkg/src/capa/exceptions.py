"""Exception types raised by the capa package."""


class CapaError(Exception):
    """Base class for all package errors."""


class SingularityError(CapaError, ValueError):
    """Observation point coincides with a source point."""


class ConfigError(CapaError, ValueError):
    """Invalid geometry, region or experiment configuration."""


class AssumptionViolation(CapaError, ValueError):
    """User channels are (numerically) linearly dependent.

    Raised when a correlation or Gram matrix is singular or too badly
    conditioned for the closed-form beamformers to be meaningful.
    """


class RankDeficiencyError(AssumptionViolation):
    """A family of sampled functions does not have full rank."""
