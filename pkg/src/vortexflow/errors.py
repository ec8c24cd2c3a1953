"""Exception types raised across the package."""


class VortexFlowError(Exception):
    """Base class for all errors raised by vortexflow."""


class PoleSingularity(VortexFlowError):
    """Point too close to the north pole to be represented in the chart."""


class CoincidentVortices(VortexFlowError):
    pass


class NearCollision(VortexFlowError):
    pass


class DegreeAssumptionViolated(VortexFlowError):
    """A collision cluster has net degree outside {-1, 0, 1}."""


class PoleEscape(VortexFlowError):
    """A vortex approached the north pole during integration.

    The partially integrated trace is attached as ``trace``.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class CapAssumptionViolated(VortexFlowError):
    pass


class ResolutionError(VortexFlowError):
    pass


class SeparationError(VortexFlowError):
    pass


class BlowUp(VortexFlowError):
    pass


class UnresolvedCore(VortexFlowError):
    pass


class TrackingLoss(VortexFlowError):
    pass


class ConfigError(VortexFlowError):
    pass
