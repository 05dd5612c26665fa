"""Exception hierarchy shared across the package."""


class CmcRadiusError(Exception):
    """Base class for all package errors."""


class DimensionError(CmcRadiusError):
    """Hypersurface dimension outside the supported set {2, 3, 4}."""


class EmptyIntervalError(CmcRadiusError):
    """The admissible conformal-exponent interval is empty."""


class HypothesisViolation(CmcRadiusError):
    """A bound was requested outside the regime where it holds."""


class NoApplicableBound(CmcRadiusError):
    """None of the available radius bounds applies to the input."""


class PreconditionViolation(CmcRadiusError):
    """An operation was called outside its stated domain."""


class UnattainableCurvature(CmcRadiusError):
    """No geodesic sphere in the space form has the requested mean curvature."""


class NonConvergence(CmcRadiusError):
    """An iterative solver failed to converge or bracket."""


class MeshError(CmcRadiusError):
    """Invalid or degenerate mesh data."""
