"""Exception types shared across the package."""


class HmimoError(Exception):
    """Base class for all package-specific errors."""


class DegenerateOrientation(HmimoError):
    """The horizontal/vertical surface directions are not orthogonal."""


class AzimuthDegenerate(HmimoError):
    """sin(azimuth_h - azimuth_v) vanishes; the cotangent-form
    parameterization of the in-plane z displacement is singular."""


class CoincidentPoints(HmimoError):
    """Source and observation points coincide (or the center separation
    is zero); the 1/r kernel is singular there."""


class QuadratureNotConverged(HmimoError):
    """Quadrature refinement hit its limit before meeting the tolerance.

    Carries the last two matrix estimates so the caller can inspect the
    residual gap.
    """

    def __init__(self, message, previous=None, latest=None):
        super().__init__(message)
        self.previous = previous
        self.latest = latest


class OrderingMismatch(HmimoError):
    """Channel matrix and vector use different element/coordinate orderings."""


class DimensionMismatch(HmimoError):
    """Incompatible matrix/vector dimensions."""


class ZeroReference(HmimoError):
    """Normalized MSE requested against an all-zero reference channel."""


class ConfigError(HmimoError):
    """Invalid or incomplete experiment configuration."""
