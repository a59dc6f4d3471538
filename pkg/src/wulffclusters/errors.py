"""Exception types shared across the package."""


class WulffClustersError(Exception):
    """Base class for all package errors."""


class ZeroVector(WulffClustersError):
    """A density or gradient was requested at (numerically) the origin."""


class NotDifferentiable(WulffClustersError):
    """The density has no gradient at the requested direction."""


class NotRegular(WulffClustersError):
    """Operation requires a C^2, uniformly convex, symmetric anisotropy."""


class UnsupportedKind(WulffClustersError):
    """No rule is known for this anisotropy kind (e.g. no smoothing rule)."""


class DegenerateIntersection(WulffClustersError):
    """Half-plane intersection collapsed; the input density is malformed."""


class DuplicateVertex(WulffClustersError):
    """A polyline contains two consecutive identical vertices."""


class NoConvergence(WulffClustersError):
    """An iterative solver failed to converge.

    The best iterate found so far, if any, is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class RadiusTooSmall(WulffClustersError):
    """The ball radius R does not dominate the scaled Wulff diameter."""


class DimensionMismatch(WulffClustersError):
    """Coordinate vector does not match the problem topology."""


class TopologyMismatch(WulffClustersError):
    """Two clusters cannot be compared (different interface structure)."""


class ConstraintUnsatisfiable(WulffClustersError):
    """The grid cannot host the requested number of mass cells."""
