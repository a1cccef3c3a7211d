"""Exception and warning types shared across the package."""


class ModelError(Exception):
    """Base class for all errors raised by hypomodel."""


class EvaluationError(ModelError):
    """An integrand produced a non-finite value."""


class AccuracyError(ModelError):
    """Requested tolerance could not be reached.

    Carries the best available estimate and its error bound.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DomainError(ModelError):
    """A point or a domain description is invalid for the operation."""


class GeometryError(DomainError):
    """Boundary parametrization is not a simple, star-shaped, ccw curve."""


class RegionError(DomainError):
    """Arguments lie outside the region where a kernel is defined."""


class SingularityError(ModelError):
    """Evaluation hit a singular point (point mass, zero of E, diagonal)."""


class TruncationError(ModelError):
    """A series operation needs coefficients beyond the stored truncation."""


class ConvergenceError(ModelError):
    """An exhaustion / extrapolation sequence failed to converge."""


class ConsistencyError(ModelError):
    """Two independent indicators that must agree disagree."""


class NearBoundaryWarning(UserWarning):
    """Evaluation point is close to the boundary; accuracy is degraded."""


class ConditioningError(ModelError):
    """Recovered coefficients do not explain the samples (aliasing)."""
