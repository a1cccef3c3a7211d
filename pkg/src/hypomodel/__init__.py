"""Numerical model of a hyponormal-operator Hilbert space attached to a planar domain.

The space is built from the exponential transform of a domain's
characteristic function; elements are germs at infinity of Cauchy
transforms, acted on by multiplication by z (Z) and by the Schwarz
function (Z*).
"""
from .domain import Disk, Domain, Ellipse, SmoothDomain, from_dict
from .errors import (AccuracyError, ConditioningError, ConsistencyError, ConvergenceError,
                     DomainError, EvaluationError, GeometryError, ModelError,
                     NearBoundaryWarning, RegionError, SingularityError, TruncationError)
from .hilbert import (EpsilonSchedule, HElement, gram_matrix, inner_product_H, inner_product_O,
                      k_a, norm_H, null_test, reproducing_kernel_L)
from .kernels import KernelEvaluator, cauchy_boundary, cauchy_integral
from .operators import (OperatorMatrix, calibrate_sign, commutator_apply, matrix_truncation,
                        op_Z, op_Z_boundary, op_Z_star, op_Z_star_boundary, resolvent_Z,
                        resolvent_Z_star, resolvent_Z_star_series, resolvent_Z_tail)
from .series import LaurentTail, TwoSidedSeries, evaluate, residue_at_infinity

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
