"""Boundary and area quadrature on planar domains.

Boundary integrals use the trapezoidal rule in the curve parameter, which is
spectrally accurate for smooth periodic parametrizations.  Area integrals use
a radial tensor grid (Gauss-Legendre in the radial variable, trapezoidal in
the angle) around an interior anchor.  Weakly singular integrands are handled
by a smooth partition of unity: near each declared singular point a local
polar rule carries the singular part, and the global grid carries the rest.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AccuracyError, DomainError, EvaluationError

DEFAULT_BOUNDARY_NODES = 512
MAX_REFINEMENT_DEPTH = 12

# base grid size at level 0; each level multiplies node counts by sqrt(2)
_BASE_NR = 24
_BASE_NT = 48
_LOCAL_NR = 16
_LOCAL_NT = 32


@lru_cache(maxsize=64)
def gauss_legendre01(n):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


@dataclass(frozen=True)
class BoundaryQuadrature:
    """Trapezoidal rule on a closed parametrized curve.

    ``nodes`` are the points zeta_j, ``d_elements`` the complex line elements
    zeta'(t_j) * h, ``params`` the parameter values t_j on [0, 2*pi) and
    ``tangents`` the derivatives zeta'(t_j).
    """

    nodes: np.ndarray
    d_elements: np.ndarray
    params: np.ndarray
    tangents: np.ndarray
    ccw: bool = True

    def __post_init__(self):
        n = len(self.nodes)
        if n <= 0 or n % 2:
            raise ValueError(f"node count must be a positive even integer, got {n}")

    def __len__(self):
        return len(self.nodes)

    @property
    def step(self):
        return 2 * np.pi / len(self.nodes)

    def winding_error(self, z0):
        """|sum dzeta/(zeta - z0) - 2*pi*i| for an interior point z0."""
        s = np.sum(self.d_elements / (self.nodes - z0))
        return abs(s - 2j * np.pi)


def trapezoid_curve(curve, dcurve, n=DEFAULT_BOUNDARY_NODES):
    """Build a BoundaryQuadrature from callables t -> zeta(t), t -> zeta'(t)."""
    n = int(n) + (int(n) % 2)
    t = 2 * np.pi * np.arange(n) / n
    z = np.asarray(curve(t), dtype=complex)
    dz = np.asarray(dcurve(t), dtype=complex)
    return BoundaryQuadrature(z, dz * (2 * np.pi / n), t, dz)


def _check_finite(values, nodes):
    bad = ~np.isfinite(values)
    if np.any(bad):
        j = int(np.flatnonzero(bad)[0])
        raise EvaluationError(f"integrand is not finite at node {j}: zeta = {nodes[j]!r}")


def integrate_boundary(f, q):
    """Return sum_j f(zeta_j) dzeta_j."""
    vals = np.asarray(f(q.nodes), dtype=complex)
    vals = np.broadcast_to(vals, q.nodes.shape)
    _check_finite(vals, q.nodes)
    return complex(np.sum(vals * q.d_elements))


def _bump(s):
    """Smooth cutoff: 1 for s <= 0.3, 0 for s >= 1, C-infinity in between."""
    s = np.asarray(s, dtype=float)

    def sig(x):
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = np.exp(-1.0 / x[pos])
        return out

    a = sig(1.0 - s)
    b = sig(s - 0.3)
    return a / (a + b)


def _level_size(base, level):
    n = int(round(base * 2.0 ** (level / 2.0)))
    return n + (n % 2)


@dataclass(frozen=True)
class AreaQuadrature:
    """Positive-weight area rule on a domain.

    The rule remembers how it was built (domain, level, refinement points and
    radius) so that it can be rebuilt at the next refinement level.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: object = field(repr=False, default=None)
    level: int = 0
    points: tuple = ()
    radius: float = 0.0

    def __len__(self):
        return len(self.nodes)

    @property
    def total_weight(self):
        return float(np.sum(self.weights))

    def at_level(self, level):
        q = area_quadrature(self.domain, level)
        if self.points:
            q = refine_near(q, self.points, self.radius)
        return q


def area_quadrature(domain, level=0):
    """Radial tensor rule on ``domain`` at the given refinement level."""
    nr = _level_size(_BASE_NR, level)
    nt = _level_size(_BASE_NT, level)
    nodes, weights = domain.radial_rule(nr, nt)
    keep = weights > 0
    return AreaQuadrature(nodes[keep], weights[keep], domain, level)


def _local_polar(center, rho, level):
    nr = _level_size(_LOCAL_NR, level)
    nt = _level_size(_LOCAL_NT, level)
    r, wr = gauss_legendre01(nr)
    r = r * rho
    wr = wr * rho
    th = 2 * np.pi * np.arange(nt) / nt
    R, T = np.meshgrid(r, th, indexing="ij")
    nodes = center + R * np.exp(1j * T)
    weights = (wr[:, None] * R) * (2 * np.pi / nt)
    return nodes.ravel(), weights.ravel()


def refine_near(q, points, radius):
    """Return a rule with extra local polar resolution around ``points``.

    Around each point p a smooth bump psi_p (supported in a disk of radius at
    most ``radius``, kept inside the domain and disjoint from the other bumps)
    splits the integrand; the base nodes carry (1 - sum psi_p) and a polar
    rule centred at p carries psi_p.  A 1/|zeta - p| singularity is cancelled
    by the polar Jacobian.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    pts = []
    for p in np.atleast_1d(np.asarray(points, dtype=complex)):
        dist = float(q.domain.boundary_distance(p))
        inside = bool(q.domain.contains(p))
        if not inside and dist > 1e-12:
            raise DomainError(f"refinement point {p!r} lies outside the closed domain")
        if not any(abs(p - o) < 1e-14 for o in pts):
            pts.append(complex(p))
    if not pts:
        return q
    base_nodes = q.nodes
    base_w = q.weights.copy()
    if q.points:
        # rebuild from the unrefined rule so refinements do not stack
        raw = area_quadrature(q.domain, q.level)
        base_nodes, base_w = raw.nodes, raw.weights.copy()
        pts = list(dict.fromkeys(list(q.points) + pts))
    factor = np.ones_like(base_w)
    extra_nodes, extra_w = [], []
    for i, p in enumerate(pts):
        rho = radius
        rho = min(rho, 0.5 * float(q.domain.boundary_distance(p)))
        others = [abs(p - o) for j, o in enumerate(pts) if j != i]
        if others:
            rho = min(rho, 0.45 * min(others))
        if rho <= 1e-13:
            continue
        factor -= _bump(np.abs(base_nodes - p) / rho)
        ln, lw = _local_polar(p, rho, q.level)
        lw = lw * _bump(np.abs(ln - p) / rho)
        keep = lw > 0
        extra_nodes.append(ln[keep])
        extra_w.append(lw[keep])
    w = base_w * factor
    keep = w > 0
    nodes = np.concatenate([base_nodes[keep]] + extra_nodes)
    weights = np.concatenate([w[keep]] + extra_w)
    return AreaQuadrature(nodes, weights, q.domain, q.level, tuple(pts), float(radius))


def integrate_area(f, q, tol=None, singular_points=(), radius=None,
                   max_depth=MAX_REFINEMENT_DEPTH, full_output=False):
    """Integrate ``f`` over the domain of ``q``.

    Without ``tol`` this is the plain sum  sum_j f(node_j) w_j.  With ``tol``
    the rule is rebuilt at increasing levels until two consecutive levels
    agree to within ``tol`` (absolute); the difference is the error estimate.
    Declared ``singular_points`` get local polar refinement.
    """
    if len(singular_points):
        if radius is None:
            radius = 0.25 * q.domain.inradius
        q = refine_near(q, singular_points, radius)

    def total(rule):
        vals = np.asarray(f(rule.nodes), dtype=complex)
        vals = np.broadcast_to(vals, rule.nodes.shape)
        _check_finite(vals, rule.nodes)
        return complex(np.sum(vals * rule.weights))

    value = total(q)
    if tol is None:
        return (value, np.nan) if full_output else value
    err = np.inf
    level = q.level
    while level < max_depth:
        level += 1
        new = total(q.at_level(level))
        err = abs(new - value)
        value = new
        if err < tol:
            return (value, err) if full_output else value
    raise AccuracyError(
        f"area quadrature did not reach tol={tol:g} (estimate {value}, error {err:g})",
        estimate=value, error=err)

