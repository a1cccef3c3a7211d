"""Planar domains: disks, ellipses and smooth trigonometric-polynomial curves.

Every domain is simply connected, bounded by a counterclockwise analytic
curve t -> zeta(t), t in [0, 2 pi), and star-shaped about an interior
``anchor``.  Star-shapedness is what makes two things cheap: the radial area
rule p + r (zeta(t) - p), and the exhaustion by scaling about the anchor.
"""
from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from .errors import DomainError, GeometryError
from .quadrature import (DEFAULT_BOUNDARY_NODES, area_quadrature, gauss_legendre01,
                         trapezoid_curve)
from .series import TwoSidedSeries

GEOMETRIC_TOL = 1e-12
_SAMPLES = 1024


class Domain:
    """Common machinery; subclasses provide the parametrization."""

    kind = "abstract"
    anchor: complex = 0j

    # -- parametrization -------------------------------------------------
    def boundary(self, t):
        raise NotImplementedError

    def dboundary(self, t):
        raise NotImplementedError

    def d2boundary(self, t):
        raise NotImplementedError

    def boundary_quadrature(self, n=DEFAULT_BOUNDARY_NODES):
        return trapezoid_curve(self.boundary, self.dboundary, n)

    # -- geometry ---------------------------------------------------------
    @cached_property
    def _dense(self):
        t = 2 * np.pi * np.arange(_SAMPLES) / _SAMPLES
        return t, self.boundary(t)

    def nearest_parameter(self, z):
        """Parameter t* of the boundary point closest to z (vectorized)."""
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        t_s, zeta_s = self._dense
        out = np.empty(flat.shape)
        chunk = 256
        for i in range(0, len(flat), chunk):
            zz = flat[i:i + chunk]
            j = np.argmin(np.abs(zeta_s[None, :] - zz[:, None]), axis=1)
            t = t_s[j].copy()
            h = 2 * np.pi / _SAMPLES
            # Newton on d/dt |zeta(t) - z|^2 / 2, kept inside the bracketing cell
            for _ in range(8):
                d = self.boundary(t) - zz
                d1 = self.dboundary(t)
                d2 = self.d2boundary(t)
                g = np.real(np.conj(d) * d1)
                gp = np.abs(d1) ** 2 + np.real(np.conj(d) * d2)
                step = np.where(gp > 0, g / np.where(gp > 0, gp, 1.0), 0.0)
                t = t - np.clip(step, -h, h)
            out[i:i + chunk] = np.mod(t, 2 * np.pi)
        return out.reshape(z.shape)

    def boundary_distance(self, z):
        z = np.asarray(z, dtype=complex)
        d = np.abs(self.boundary(self.nearest_parameter(z)) - z)
        return float(d) if d.ndim == 0 else d

    def contains(self, z):
        """True on the open domain; points within 1e-12 of the boundary are excluded."""
        z = np.asarray(z, dtype=complex)
        t = self.nearest_parameter(z)
        d = z - self.boundary(t)
        # left of the tangent at the nearest point means inside for a ccw curve
        side = np.imag(np.conj(self.dboundary(t)) * d)
        res = (side > 0) & (np.abs(d) > GEOMETRIC_TOL)
        return bool(res) if res.ndim == 0 else res

    @cached_property
    def area(self):
        q = self.boundary_quadrature(2048)
        return float(np.real(np.sum(np.conj(q.nodes) * q.d_elements) / 2j))

    @cached_property
    def outer_radius(self):
        """R_Omega: radius of the smallest origin-centred disk containing the closure."""
        return float(np.max(np.abs(self._dense[1]))) * (1 + 1e-9)

    @cached_property
    def diameter(self):
        z = self._dense[1][::4]
        return float(np.max(np.abs(z[:, None] - z[None, :])))

    @cached_property
    def inradius(self):
        """Distance from the anchor to the boundary."""
        return float(self.boundary_distance(self.anchor))

    # -- area quadrature ----------------------------------------------------
    def radial_rule(self, nr, nt):
        r, wr = gauss_legendre01(nr)
        t = 2 * np.pi * np.arange(nt) / nt
        zeta = self.boundary(t)
        jac = np.imag(np.conj(zeta - self.anchor) * self.dboundary(t))
        nodes = self.anchor + r[:, None] * (zeta - self.anchor)[None, :]
        weights = (wr * r)[:, None] * jac[None, :] * (2 * np.pi / nt)
        return nodes.ravel(), weights.ravel()

    def area_quadrature(self, level=0):
        return area_quadrature(self, level)

    def _check_star_shaped(self):
        t = 2 * np.pi * np.arange(4 * _SAMPLES) / (4 * _SAMPLES)
        jac = np.imag(np.conj(self.boundary(t) - self.anchor) * self.dboundary(t))
        if np.min(jac) <= 0:
            raise GeometryError("boundary is not star-shaped about the anchor "
                                f"(radial Jacobian min {np.min(jac):.3g})")

    # -- moments --------------------------------------------------------------
    def boundary_moment(self, k, n=DEFAULT_BOUNDARY_NODES):
        """M_k = (1/2 pi i) oint conj(zeta) zeta^k dzeta, any integer k."""
        if k < 0 and not self.contains(0):
            raise DomainError("interior moments need 0 inside the domain")
        q = self.boundary_quadrature(n)
        return complex(np.sum(np.conj(q.nodes) * q.nodes ** k * q.d_elements) / (2j * np.pi))

    def exterior_moments(self, K):
        """M_0..M_K with M_k = (1/pi) int_Omega zeta^k dA."""
        if K < 0:
            raise ValueError("K must be nonnegative")
        return np.array([self.boundary_moment(k, self._moment_nodes(k)) for k in range(K + 1)])

    def _moment_nodes(self, k):
        return max(DEFAULT_BOUNDARY_NODES, 8 * abs(k) + 64)

    def schwarz_series(self, K_int, K_ext):
        if not self.contains(0):
            raise DomainError("the expansion point 0 must lie inside the domain")
        interior = [self.boundary_moment(-m - 1, self._moment_nodes(m)) for m in range(K_int)]
        return TwoSidedSeries(interior, self.exterior_moments(K_ext), radius=self.outer_radius)

    # closed-form Schwarz function, if available
    has_closed_form = False

    def schwarz(self, z):
        raise NotImplementedError(f"no closed-form Schwarz function for {self.kind}")

    def shrink(self, eps):
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


class Disk(Domain):
    kind = "disk"
    has_closed_form = True

    def __init__(self, center=0j, r=1.0):
        if not r > 0:
            raise GeometryError(f"disk radius must be positive, got {r}")
        self.center = complex(center)
        self.r = float(r)
        self.anchor = self.center

    def __repr__(self):
        return f"Disk(center={self.center!r}, r={self.r!r})"

    def boundary(self, t):
        return self.center + self.r * np.exp(1j * np.asarray(t, dtype=float))

    def dboundary(self, t):
        return 1j * self.r * np.exp(1j * np.asarray(t, dtype=float))

    def d2boundary(self, t):
        return -self.r * np.exp(1j * np.asarray(t, dtype=float))

    def nearest_parameter(self, z):
        z = np.asarray(z, dtype=complex)
        return np.mod(np.angle(z - self.center), 2 * np.pi)

    def boundary_distance(self, z):
        d = np.abs(np.abs(np.asarray(z, dtype=complex) - self.center) - self.r)
        return float(d) if np.ndim(d) == 0 else d

    def contains(self, z):
        res = np.abs(np.asarray(z, dtype=complex) - self.center) < self.r - GEOMETRIC_TOL
        return bool(res) if np.ndim(res) == 0 else res

    @cached_property
    def area(self):
        return math.pi * self.r ** 2

    @cached_property
    def outer_radius(self):
        return abs(self.center) + self.r

    @cached_property
    def diameter(self):
        return 2 * self.r

    def schwarz(self, z):
        z = np.asarray(z, dtype=complex)
        return np.conj(self.center) + self.r ** 2 / (z - self.center)

    def exterior_moments(self, K):
        if K < 0:
            raise ValueError("K must be nonnegative")
        return self.r ** 2 * self.center ** np.arange(K + 1)

    def schwarz_series(self, K_int, K_ext):
        if not self.contains(0):
            raise DomainError("the expansion point 0 must lie inside the domain")
        interior = np.zeros(max(K_int, 1), complex)
        interior[0] = np.conj(self.center)
        return TwoSidedSeries(interior[:max(K_int, 1)], self.exterior_moments(K_ext),
                              interior_complete=True,
                              exterior_complete=self.center == 0,
                              radius=self.outer_radius)

    def shrink(self, eps):
        _check_eps(eps)
        s = 1 - eps
        return Disk(self.anchor + s * (self.center - self.anchor), s * self.r)

    def to_dict(self):
        return {"kind": "disk", "center": [self.center.real, self.center.imag], "r": self.r}


class Ellipse(Domain):
    """x^2/a^2 + y^2/b^2 < 1 with a > b > 0."""

    kind = "ellipse"
    has_closed_form = True

    def __init__(self, a=2.0, b=1.0):
        a, b = float(a), float(b)
        if not a > b > 0:
            raise GeometryError(f"ellipse needs a > b > 0, got a={a}, b={b}")
        self.a, self.b = a, b
        self.c = math.sqrt(a * a - b * b)
        self.anchor = 0j

    def __repr__(self):
        return f"Ellipse(a={self.a!r}, b={self.b!r})"

    def boundary(self, t):
        t = np.asarray(t, dtype=float)
        return self.a * np.cos(t) + 1j * self.b * np.sin(t)

    def dboundary(self, t):
        t = np.asarray(t, dtype=float)
        return -self.a * np.sin(t) + 1j * self.b * np.cos(t)

    def d2boundary(self, t):
        return -self.boundary(t)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        level = np.sqrt((z.real / self.a) ** 2 + (z.imag / self.b) ** 2)
        # (1 - level) * b bounds the distance to the boundary from below
        res = (level < 1) & ((1 - level) * self.b > GEOMETRIC_TOL)
        near = (level < 1) & ~res
        if np.any(near):
            res = res | (near & (self.boundary_distance(z) > GEOMETRIC_TOL))
        return bool(res) if res.ndim == 0 else res

    @cached_property
    def area(self):
        return math.pi * self.a * self.b

    @cached_property
    def outer_radius(self):
        return self.a

    @cached_property
    def diameter(self):
        return 2 * self.a

    def schwarz(self, z):
        """Closed-form S(z); the square root has its cut on the focal segment."""
        z = np.asarray(z, dtype=complex)
        a, b, c = self.a, self.b, self.c
        root = np.sqrt(z - c) * np.sqrt(z + c)
        return ((a * a + b * b) * z - 2 * a * b * root) / (c * c)

    def exterior_moments(self, K):
        if K < 0:
            raise ValueError("K must be nonnegative")
        out = np.zeros(K + 1, complex)
        ab = self.a * self.b
        q = self.c ** 2 / 4
        for m in range(K // 2 + 1):
            out[2 * m] = ab * math.comb(2 * m, m) / (m + 1) * q ** m
        return out

    def schwarz_series(self, K_int, K_ext):
        interior = np.zeros(max(K_int, 2), complex)
        interior[1] = (self.a - self.b) / (self.a + self.b)
        return TwoSidedSeries(interior, self.exterior_moments(K_ext),
                              interior_complete=True, exterior_complete=False,
                              radius=self.outer_radius)

    def shrink(self, eps):
        _check_eps(eps)
        return Ellipse((1 - eps) * self.a, (1 - eps) * self.b)

    def to_dict(self):
        return {"kind": "ellipse", "a": self.a, "b": self.b}


class SmoothDomain(Domain):
    """Domain bounded by zeta(t) = sum_k c_k e^{i k t}.

    ``coeffs`` maps integer frequencies to complex coefficients.  The curve
    must be simple, counterclockwise and star-shaped about ``anchor``.
    """

    kind = "smooth"

    def __init__(self, coeffs, anchor=0j):
        self.coeffs = {int(k): complex(v) for k, v in dict(coeffs).items() if v != 0}
        if not self.coeffs:
            raise GeometryError("empty boundary parametrization")
        self._k = np.array(sorted(self.coeffs))
        self._c = np.array([self.coeffs[k] for k in self._k])
        self.anchor = complex(anchor)
        self._validate()

    def __repr__(self):
        return f"SmoothDomain(coeffs={self.coeffs!r}, anchor={self.anchor!r})"

    def _eval(self, t, power):
        t = np.asarray(t)
        ph = np.exp(1j * np.multiply.outer(t, self._k))
        return ph @ (self._c * (1j * self._k) ** power)

    def boundary(self, t):
        return self._eval(t, 0)

    def dboundary(self, t):
        return self._eval(t, 1)

    def d2boundary(self, t):
        return self._eval(t, 2)

    def _validate(self):
        n = 512
        t = 2 * np.pi * np.arange(n) / n
        z = self.boundary(t)
        if np.min(np.abs(self.dboundary(t))) < 1e-10:
            raise GeometryError("parametrization has a vanishing derivative")
        signed = np.real(np.sum(np.conj(z) * self.dboundary(t)) / 2j) * 2 * np.pi / n
        if signed <= 0:
            raise GeometryError("boundary must be oriented counterclockwise")
        if _self_intersects(z):
            raise GeometryError("boundary curve intersects itself")
        self._check_star_shaped()
        if not self.contains(self.anchor):
            raise GeometryError(f"anchor {self.anchor!r} is not inside the domain")

    def schwarz(self, z, iterations=30):
        """Continuation of conj(zeta) off the boundary, valid near the curve.

        Solves zeta(tau) = z for complex tau by Newton's method started at
        the nearest boundary parameter, then returns sum conj(c_k) e^{-i k tau}.
        """
        z = np.asarray(z, dtype=complex)
        tau = self.nearest_parameter(z).astype(complex)
        for _ in range(iterations):
            step = (self._eval(tau, 0) - z) / self._eval(tau, 1)
            tau = tau - step
            if np.all(np.abs(step) < 1e-15):
                break
        ph = np.exp(-1j * np.multiply.outer(tau, self._k))
        return ph @ np.conj(self._c)

    def shrink(self, eps):
        _check_eps(eps)
        s = 1 - eps
        c = {k: s * v for k, v in self.coeffs.items()}
        c[0] = self.anchor + s * (self.coeffs.get(0, 0j) - self.anchor)
        return SmoothDomain(c, self.anchor)

    def to_dict(self):
        return {"kind": "smooth", "anchor": [self.anchor.real, self.anchor.imag],
                "coeffs": {str(k): [v.real, v.imag] for k, v in self.coeffs.items()}}


def _check_eps(eps):
    if not 0 < eps < 1:
        raise ValueError(f"shrink factor must lie in (0, 1), got {eps}")


def _self_intersects(z):
    """Discrete check: do any two non-adjacent polygon edges cross?"""
    p = z
    q = np.roll(z, -1)
    n = len(z)

    def orient(a, b, c):
        return np.sign(np.imag(np.conj(b - a) * (c - a)))

    for i in range(n):
        j = np.arange(i + 2, n)
        if i == 0:
            j = j[j != n - 1]
        if not len(j):
            continue
        o1 = orient(p[i], q[i], p[j])
        o2 = orient(p[i], q[i], q[j])
        o3 = orient(p[j], q[j], p[i])
        o4 = orient(p[j], q[j], q[i])
        if np.any((o1 * o2 < 0) & (o3 * o4 < 0)):
            return True
    return False


def from_dict(d):
    """Build a domain from a plain mapping (as read from a JSON config)."""
    kind = d.get("kind", d.get("domain"))
    try:
        if kind == "disk":
            c = d.get("center", 0)
            if isinstance(c, (list, tuple)):
                c = complex(c[0], c[1])
            return Disk(complex(c), float(d.get("r", 1.0)))
        if kind == "ellipse":
            return Ellipse(float(d.get("a", 2.0)), float(d.get("b", 1.0)))
        if kind == "smooth":
            raw = d["coeffs"]
            coeffs = {}
            for k, v in raw.items():
                coeffs[int(k)] = complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
            a = d.get("anchor", 0)
            if isinstance(a, (list, tuple)):
                a = complex(a[0], a[1])
            return SmoothDomain(coeffs, complex(a))
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"invalid {kind} description: {exc}") from exc
    raise DomainError(f"unknown domain kind {kind!r}")
