"""Cauchy transforms and the exponential-transform kernel family.

For rho = chi_Omega the double area integral defining E collapses to a single
boundary integral.  Applying the Cauchy-Pompeiu formula to
u(zeta) = log|zeta - w|^2 (whose d/dzeta-bar is 1/(zeta-bar - w-bar)) gives

    (1/pi) int_Omega dA / ((zeta - z)(zeta-bar - w-bar))
        = B(z, w) - chi_Omega(z) log|z - w|^2,
    B(z, w) = (1/2 pi i) oint log|zeta - w|^2 dzeta / (zeta - z),

so that E = exp(-B) |z - w|^2 for z inside and E = exp(-B) for z outside.
In particular H = exp(-B) on Omega x Omega is smooth across the diagonal.

Disks and ellipses also have rational/algebraic closed forms, all written in
terms of H and the Schwarz function S:

    z in,  w in :  E = H |z - w|^2
    z in,  w out:  E = H (z - conj S(w)) (z-bar - w-bar)
    z out, w out:  E = H (z - conj S(w)) (S(z) - w-bar)
"""
from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field

import numpy as np

from .domain import Disk, Ellipse
from .errors import (DomainError, NearBoundaryWarning, RegionError, SingularityError)
from .quadrature import DEFAULT_BOUNDARY_NODES, integrate_area

NEAR_BOUNDARY = 1e-6
_MAX_NODES = 1 << 17
_ELLIPSE_C_CACHE: dict = {}


def nodes_for_distance(domain, d, n_min=DEFAULT_BOUNDARY_NODES):
    """Trapezoid node count resolving a singularity at distance d from the curve."""
    t = np.linspace(0, 2 * np.pi, 256, endpoint=False)
    vmax = float(np.max(np.abs(domain.dboundary(t))))
    d = max(float(d), 1e-300)
    n = int(math.ceil(34 * vmax / d))
    n = max(n_min, min(n, _MAX_NODES))
    return n + (n % 2)


def cauchy_integral(domain, f, z, n=None):
    """Phi(z) = (1/2 pi i) oint f(zeta) dzeta / (zeta - z) for z off the curve.

    ``f`` is a callable on boundary points.  The first-order expansion
    f(zeta*) + f'(zeta*)(zeta - zeta*) about the nearest boundary point is
    subtracted and its exact integral chi_Omega(z) (f(zeta*) + f'(zeta*)(z - zeta*))
    added back; the node count also grows as z approaches the curve.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, complex)
    dist = np.atleast_1d(domain.boundary_distance(z))
    inside = np.atleast_1d(domain.contains(z))
    t_near = np.atleast_1d(domain.nearest_parameter(z))
    p_near = domain.boundary(t_near)
    f_near = np.asarray(f(p_near), dtype=complex) * np.ones(z.shape)
    dt = 1e-4
    df = (np.asarray(f(domain.boundary(t_near + dt)), dtype=complex)
          - np.asarray(f(domain.boundary(t_near - dt)), dtype=complex)) / (2 * dt)
    fp = df / domain.dboundary(t_near) * np.ones(z.shape)
    need = np.array([nodes_for_distance(domain, d, n or DEFAULT_BOUNDARY_NODES) for d in dist])
    for nn in np.unique(need):
        idx = np.flatnonzero(need == nn)
        q = domain.boundary_quadrature(int(nn))
        fv = np.asarray(f(q.nodes), dtype=complex) * np.ones(len(q.nodes))
        for chunk in np.array_split(idx, max(1, len(idx) * int(nn) // 4_000_000 + 1)):
            zz = z[chunk]
            ker = q.d_elements[None, :] / (q.nodes[None, :] - zz[:, None])
            lin = f_near[chunk, None] + fp[chunk, None] * (q.nodes[None, :] - p_near[chunk, None])
            s = (ker * (fv[None, :] - lin)).sum(axis=1) / (2j * np.pi)
            out[chunk] = s + inside[chunk] * (f_near[chunk] + fp[chunk] * (zz - p_near[chunk]))
    return out


def cauchy_boundary(f, domain, z, n=None):
    """Signed boundary Cauchy transform, -(1/2 pi i) oint f dzeta/(zeta - z).

    Returns ``(side, value)`` where side is "interior" or "exterior".  Inside
    the value is -f_+(z); outside it is f_-(z), so that f_+ + f_- = f on the
    curve.
    """
    z0 = complex(z)
    d = domain.boundary_distance(z0)
    if d <= 1e-12:
        raise RegionError("Cauchy transform is not defined on the boundary itself")
    if d < NEAR_BOUNDARY:
        warnings.warn(f"point {z0!r} is {d:.2g} from the boundary; accuracy degraded",
                      NearBoundaryWarning, stacklevel=2)
    side = "interior" if domain.contains(z0) else "exterior"
    return side, complex(-cauchy_integral(domain, f, z0, n)[0])


@dataclass(frozen=True)
class CauchyDensity:
    """A measure given by point masses, an area density, or a boundary density.

    ``masses`` is a sequence of (location, weight); ``density`` is a callable
    g with d mu = g dA on Omega; ``boundary`` is a callable f with
    d mu = (1/2i) f dzeta on the curve.
    """

    domain: object
    masses: tuple = ()
    density: object = None
    boundary: object = None

    def __post_init__(self):
        for a, _ in self.masses:
            if not (self.domain.contains(a) or self.domain.boundary_distance(a) <= 1e-12):
                raise DomainError(f"point mass at {a!r} lies outside the closed domain")


def cauchy_area(mu, z, tol=1e-11):
    """C[mu](z) = -(1/pi) int d mu(zeta) / (zeta - z)."""
    z = complex(z)
    d = mu.domain
    total = 0j
    for a, c in mu.masses:
        if abs(complex(a) - z) < 1e-14:
            raise SingularityError(f"evaluation point coincides with the point mass at {a!r}")
        total += -c / (math.pi * (complex(a) - z))
    if mu.density is not None:
        g = mu.density
        sing = [z] if d.contains(z) else []
        val = integrate_area(lambda s: g(s) / (s - z), d.area_quadrature(), tol=tol,
                             singular_points=sing)
        total += -val / math.pi
    if mu.boundary is not None:
        total += cauchy_boundary(mu.boundary, d, z)[1]
    return total


# ---------------------------------------------------------------------------
# closed forms


def ellipse_constant(a, b, tol=1e-13):
    """Normalizing constant of the ellipse H kernel.

    Chosen so that (1/pi) int_Omega H(z, 0) dA(z) = 1.
    """
    key = (float(a), float(b))
    if key not in _ELLIPSE_C_CACHE:
        dom = Ellipse(a, b)
        c2 = a * a - b * b
        raw = integrate_area(lambda z: 1.0 / (4 * a * a * b * b + c2 * z * z),
                             dom.area_quadrature(), tol=tol)
        _ELLIPSE_C_CACHE[key] = math.pi / raw.real
    return _ELLIPSE_C_CACHE[key]


def _H_closed(domain, z, w):
    if isinstance(domain, Disk):
        c = domain.center
        return 1.0 / (domain.r ** 2 - (z - c) * np.conj(w - c))
    a, b, c2 = domain.a, domain.b, domain.c ** 2
    C = ellipse_constant(a, b)
    wb = np.conj(w)
    return C / (4 * a * a * b * b + c2 * (z * z + wb * wb) - 2 * (a * a + b * b) * z * wb)


def s_plus_closed(domain, z):
    if isinstance(domain, Disk):
        return np.conj(domain.center) + 0 * z
    return (domain.a - domain.b) / (domain.a + domain.b) * z


# ---------------------------------------------------------------------------


def _region_mask(domain, z, name):
    dist = domain.boundary_distance(z)
    if np.any(np.asarray(dist) <= 1e-12):
        raise RegionError(f"{name} lies on the boundary, where the kernel needs a side")
    return np.asarray(domain.contains(z))


def _require(domain, z, inside, kernel, arg):
    m = _region_mask(domain, z, arg)
    bad = ~m if inside else m
    if np.any(bad):
        where = "inside the domain" if inside else "outside the closed domain"
        raise RegionError(f"{kernel} requires {arg} {where}")


@dataclass
class KernelEvaluator:
    """E, F, G, G*, H and L for a domain.

    ``backend`` is "closed_form" (disk and ellipse), "quadrature" (boundary
    integral B above, any domain) or "auto".  Inputs broadcast like numpy
    arrays; scalars give scalars.
    """

    domain: object
    backend: str = "auto"
    nodes: int = DEFAULT_BOUNDARY_NODES
    tol: float = 1e-10
    _memo: dict = field(default_factory=dict, init=False, repr=False)
    _lock: object = field(default_factory=threading.Lock, init=False, repr=False)

    def __post_init__(self):
        if self.backend == "auto":
            self.backend = "closed_form" if self.domain.has_closed_form else "quadrature"
        if self.backend not in ("closed_form", "quadrature"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "closed_form" and not self.domain.has_closed_form:
            raise ValueError(f"no closed forms for {self.domain.kind} domains")

    # -- core -------------------------------------------------------------
    def B(self, z, w):
        """Boundary integral B(z, w) for pairs (broadcast)."""
        z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
        zf, wf = z.ravel(), w.ravel()
        d = np.minimum(self.domain.boundary_distance(zf), self.domain.boundary_distance(wf))
        out = np.empty(zf.shape, complex)
        for i in range(len(zf)):
            wi = wf[i]
            out[i] = cauchy_integral(self.domain, lambda s: np.log(np.abs(s - wi) ** 2),
                                     zf[i], n=nodes_for_distance(self.domain, d[i], self.nodes))[0]
        return out.reshape(z.shape)

    def B_matrix(self, zs, ws):
        """B(z_i, w_j) for all pairs, as a matrix product over boundary nodes."""
        zs = np.atleast_1d(np.asarray(zs, complex))
        ws = np.atleast_1d(np.asarray(ws, complex))
        dom = self.domain
        dmin = min(np.min(dom.boundary_distance(zs)), np.min(dom.boundary_distance(ws)))
        q = dom.boundary_quadrature(nodes_for_distance(dom, dmin, self.nodes))
        inside = np.asarray(dom.contains(zs))
        near = dom.boundary(dom.nearest_parameter(zs))
        out = np.empty((len(zs), len(ws)), complex)
        rows = max(1, 2_000_000 // len(q))
        for i in range(0, len(zs), rows):
            sl = slice(i, i + rows)
            ker = q.d_elements[None, :] / (q.nodes[None, :] - zs[sl, None]) / (2j * np.pi)
            out[sl] = 0
            for j in range(0, len(ws), rows):
                sj = slice(j, j + rows)
                logs = np.log(np.abs(q.nodes[:, None] - ws[None, sj]) ** 2)
                out[sl, sj] = ker @ logs
            # singularity subtraction with the exact winding number
            wind = ker.sum(axis=1)
            phi_near = np.log(np.abs(near[sl, None] - ws[None, :]) ** 2)
            out[sl] += phi_near * (inside[sl] - wind)[:, None]
        return out

    def _wrap(self, val, z, w):
        if np.ndim(z) == 0 and np.ndim(w) == 0:
            return complex(np.asarray(val).reshape(()))
        return val

    # -- kernels --------------------------------------------------------------
    def E(self, z, w):
        """Exponential transform for any two points off the boundary."""
        if np.ndim(z) == 0 and np.ndim(w) == 0:
            key = (complex(z), complex(w))
            hit = self._memo.get(key)
            if hit is not None:
                return hit
            val = complex(self._E(np.asarray(z, complex), np.asarray(w, complex)))
            with self._lock:
                self._memo.setdefault(key, val)
            return val
        return self._E(*np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex)))

    def _E(self, z, w):
        zin = _region_mask(self.domain, z, "z")
        win = _region_mask(self.domain, w, "w")
        if self.backend == "quadrature":
            e = np.exp(-self.B(z, w))
            return np.where(zin, e * np.abs(z - w) ** 2, e)
        zb, wb = np.conj(z), np.conj(w)
        S = self.domain.schwarz
        out = np.empty(np.shape(z), complex)
        zin, win = np.broadcast_to(zin, out.shape), np.broadcast_to(win, out.shape)
        with np.errstate(all="ignore"):
            Hzw = _H_closed(self.domain, z, w)
            Hwz = _H_closed(self.domain, w, z)
            Sw = S(np.where(win, 1e3 + 0 * w, w))
            Sz = S(np.where(zin, 1e3 + 0 * z, z))
            both_in = Hzw * np.abs(z - w) ** 2
            z_in = Hzw * (z - np.conj(Sw)) * (zb - wb)
            w_in = np.conj(Hwz * (w - np.conj(Sz)) * (wb - zb))
            both_out = Hzw * (z - np.conj(Sw)) * (Sz - wb)
        out[...] = np.where(zin & win, both_in,
                            np.where(zin, z_in, np.where(win, w_in, both_out)))
        return out

    def H(self, z, w):
        _require(self.domain, z, True, "H", "z")
        _require(self.domain, w, True, "H", "w")
        z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
        if self.backend == "closed_form":
            val = _H_closed(self.domain, z, w)
        else:
            val = np.exp(-self.B(z, w))
        return self._wrap(val, z, w)

    def H_matrix(self, zs, ws):
        """H(z_i, w_j) for points inside (no region check beyond the first call)."""
        zs = np.atleast_1d(np.asarray(zs, complex))
        ws = np.atleast_1d(np.asarray(ws, complex))
        if self.backend == "closed_form":
            return _H_closed(self.domain, zs[:, None], ws[None, :])
        return np.exp(-self.B_matrix(zs, ws))

    def G(self, z, w):
        """G(z, w) = E/(z-bar - w-bar), z inside, w outside."""
        _require(self.domain, z, True, "G", "z")
        _require(self.domain, w, False, "G", "w")
        z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
        if self.backend == "closed_form":
            val = _H_closed(self.domain, z, w) * (z - np.conj(self.domain.schwarz(w)))
        else:
            val = np.exp(-self.B(z, w)) * (z - w)
        return self._wrap(val, z, w)

    def G_star(self, z, w):
        """G*(z, w) = -E/(z - w), z outside, w inside."""
        _require(self.domain, z, False, "G*", "z")
        _require(self.domain, w, True, "G*", "w")
        z, w = np.broadcast_arrays(np.asarray(z, complex), np.asarray(w, complex))
        if self.backend == "closed_form":
            val = _H_closed(self.domain, z, w) * (np.conj(w) - self.domain.schwarz(z))
        else:
            val = -np.exp(-self.B(z, w)) / (z - w)
        return self._wrap(val, z, w)

    def F(self, z, w):
        """F = E for both points outside the closed domain."""
        _require(self.domain, z, False, "F", "z")
        _require(self.domain, w, False, "F", "w")
        return self.E(z, w)

    def L(self, z, w):
        """Reproducing kernel L(z, w) = 1/E(z, w) - 1, both points outside."""
        f = np.asarray(self.F(z, w))
        if np.any(f == 0):
            raise SingularityError("E vanished at an exterior pair")
        return self._wrap(1.0 / f - 1.0, z, w)

    # -- continuations used on shrunken contours --------------------------------
    def F_continued(self, z, w):
        """Analytic continuation in z of F(., w) to points just inside the curve."""
        _require(self.domain, w, False, "F_continued", "w")
        z = np.asarray(z, complex)
        S = self.domain.schwarz
        if self.backend == "closed_form":
            return _H_closed(self.domain, z, w) * (z - np.conj(S(w))) * (S(z) - np.conj(w))
        zin = np.asarray(self.domain.contains(z))
        e = np.exp(-self.B(z, w))
        with np.errstate(all="ignore"):
            cont = e * (z - w) * (S(np.where(zin, z, 0.5 * z)) - np.conj(w))
        return np.where(zin, cont, e)

    def L_continued(self, z, w):
        return 1.0 / self.F_continued(z, w) - 1.0

    # -- Schwarz function pieces ------------------------------------------------
    def s_minus(self, z):
        _require(self.domain, z, False, "S_-", "z")
        return self._wrap(self.s_minus_continued(z), z, 0)

    def s_plus(self, z):
        _require(self.domain, z, True, "S_+", "z")
        if self.backend == "closed_form":
            return self._wrap(s_plus_closed(self.domain, np.asarray(z, complex)), z, 0)
        v = cauchy_integral(self.domain, np.conj, z)
        return self._wrap(v.reshape(np.shape(z)), z, 0)

    def s_minus_continued(self, z):
        """S_- evaluated anywhere its continuation is available."""
        z = np.asarray(z, complex)
        if self.backend == "closed_form":
            return self.domain.schwarz(z) - s_plus_closed(self.domain, z)
        inside = np.asarray(self.domain.contains(z))
        phi = cauchy_integral(self.domain, np.conj, z.ravel()).reshape(z.shape)
        if np.any(inside):
            # inside: S_- = S - S_+ with S continued across the curve
            phi = np.where(inside, self.domain.schwarz(z) - phi, -phi)
            return phi
        return -phi


def exp_transform_weighted(domain, z, w, rho=None, tol=1e-9):
    """E_rho(z, w) = exp(-(1/pi) int rho dA / ((zeta - z)(zeta-bar - w-bar))).

    ``rho`` is a callable with values in [0, 1] or None for chi_Omega.  A rho
    that is identically zero (the constant 0) returns exactly 1.
    """
    if rho is not None and not callable(rho):
        if float(rho) == 0.0:
            return 1.0 + 0j
        c = float(rho)
        rho = lambda s, c=c: c + 0 * s.real  # noqa: E731
    z, w = complex(z), complex(w)
    sing = [p for p in dict.fromkeys((z, w)) if domain.contains(p)]
    if sing and abs(z - w) < 1e-14:
        raise SingularityError("E_rho on the interior diagonal vanishes; use H instead")

    def integrand(s):
        r = 1.0 if rho is None else rho(s)
        return r / ((s - z) * np.conj(s - w))

    integral = integrate_area(integrand, domain.area_quadrature(), tol=tol,
                              singular_points=sing)
    return complex(np.exp(-integral / math.pi))
