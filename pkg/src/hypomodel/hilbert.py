"""The model Hilbert space: inner products, norms, Gram matrices, null elements.

Two pictures of the same space are used.  On the "O side" elements are
functions analytic outside the closed domain and vanishing at infinity, with

    <f, g>_O = (1/4 pi^2) oint oint H(z, w) f(z) conj(g(w)) dz conj(dw)

taken over the boundary of the shrunken domain Omega_eps.  On the "H side"
elements are measures mu on Omega with <mu, nu> = (1/pi^2) (mu x nu-bar) H.
The exterior Cauchy transform C^ext maps the second picture isometrically
onto the first; k_a(z) = 1/(z - a) = C^ext[pi delta_a].

Since H(z, w) is analytic in z and anti-analytic in w inside Omega, the
contour value does not depend on eps for functions that continue analytically
across the boundary; the eps schedule then serves as a convergence check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import Disk, Ellipse
from .errors import ConsistencyError, ConvergenceError, DomainError, SingularityError
from .kernels import KernelEvaluator, cauchy_integral
from .quadrature import integrate_area
from .series import LaurentTail, evaluate, tail_from_samples

DEFAULT_EPS = (0.04, 0.02, 0.01)


@dataclass(frozen=True)
class EpsilonSchedule:
    eps: tuple = DEFAULT_EPS
    order: int = 2

    def __post_init__(self):
        e = tuple(float(x) for x in self.eps)
        if not e:
            raise ValueError("schedule needs at least one eps")
        if any(not 0 < x < 0.5 for x in e):
            raise ValueError("every eps must lie in (0, 1/2)")
        if any(a <= b for a, b in zip(e, e[1:])):
            raise ValueError("eps values must be strictly decreasing")
        if self.order < 0:
            raise ValueError("extrapolation order must be nonnegative")
        object.__setattr__(self, "eps", e)


def contour_nodes(eps, n_min=256, domain=None):
    """Trapezoid nodes on the eps-contour.

    Kernel singularities sit about eps (relative) off the contour, so the
    trapezoid error decays like exp(-2 eps n / stretch), where stretch is the
    speed ratio of the parametrization.
    """
    stretch = 1.0
    if domain is not None:
        t = np.linspace(0, 2 * np.pi, 256, endpoint=False)
        v = np.abs(domain.dboundary(t))
        stretch = float(np.max(v) / np.min(v))
    n = max(n_min, int(math.ceil(16.0 * stretch / eps)))
    return n + (n % 2)


def extrapolate(eps, values, order):
    """Polynomial extrapolation to eps = 0 through the last order+1 points."""
    eps = np.asarray(eps, float)
    v = np.asarray(values)
    m = min(order + 1, len(eps))
    x, y = eps[-m:], v[-m:]
    # Lagrange weights at 0
    total = np.zeros(v.shape[1:], dtype=complex)
    for i in range(m):
        w = 1.0
        for j in range(m):
            if j != i:
                w *= (0 - x[j]) / (x[i] - x[j])
        total = total + w * y[i]
    return total


@dataclass(frozen=True)
class Extrapolated:
    value: complex
    values: tuple
    eps: tuple
    residual: float

    def __complex__(self):
        return complex(self.value)


def _check_convergence(eps, values, residual, scale):
    floor = 1e-11 * max(scale, 1.0)
    diffs = [float(np.max(np.abs(np.asarray(b) - np.asarray(a))))
             for a, b in zip(values, values[1:])]
    growing = len(diffs) >= 2 and diffs[-1] > 1.5 * diffs[-2] and diffs[-1] > floor
    if growing or (diffs and residual > 10 * max(diffs[-1], floor)):
        raise ConvergenceError(
            f"eps sequence {eps} not converging: differences {diffs}, residual {residual:.3g}")


# ---------------------------------------------------------------------------
# evaluation of O-side functions on contours


def _tail_function(t):
    def f(z):
        return evaluate(t, z, radius=0.0)[0]
    return f


def _nonneg_part(domain, j, k):
    """Coefficients (ascending powers) of the polynomial part of z^j S(z)^{k+1} at infinity."""
    P = j + k + 3
    M = domain.exterior_moments(P)
    # S as {power: coefficient}, truncated below power -P-1
    S = {-(m + 1): complex(M[m]) for m in range(P + 1) if M[m] != 0}
    if isinstance(domain, Disk):
        S[0] = S.get(0, 0) + np.conj(domain.center)
    else:
        S[1] = (domain.a - domain.b) / (domain.a + domain.b)
    h = {j: 1.0 + 0j}
    for _ in range(k + 1):
        out = {}
        for p1, c1 in h.items():
            for p2, c2 in S.items():
                p = p1 + p2
                if p >= -P - 1:
                    out[p] = out.get(p, 0) + c1 * c2
        h = out
    deg = max([p for p in h if p >= 0], default=-1)
    return np.array([h.get(p, 0) for p in range(deg + 1)], dtype=complex)


def monomial_transform(domain, j, k, kernel=None):
    """Continued exterior Cauchy transform of zeta^j conj(zeta)^k dA.

    With boundary values h = zeta^j conj(zeta)^{k+1}/(k+1) the transform is
    the exterior part h_-.  Inside, near the curve, it continues as
    h~ - (interior Cauchy integral of h), h~ using the continued Schwarz
    function.  Disks and ellipses use the exact form h~ - (polynomial part).
    """
    if isinstance(domain, (Disk, Ellipse)):
        poly = _nonneg_part(domain, j, k)

        def f(z):
            z = np.asarray(z, complex)
            return (z ** j * domain.schwarz(z) ** (k + 1) - np.polyval(poly[::-1], z)) / (k + 1)
        return f

    def boundary_values(s):
        return s ** j * np.conj(s) ** (k + 1) / (k + 1)

    def f(z):
        z = np.atleast_1d(np.asarray(z, complex))
        phi = cauchy_integral(domain, boundary_values, z)
        inside = np.asarray(domain.contains(z))
        out = -phi
        if np.any(inside):
            zi = z[inside]
            out[inside] = zi ** j * domain.schwarz(zi) ** (k + 1) / (k + 1) - phi[inside]
        return out
    return f


@dataclass(frozen=True)
class HElement:
    """A measure on Omega: point masses, a polynomial density and/or a density.

    ``masses``: tuple of (a, c) meaning c * delta_a.
    ``poly``: mapping (j, k) -> c meaning c * zeta^j conj(zeta)^k dA.
    ``density``: callable g meaning g dA (paired by area quadrature).
    ``tail``: a LaurentTail added directly on the O side.
    """

    masses: tuple = ()
    poly: dict = field(default_factory=dict)
    density: object = None
    tail: LaurentTail | None = None

    @classmethod
    def point(cls, a, c=1.0):
        return cls(masses=((complex(a), complex(c)),))

    @classmethod
    def monomial(cls, j, k, c=1.0):
        return cls(poly={(int(j), int(k)): complex(c)})

    def __add__(self, other):
        poly = dict(self.poly)
        for key, c in other.poly.items():
            poly[key] = poly.get(key, 0) + c
        if self.density is not None and other.density is not None:
            g1, g2 = self.density, other.density
            dens = lambda s: g1(s) + g2(s)  # noqa: E731
        else:
            dens = self.density if self.density is not None else other.density
        if self.tail is not None and other.tail is not None:
            tail = self.tail + other.tail
        else:
            tail = self.tail if self.tail is not None else other.tail
        return HElement(self.masses + other.masses, poly, dens, tail)

    def scaled(self, c):
        g = self.density
        return HElement(tuple((a, c * w) for a, w in self.masses),
                        {k: c * v for k, v in self.poly.items()},
                        None if g is None else (lambda s: c * g(s)),
                        None if self.tail is None else self.tail.scaled(c))

    def poly_density(self, s):
        s = np.asarray(s, complex)
        out = np.zeros(s.shape, complex)
        for (j, k), c in self.poly.items():
            out = out + c * s ** j * np.conj(s) ** k
        return out

    def area_density(self, s):
        out = self.poly_density(s)
        if self.density is not None:
            out = out + self.density(s)
        return out

    def has_area_part(self):
        return bool(self.poly) or self.density is not None

    def validate(self, domain):
        for a, _ in self.masses:
            if not domain.contains(a):
                raise DomainError(f"point mass at {a!r} must lie strictly inside the domain")

    def contour_function(self, domain):
        """C^ext of the analytically continuable part, as a callable near the curve."""
        self.validate(domain)
        pieces = []
        for a, c in self.masses:
            pieces.append(lambda z, a=a, c=c: (c / math.pi) / (np.asarray(z) - a))
        for (j, k), c in self.poly.items():
            fm = monomial_transform(domain, j, k)
            pieces.append(lambda z, fm=fm, c=c: c * fm(z))
        if self.tail is not None:
            pieces.append(_tail_function(self.tail))

        def f(z):
            z = np.asarray(z, complex)
            out = np.zeros(z.shape, complex)
            for p in pieces:
                out = out + p(z)
            return out
        return f

    def exterior_transform(self, domain, z, tol=1e-12):
        """C^ext[mu](z) at exterior points by direct area quadrature.

        Independent of the continued route; used as a cross-check.
        """
        z = np.atleast_1d(np.asarray(z, complex))
        if np.any(domain.contains(z)):
            raise DomainError("exterior transform requested at interior points")
        out = np.zeros(z.shape, complex)
        for a, c in self.masses:
            out += (c / math.pi) / (z - a)
        if self.has_area_part():
            q = domain.area_quadrature(2)
            prev = None
            level = 2
            while True:
                g = self.area_density(q.nodes)
                val = -(g * q.weights) @ (1.0 / (q.nodes[:, None] - z[None, :])) / math.pi
                if prev is not None and np.max(np.abs(val - prev)) < tol:
                    break
                if level >= 10:
                    break
                prev = val
                level += 1
                q = domain.area_quadrature(level)
            out += val
        if self.tail is not None:
            out += evaluate(self.tail, z, radius=0.0)[0]
        return out

    def raw_size(self, domain):
        """L^2-type size used to make null tolerances relative."""
        s = sum(abs(c) ** 2 for _, c in self.masses)
        if self.has_area_part():
            q = domain.area_quadrature(2)
            s += float(np.sum(np.abs(self.area_density(q.nodes)) ** 2 * q.weights))
        if self.tail is not None:
            s += float(np.sum(np.abs(self.tail.coeffs) ** 2))
        return math.sqrt(s)


# ---------------------------------------------------------------------------


def _as_contour_function(x, domain):
    if isinstance(x, LaurentTail):
        return _tail_function(x)
    if isinstance(x, HElement):
        if x.density is not None:
            raise TypeError("elements with a general density have no contour representation")
        return x.contour_function(domain)
    if callable(x):
        return x
    raise TypeError(f"cannot pair object of type {type(x).__name__}")


def _kernel(domain, kernel):
    return kernel if kernel is not None else KernelEvaluator(domain)


def _contour_gram(funcs, domain, kernel, eps, n_min):
    q = _contour(domain, eps, n_min)
    F = np.column_stack([np.asarray(f(q.nodes), complex) * q.d_elements for f in funcs])
    acc = np.zeros((F.shape[1], len(q.nodes)), complex)
    rows = 512
    for i in range(0, len(q.nodes), rows):
        acc += F[i:i + rows].T @ kernel.H_matrix(q.nodes[i:i + rows], q.nodes)
    return (acc @ np.conj(F)) / (4 * math.pi ** 2)


def contour_gram(elements, domain, sched=None, kernel=None, n_min=256, check=True):
    """Gram matrix G_ij = <e_i, e_j>_O on the eps schedule, extrapolated."""
    sched = sched or EpsilonSchedule()
    kernel = _kernel(domain, kernel)
    funcs = [_as_contour_function(e, domain) for e in elements]
    if not funcs:
        return Extrapolated(np.zeros((0, 0), complex), (), sched.eps, 0.0)
    vals = [_contour_gram(funcs, domain, kernel, e, n_min) for e in sched.eps]
    G = extrapolate(sched.eps, vals, sched.order)
    resid = float(np.max(np.abs(G - vals[-1])))
    if check and len(vals) > 1:
        _check_convergence(sched.eps, vals, resid, float(np.max(np.abs(G))))
    return Extrapolated(G, tuple(vals), sched.eps, resid)


def inner_product_O(f, g, domain, sched=None, kernel=None, n_min=256, full_output=False):
    """<f, g>_O by double contour quadrature on shrunken boundaries."""
    res = contour_gram([f, g], domain, sched, kernel, n_min)
    val = complex(res.value[0, 1])
    if not full_output:
        return val
    return Extrapolated(val, tuple(complex(v[0, 1]) for v in res.values), res.eps,
                        float(abs(val - res.values[-1][0, 1])))


def inner_product_point_masses(a, b, domain, kernel=None):
    """<k_a, k_b>_O = H(a, b)."""
    return _kernel(domain, kernel).H(a, b)


def _area_pairing(g1, g2, domain, kernel, level=3):
    q = domain.area_quadrature(level)
    u = g1(q.nodes) * q.weights
    v = g2(q.nodes) * q.weights
    Hm = kernel.H_matrix(q.nodes, q.nodes)
    return complex(u @ Hm @ np.conj(v)) / math.pi ** 2


def _mass_density_pairing(masses, g, domain, kernel, tol=1e-11):
    total = 0j
    for a, c in masses:
        val = integrate_area(lambda w: kernel.H_matrix([a], w)[0] * np.conj(g(w)),
                             domain.area_quadrature(), tol=tol)
        total += c * val
    return total / math.pi ** 2


def inner_product_H(mu, nu, domain, sched=None, kernel=None):
    """<mu, nu> = (1/pi^2) (mu x nu-bar) H for HElements.

    Point masses, polynomial densities and tails go through the contour
    form; a general density is paired by area quadrature, which H's
    boundary singularity limits to about 1e-4 relative accuracy.
    """
    kernel = _kernel(domain, kernel)
    mu_c = HElement(mu.masses, mu.poly, None, mu.tail)
    nu_c = HElement(nu.masses, nu.poly, None, nu.tail)
    total = 0j
    if _nonempty(mu_c) and _nonempty(nu_c):
        total += inner_product_O(mu_c, nu_c, domain, sched, kernel)
    if nu.density is not None and _nonempty(mu_c):
        total += _cross(mu_c, nu.density, domain, kernel)
    if mu.density is not None and _nonempty(nu_c):
        total += np.conj(_cross(nu_c, mu.density, domain, kernel))
    if mu.density is not None and nu.density is not None:
        total += _area_pairing(mu.density, nu.density, domain, kernel)
    return complex(total)


def _nonempty(e):
    return bool(e.masses) or bool(e.poly) or e.tail is not None


def _cross(elem, g, domain, kernel):
    out = _mass_density_pairing(elem.masses, g, domain, kernel) if elem.masses else 0j
    if elem.poly:
        out += _area_pairing(elem.poly_density, g, domain, kernel)
    if elem.tail is not None:
        raise TypeError("pairing a tail with a general density is not supported")
    return out


@dataclass(frozen=True)
class NormResult:
    value: float
    squared: float
    clamped: bool


def norm_H(mu, domain, sched=None, kernel=None, full_output=False):
    """sqrt(<mu, mu>); small negative squares from round-off are clamped to 0."""
    sq = inner_product_H(mu, mu, domain, sched, kernel).real
    clamped = sq < 0
    val = math.sqrt(max(sq, 0.0))
    if full_output:
        return NormResult(val, sq, clamped)
    return val


@dataclass(frozen=True)
class NullReport:
    norm: float
    transform_sup: float
    scale: float
    tol: float
    verdict: str

    @property
    def is_null(self):
        return self.verdict == "null"


def null_test(mu, domain, tol=1e-6, sched=None, kernel=None, band=100.0, points=64):
    """Check both null indicators: the norm and the exterior transform.

    The transform is sampled at ``points`` points on |z| = 2 R_Omega by an
    independent area-quadrature route.  Tolerances are relative to the raw
    L^2 size of the representative.  If one indicator is below tol while the
    other exceeds band * tol, ConsistencyError is raised.
    """
    scale = max(mu.raw_size(domain), 1e-300)
    nrm = norm_H(mu, domain, sched, kernel)
    R = 2 * domain.outer_radius
    z = R * np.exp(2j * math.pi * np.arange(points) / points)
    sup = float(np.max(np.abs(mu.exterior_transform(domain, z))))
    small = [nrm / scale < tol, sup / scale < tol]
    large = [nrm / scale > band * tol, sup / scale > band * tol]
    if (small[0] and large[1]) or (small[1] and large[0]):
        raise ConsistencyError(f"null indicators disagree: norm {nrm:.3g}, "
                               f"transform sup {sup:.3g} (scale {scale:.3g})")
    verdict = "null" if all(small) else "nonnull"
    return NullReport(nrm, sup, scale, tol, verdict)


# ---------------------------------------------------------------------------


class ReproducingKernel:
    """z -> L(z, w) = 1/E(z, w) - 1 for a fixed exterior w."""

    def __init__(self, domain, w, kernel=None):
        self.domain = domain
        self.kernel = _kernel(domain, kernel)
        if domain.contains(w) or domain.boundary_distance(w) <= 1e-12:
            raise DomainError("L(., w) needs w outside the closed domain")
        self.w = complex(w)

    def __call__(self, z):
        return self.kernel.L(z, self.w)

    def continued(self, z):
        f = self.kernel.F_continued(z, self.w)
        if np.any(f == 0):
            raise SingularityError("E vanished on the contour")
        return 1.0 / f - 1.0

    def tail(self, N=32, R=None, samples=None, tol=1e-8):
        R = R or 2 * self.domain.outer_radius
        M = samples or 4 * N
        z = R * np.exp(2j * math.pi * np.arange(M) / M)
        vals = np.asarray(self.kernel.L(z, self.w))
        return tail_from_samples(vals, R, N, tol=tol, radius=self.domain.outer_radius)


def reproducing_kernel_L(domain, w, kernel=None):
    return ReproducingKernel(domain, w, kernel)


def k_a(a):
    """The Cauchy kernel 1/(z - a)."""
    return lambda z: 1.0 / (np.asarray(z) - a)


def gram_matrix(elements, domain, sched=None, kernel=None):
    """Hermitian Gram matrix of HElements, tails or contour callables."""
    elements = list(elements)
    if not elements:
        return np.zeros((0, 0), complex)
    if all(not (isinstance(e, HElement) and e.density is not None) for e in elements):
        G = contour_gram(elements, domain, sched, kernel).value
    else:
        n = len(elements)
        G = np.zeros((n, n), complex)
        for i in range(n):
            for j in range(i, n):
                G[i, j] = inner_product_H(elements[i], elements[j], domain, sched, kernel)
                G[j, i] = np.conj(G[i, j])
    return (G + G.conj().T) / 2


def disk_basis_element(n, k):
    """(k+1) zeta^n conj(zeta)^k dA."""
    return HElement.monomial(n, k, k + 1)


def decomposition_instability_demo(domain, sched=None, kernel=None):
    """(||zeta dA||, ||conj(zeta) zeta dA||) on the unit disk."""
    if not (isinstance(domain, Disk) and domain.center == 0 and domain.r == 1):
        raise DomainError("the demonstration is defined for the unit disk")
    a = norm_H(HElement.monomial(1, 0), domain, sched, kernel)
    b = norm_H(HElement.monomial(1, 1), domain, sched, kernel)
    return a, b


# ---------------------------------------------------------------------------
# boundary identities


def _contour(domain, eps, n_min=256):
    return domain.shrink(eps).boundary_quadrature(contour_nodes(eps, n_min, domain))


def _scheduled(fn, domain, sched):
    sched = sched or EpsilonSchedule()
    vals = [fn(_contour(domain, e)) for e in sched.eps]
    v = complex(extrapolate(sched.eps, vals, sched.order))
    return Extrapolated(v, tuple(vals), sched.eps, abs(v - vals[-1]))


def int_HS(a, domain, sched=None, kernel=None):
    """(1/2 pi i) oint H(z, a) S_-(z) dz; equals 1 for every a inside."""
    kernel = _kernel(domain, kernel)

    def one(q):
        h = kernel.H_matrix(q.nodes, [a])[:, 0]
        s = kernel.s_minus_continued(q.nodes)
        return complex(np.sum(h * s * q.d_elements) / (2j * math.pi))
    return _scheduled(one, domain, sched)


def int_HE(a, w, domain, sched=None, kernel=None):
    """(1/2 pi i) oint H(z, a) / E(z, w) dz; equals 1/(conj(w) - conj(a))."""
    kernel = _kernel(domain, kernel)

    def one(q):
        h = kernel.H_matrix(q.nodes, [a])[:, 0]
        f = kernel.F_continued(q.nodes, w)
        return complex(np.sum(h / f * q.d_elements) / (2j * math.pi))
    return _scheduled(one, domain, sched)


def kernel_normalization(a, domain, kernel=None, tol=1e-12):
    """(1/pi) int_Omega H(z, a) dA(z); equals 1."""
    kernel = _kernel(domain, kernel)
    return integrate_area(lambda z: kernel.H_matrix(z, [a])[:, 0], domain.area_quadrature(),
                          tol=tol) / math.pi


def mean_value_identity(f, domain, sched=None, kernel=None):
    """Return (<f, 1>_H, (1/pi) int f dA) for a polynomial density f.

    ``f`` is an HElement with only a polynomial part; the constant 1 is the
    density 1 dA.
    """
    one = HElement.monomial(0, 0)
    lhs = inner_product_H(f, one, domain, sched, kernel)
    rhs = integrate_area(f.poly_density, domain.area_quadrature(), tol=1e-12) / math.pi
    return lhs, rhs


__all__ = [
    "EpsilonSchedule", "Extrapolated", "HElement", "NormResult", "NullReport",
    "ReproducingKernel", "contour_gram", "decomposition_instability_demo",
    "disk_basis_element", "extrapolate", "gram_matrix", "inner_product_H",
    "inner_product_O", "inner_product_point_masses", "int_HE", "int_HS", "k_a",
    "kernel_normalization", "mean_value_identity", "monomial_transform", "norm_H",
    "null_test", "reproducing_kernel_L",
]
