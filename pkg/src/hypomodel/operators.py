"""The shift operators Z and Z* on germs at infinity, their resolvents and commutator.

Each operator has a series realization (acting on LaurentTail coefficients)
and a boundary-integral realization (acting on boundary values):

    Z [f](z)  = (z f)_-(z)        = -(1/2 pi i) oint zeta f(zeta) dzeta / (zeta - z)
    Z*[f](z)  = (S f)_-(z)        = -(1/2 pi i) oint conj(zeta) f(zeta) dzeta / (zeta - z)
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError, NearBoundaryWarning, RegionError
from .kernels import cauchy_integral
from .series import (LaurentTail, TwoSidedSeries, convolve_schwarz_minus, evaluate,
                     multiply_by_z_minus, residue_at_infinity)


def op_Z(f):
    return multiply_by_z_minus(f).tail


def op_Z_star(f, S, n_out=None):
    return convolve_schwarz_minus(S, f, n_out)


@dataclass(frozen=True)
class BoundarySamples:
    """Values of a function at the nodes of a boundary quadrature rule."""

    quadrature: object
    values: np.ndarray


def _boundary_function(f):
    if isinstance(f, LaurentTail):
        return lambda s: evaluate(f, s, radius=0.0)[0]
    return f


def _exterior_points(domain, z, what):
    z = np.atleast_1d(np.asarray(z, complex))
    if np.any(domain.contains(z)) or np.any(domain.boundary_distance(z) <= 1e-12):
        raise RegionError(f"{what} needs points outside the closed domain")
    if np.any(domain.boundary_distance(z) < 1e-3 * domain.diameter):
        warnings.warn("evaluation point close to the boundary; accuracy degraded",
                      NearBoundaryWarning, stacklevel=3)
    return z


def _boundary_apply(weight, f, domain, z, n):
    if isinstance(f, BoundarySamples):
        q = f.quadrature
        vals = np.asarray(f.values, complex) * weight(q.nodes)
        ker = q.d_elements[None, :] / (q.nodes[None, :] - z[:, None])
        return -(ker @ vals) / (2j * math.pi)
    g = _boundary_function(f)
    return -cauchy_integral(domain, lambda s: weight(s) * g(s), z, n)


def _scalar_like(val, z):
    return complex(val[0]) if np.ndim(z) == 0 else val


def op_Z_boundary(f, domain, z, n=None):
    """Z[f](z) by the boundary integral, z outside the closed domain."""
    zz = _exterior_points(domain, z, "Z")
    return _scalar_like(_boundary_apply(lambda s: s, f, domain, zz, n), z)


def op_Z_star_boundary(f, domain, z, n=None):
    """Z*[f](z) by the boundary integral, z outside the closed domain."""
    zz = _exterior_points(domain, z, "Z*")
    return _scalar_like(_boundary_apply(np.conj, f, domain, zz, n), z)


# ---------------------------------------------------------------------------
# resolvents


def resolvent_Z(f, a, z, domain=None, form="auto", n=None):
    """((Z - a)^{-1} f)(z).

    ``form="difference"`` evaluates (f(z) - f(a))/(z - a) and needs z, a
    outside the closed domain; the confluent case z = a returns f'(a) from
    the series derivative.  ``form="boundary"`` evaluates
    -(1/2 pi i) oint f dzeta / ((zeta - z)(zeta - a)) and allows any a.
    """
    a = complex(a)
    z = complex(z)
    if form == "auto":
        outside = domain is None or not (domain.contains(a) or domain.boundary_distance(a) <= 1e-12)
        form = "difference" if outside else "boundary"
    if form == "difference":
        if domain is not None and (domain.contains(a) or domain.boundary_distance(a) <= 1e-12):
            raise DomainError("difference-quotient resolvent needs a outside the closed domain; "
                              "use form='boundary'")
        if z == a:
            if not isinstance(f, LaurentTail):
                raise TypeError("the confluent case needs a LaurentTail")
            return evaluate(f.derivative(), a, radius=0.0)[0]
        fz = f(z) if not isinstance(f, LaurentTail) else evaluate(f, z, radius=0.0)[0]
        fa = f(a) if not isinstance(f, LaurentTail) else evaluate(f, a, radius=0.0)[0]
        return complex((fz - fa) / (z - a))
    if form != "boundary":
        raise ValueError(f"unknown resolvent form {form!r}")
    if domain is None:
        raise ValueError("the boundary form needs the domain")
    zz = _exterior_points(domain, z, "resolvent")
    g = _boundary_function(f)
    return complex(-cauchy_integral(domain, lambda s: g(s) / (s - a), zz, n)[0])


def resolvent_Z_tail(f, a):
    """Series solution g of (Z - a) g = f for a complete tail f and a != 0.

    g_i = -sum_{k >= i} f_k a^{-(k - i + 1)}.
    """
    if not f.complete:
        raise ValueError("resolvent series needs a complete tail")
    a = complex(a)
    N = f.order
    g = np.zeros(N, complex)
    acc = 0j
    for i in range(N - 1, -1, -1):
        acc = acc / a + f.coeffs[i] / a
        g[i] = -acc
    return LaurentTail(g, radius=f.radius)


def resolvent_Z_star(f, abar, domain, z, n=None):
    """((Z* - abar)^{-1} f)(z) = -(1/2 pi i) oint f dzeta / ((zeta - z)(conj(zeta) - abar))."""
    zz = _exterior_points(domain, z, "Z* resolvent")
    g = _boundary_function(f)
    abar = complex(abar)
    val = -cauchy_integral(domain, lambda s: g(s) / (np.conj(s) - abar), zz, n)
    return _scalar_like(val, z)


def resolvent_Z_star_series(f, abar, domain, N=32, S=None):
    """Series solution g of (Z* - abar) g = f on the first N coefficients.

    Solves the finite section (M - abar I) g = f with M the N x N matrix of
    Z*.  Unlike the boundary formula this is exact for any Schwarz function
    (up to truncation); sections beyond N ~ 40 lose accuracy to conditioning.
    """
    if f.order > N:
        raise ValueError(f"tail of order {f.order} exceeds the section size {N}")
    M = matrix_truncation("Z_star", domain, N, S).entries
    g = np.linalg.solve(M - complex(abar) * np.eye(N), f.padded(N))
    return LaurentTail(g, radius=f.radius)


def _spectral_derivative(values):
    n = len(values)
    k = np.fft.fftfreq(n, 1.0 / n)
    k[n // 2] = 0
    return np.fft.ifft(1j * k * np.fft.fft(values))


def resolvent_Z_star_boundary_values(f, abar, domain, n=1024):
    """Exterior boundary values of ((Z* - abar)^{-1} f), as BoundarySamples.

    The exterior limit of -(1/2 pi i) oint phi dzeta/(zeta - zeta_j) with
    phi = f/(conj(zeta) - abar) is computed with the smooth difference
    quotient (phi_k - phi_j)/(zeta_k - zeta_j), whose diagonal value
    phi'(t_j)/zeta'(t_j) comes from spectral differentiation.
    """
    q = domain.boundary_quadrature(n)
    g = _boundary_function(f)
    phi = np.asarray(g(q.nodes), complex) / (np.conj(q.nodes) - complex(abar))
    dphi = _spectral_derivative(phi)
    diff = q.nodes[None, :] - q.nodes[:, None]
    np.fill_diagonal(diff, 1.0)
    quot = (phi[None, :] - phi[:, None]) / diff
    np.fill_diagonal(quot, dphi / q.tangents)
    vals = -(quot @ q.d_elements) / (2j * math.pi)
    return BoundarySamples(q, vals)


# ---------------------------------------------------------------------------
# commutator and rank-one structure


def commutator_apply(f, S, n_out=None):
    """Z* Z f - Z Z* f on the series level.

    Z* is applied with one extra output coefficient before Z so that the
    shift does not discard information the other product keeps.
    """
    n_out = n_out if n_out is not None else max(f.order, 1)
    zf = op_Z(f)
    first = convolve_schwarz_minus(S, zf, n_out)
    second = op_Z(convolve_schwarz_minus(S, f, n_out + 1))
    return LaurentTail(first.coeffs[:n_out] - second.coeffs[:n_out], radius=f.radius)


def rank_one_projection(f, domain, n_out=None, sched=None, kernel=None):
    """<f, S_->_O S_-, with the inner product computed by contour quadrature."""
    from .hilbert import inner_product_O
    from .kernels import KernelEvaluator

    kernel = kernel or KernelEvaluator(domain)
    c = inner_product_O(_boundary_function(f), kernel.s_minus_continued, domain, sched, kernel)
    n_out = n_out if n_out is not None else max(f.order, 1)
    m = domain.exterior_moments(n_out - 1)
    return LaurentTail(c * m, radius=f.radius)


def calibrate_sign(domain, sched=None, kernel=None, tol=1e-6):
    """Global sign s with <f, S_->_O = s res_inf f, measured at f = S_-.

    Raises ConsistencyError when |ratio| is not 1 within tol.
    """
    from .hilbert import inner_product_O
    from .kernels import KernelEvaluator

    kernel = kernel or KernelEvaluator(domain)
    sm = kernel.s_minus_continued
    ip = inner_product_O(sm, sm, domain, sched, kernel)
    res = -domain.exterior_moments(0)[0]
    ratio = ip / res
    if abs(abs(ratio) - 1) > tol or abs(ratio.imag) > tol:
        raise ConsistencyError(f"<S_-, S_-> / res S_- = {ratio} is not +-1")
    return int(np.sign(ratio.real))


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorMatrix:
    """N x N matrix in the basis z^{-(k+1)}, k = 0..N-1."""

    entries: np.ndarray
    op: str = ""

    @property
    def N(self):
        return self.entries.shape[0]

    def apply(self, a):
        return self.entries @ np.asarray(a, complex)

    def singular_values(self, gram=None):
        """Singular values, optionally in the inner product with Gram matrix ``gram``.

        With G_ij = <e_i, e_j> the operator norm geometry is that of
        G^{1/2} A G^{-1/2} (G transposed to act on coefficient columns).
        """
        A = self.entries
        if gram is None:
            return np.linalg.svd(A, compute_uv=False)
        G = np.asarray(gram).T
        w, V = np.linalg.eigh((G + G.conj().T) / 2)
        if np.min(w) <= 0:
            raise ValueError("Gram matrix is not positive definite")
        half = (V * np.sqrt(w)) @ V.conj().T
        ihalf = (V / np.sqrt(w)) @ V.conj().T
        return np.linalg.svd(half @ A @ ihalf, compute_uv=False)


def matrix_truncation(op, domain, N, S=None):
    """Finite section of Z, Z_star or commutator on the first N basis tails."""
    if op not in ("Z", "Z_star", "commutator"):
        raise ValueError(f"unknown operator {op!r}")
    if op != "Z" and S is None:
        S = domain.schwarz_series(N + 2, 2 * N + 2)
    cols = []
    for l in range(N):
        e = LaurentTail.monomial(l, radius=getattr(domain, "outer_radius", None))
        if op == "Z":
            out = op_Z(e).padded(N)
        elif op == "Z_star":
            out = op_Z_star(e, S, N).coeffs
        else:
            out = commutator_apply(e, S, N).coeffs
        cols.append(out)
    return OperatorMatrix(np.column_stack(cols), op)


def commutator_compression(domain, N, sched=None, kernel=None):
    """O-orthogonal compression of the commutator onto span{z^-1, ..., z^-N}.

    The commutator maps e_j to (res e_j) S_-, so <C e_j, e_l>_O =
    (res e_j) <S_-, e_l>_O and the coefficient matrix is G^{-T} B.  Returns
    (OperatorMatrix, G).  Unlike the coefficient section this stays bounded
    when the Laurent series of S_- diverges on the contour.
    """
    from .hilbert import contour_gram
    from .kernels import KernelEvaluator

    kernel = kernel or KernelEvaluator(domain)
    basis = [LaurentTail.monomial(j) for j in range(N)]
    full = contour_gram(basis + [kernel.s_minus_continued], domain, sched, kernel).value
    G = full[:N, :N]
    r = full[N, :N]  # <S_-, e_l>
    res = np.array([residue_at_infinity(e) for e in basis])
    B = np.outer(r, res)
    return OperatorMatrix(np.linalg.solve(G.T, B), "commutator_compression"), G


__all__ = [
    "BoundarySamples", "OperatorMatrix", "calibrate_sign", "commutator_apply",
    "commutator_compression",
    "matrix_truncation", "op_Z", "op_Z_boundary", "op_Z_star", "op_Z_star_boundary",
    "rank_one_projection", "resolvent_Z", "resolvent_Z_star", "resolvent_Z_star_series",
    "resolvent_Z_star_boundary_values", "resolvent_Z_tail", "residue_at_infinity",
    "TwoSidedSeries",
]
