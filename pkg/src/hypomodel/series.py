"""Truncated germs at infinity and two-sided moment series.

A ``LaurentTail`` stores a_0..a_{N-1} of f(z) = sum_k a_k z^{-(k+1)}.  It
also records how many leading coefficients are exact (``exact``) and whether
every coefficient past the stored ones is known to vanish (``complete``).
Operations propagate both so that a truncated input never silently produces
a coefficient that depends on missing data.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConditioningError, RegionError, TruncationError

DEFAULT_ORDER = 64


@dataclass(frozen=True)
class LaurentTail:
    coeffs: np.ndarray
    complete: bool = True
    exact: int | None = None
    radius: float | None = None  # bound for the singular support, if known

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        ex = len(c) if self.exact is None else int(self.exact)
        if ex < 0 or ex > len(c):
            raise ValueError("exact count must lie in [0, len(coeffs)]")
        if self.complete and ex != len(c):
            raise ValueError("a complete tail must have all stored coefficients exact")
        object.__setattr__(self, "exact", ex)

    @classmethod
    def zero(cls, radius=None):
        return cls(np.zeros(0, complex), radius=radius)

    @classmethod
    def monomial(cls, k, c=1.0, radius=None):
        """c * z^{-(k+1)}."""
        a = np.zeros(k + 1, complex)
        a[k] = c
        return cls(a, radius=radius)

    @property
    def order(self):
        return len(self.coeffs)

    def coefficient(self, k):
        if k < self.order:
            return self.coeffs[k]
        if self.complete:
            return 0j
        raise TruncationError(f"coefficient {k} lies beyond the stored order {self.order}")

    def padded(self, n):
        """Coefficient vector of length n (zero padding needs a complete tail)."""
        if n <= self.order:
            return np.array(self.coeffs[:n])
        if not self.complete:
            raise TruncationError(f"cannot pad an incomplete tail of order {self.order} to {n}")
        return np.concatenate([self.coeffs, np.zeros(n - self.order, complex)])

    def trimmed(self, tol=0.0):
        """Drop trailing coefficients with modulus <= tol (complete tails only)."""
        if not self.complete:
            return self
        c = self.coeffs
        n = len(c)
        while n and abs(c[n - 1]) <= tol:
            n -= 1
        return LaurentTail(c[:n], radius=self.radius)

    def __add__(self, other):
        n = max(self.order, other.order)
        ex = min(self.exact if not self.complete else n, other.exact if not other.complete else n)
        a = np.zeros(n, complex)
        a[:self.order] += self.coeffs
        a[:other.order] += other.coeffs
        comp = self.complete and other.complete
        return LaurentTail(a, comp, n if comp else ex, _radius(self, other))

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        return LaurentTail(self.coeffs * c, self.complete, self.exact, self.radius)

    __rmul__ = scaled

    def __call__(self, z):
        return evaluate(self, z)[0]

    def derivative(self):
        """f'(z) = sum_k -(k+1) a_k z^{-(k+2)}, again a tail."""
        k = np.arange(self.order)
        b = np.concatenate([[0j], -(k + 1) * self.coeffs])
        return LaurentTail(b, self.complete, None if self.complete else self.exact + 1,
                           self.radius)


def _radius(*tails):
    rs = [t.radius for t in tails if t.radius is not None]
    return max(rs) if rs else None


class Shifted(NamedTuple):
    tail: LaurentTail
    dropped: complex


def multiply_by_z_minus(f):
    """(z f(z))_-: shift coefficients down by one.

    Returns the new tail together with the constant a_0 that the projection
    discards.
    """
    if f.order == 0:
        if not f.complete:
            raise TruncationError("empty incomplete tail has no known coefficients")
        return Shifted(f, 0j)
    a0 = complex(f.coeffs[0])
    ex = f.order - 1 if f.complete else max(f.exact - 1, 0)
    return Shifted(LaurentTail(f.coeffs[1:], f.complete, ex, f.radius), a0)


def residue_at_infinity(f):
    """res_inf f = -(1/2 pi i) oint_{|z|=R} f dz = -a_0."""
    return -complex(f.coefficient(0)) if (f.order or f.complete) else 0j


@dataclass(frozen=True)
class TwoSidedSeries:
    """Moments M_k, k = -K_int..K_ext, of S(z) = sum_k M_k z^{-(k+1)}.

    ``interior`` holds (M_{-1}, ..., M_{-K_int}), ``exterior`` holds
    (M_0, ..., M_{K_ext}).  The ``*_complete`` flags state that all moments
    beyond the stored range vanish (true for disks and ellipses).
    """

    interior: np.ndarray
    exterior: np.ndarray
    interior_complete: bool = False
    exterior_complete: bool = False
    radius: float | None = None
    errors: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("interior", "exterior"):
            v = np.atleast_1d(np.asarray(getattr(self, name), dtype=complex)).copy()
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def K_int(self):
        return len(self.interior)

    @property
    def K_ext(self):
        return len(self.exterior) - 1

    def known(self, k):
        if k >= 0:
            return k <= self.K_ext or self.exterior_complete
        return -k <= self.K_int or self.interior_complete

    def moment(self, k):
        k = int(k)
        if k >= 0:
            if k <= self.K_ext:
                return complex(self.exterior[k])
            if self.exterior_complete:
                return 0j
        else:
            if -k <= self.K_int:
                return complex(self.interior[-k - 1])
            if self.interior_complete:
                return 0j
        raise TruncationError(f"moment M_{k} lies outside the stored range "
                              f"[-{self.K_int}, {self.K_ext}]")

    def as_dict(self):
        out = {}
        for k in range(-self.K_int, self.K_ext + 1):
            out[k] = self.moment(k)
        return out

    def minus_tail(self):
        """S_- as a LaurentTail (coefficients are the exterior moments)."""
        return LaurentTail(self.exterior, self.exterior_complete, radius=self.radius)

    def plus_coeffs(self):
        """Taylor coefficients of S_+ at 0: S_+(z) = sum_m M_{-m-1} z^m."""
        return np.array(self.interior)


def convolve_schwarz_minus(S, f, n_out=None):
    """(S f)_- with b_k = sum_{l>=0} M_{k-l-1} a_l, k < n_out.

    Without ``n_out`` the largest reliable order is used.  Requesting more
    coefficients than the truncations support raises TruncationError.
    """
    N = f.order
    reliable = _reliable_convolution_order(S, f)
    full = None
    if f.complete and S.exterior_complete:
        full = N + S.K_ext + 1 if N else 0
    if n_out is None:
        n_out = full if full is not None else min(reliable, N)
    n_out = int(n_out)
    if n_out > reliable:
        raise TruncationError(
            f"requested {n_out} coefficients of (S f)_- but only {reliable} are reliable "
            f"(moments stored for k in [-{S.K_int}, {S.K_ext}], tail order {N})")
    b = np.zeros(n_out, complex)
    a = f.coeffs
    for k in range(n_out):
        s = 0j
        for l in range(N):
            j = k - l - 1
            if S.known(j):
                m = S.moment(j)
                if m:
                    s += m * a[l]
        b[k] = s
    complete = full is not None and n_out >= full
    return LaurentTail(b, complete, None if complete else n_out, _radius(f) or S.radius)


def _reliable_convolution_order(S, f):
    # the reliability pattern is eventually constant in k, so scanning past
    # the point where every index range has settled decides the rest
    horizon = f.order + S.K_ext + S.K_int + 2
    for k in range(horizon + 1):
        if not _coefficient_reliable(S, f, k):
            return k
    return sys.maxsize


def _coefficient_reliable(S, f, k):
    if f.complete:
        n = f.order
        return n == 0 or (S.known(k - 1) and S.known(k - n))
    n = f.exact
    if n and not (S.known(k - 1) and S.known(k - n)):
        return False
    # the unknown a_l, l >= exact, must only meet vanishing interior moments
    return S.interior_complete and k - n - 1 < -S.K_int


def evaluate(f, z, radius=None):
    """Horner evaluation in 1/z.

    Returns ``(value, tail_bound)``; the bound is
    max|a_k| (R/|z|)^N / (|z| - R) for an incomplete tail and 0 otherwise.
    """
    R = f.radius if radius is None else radius
    z = np.asarray(z, dtype=complex)
    az = np.abs(z)
    if R is not None and np.any(az <= R):
        raise RegionError(f"evaluation point inside the disk |z| <= R = {R:g}")
    u = 1.0 / z
    acc = np.zeros_like(z)
    for a in f.coeffs[::-1]:
        acc = acc * u + a
    val = acc * u
    if f.complete or R is None:
        bound = np.zeros(az.shape)
        if not f.complete:
            bound = np.full(az.shape, np.inf)
    else:
        amax = np.max(np.abs(f.coeffs)) if f.order else 0.0
        bound = amax * (R / az) ** f.order / (az - R)
    if val.ndim == 0:
        return complex(val), float(bound)
    return val, bound


class Recovered(NamedTuple):
    tail: LaurentTail
    residual: float


def tail_from_samples(values, R, N, tol=1e-8, radius=None):
    """Recover a_0..a_{N-1} from samples f(R e^{i theta_j}), theta_j = 2 pi j / M.

    The residual is the largest sample misfit of the truncated series,
    relative to the largest sample.  Residuals above ``tol`` raise
    ConditioningError (the series was truncated too early or R is too small).
    """
    v = np.asarray(values, dtype=complex)
    M = len(v)
    if M < 2 * N:
        raise ValueError(f"need at least {2 * N} samples, got {M}")
    # f = sum_k a_k R^{-(k+1)} e^{-i(k+1) theta};  c_m = mean(f e^{i m theta})
    c = np.fft.fft(v) / M  # c[m] = mean(v_j e^{-2 pi i j m / M}) -> frequency -m
    m = np.arange(1, N + 1)
    cm = c[(-m) % M]
    a = cm * R ** m
    theta = 2 * np.pi * np.arange(M) / M
    recon = np.zeros(M, complex)
    for k in range(N - 1, -1, -1):
        recon = recon + a[k] * np.exp(-1j * (k + 1) * theta) / R ** (k + 1)
    scale = max(np.max(np.abs(v)), 1e-300) if M else 1.0
    resid = float(np.max(np.abs(recon - v)) / scale) if np.any(v) else 0.0
    if resid > tol:
        raise ConditioningError(f"sample residual {resid:.3g} exceeds tol {tol:g}")
    a = np.where(np.abs(a) < 1e-15 * max(np.max(np.abs(a)), 1e-300), 0, a) if N else a
    return Recovered(LaurentTail(a, complete=False, exact=N, radius=radius), resid)
