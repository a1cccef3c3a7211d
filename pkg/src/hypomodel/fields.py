"""Exterior velocity fields generated by sources in the domain.

A measure mu in Omega generates the field f = C[mu] outside; with
f = u + i v the planar vector field is (u, -v) in the 1-form convention
u dx - v dy, so 2 df/dz-bar = div - i curl of that field.  Analyticity of f
outside means the flow there is incompressible and irrotational.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class FieldGrid:
    """Rectangular grid; ``mask`` marks points that are excluded (in or near the closure)."""

    x: np.ndarray
    y: np.ndarray
    h: float
    mask: np.ndarray

    @property
    def points(self):
        X, Y = np.meshgrid(self.x, self.y, indexing="xy")
        return X + 1j * Y

    @classmethod
    def build(cls, domain, x0, x1, y0, y1, h):
        if not h > 0:
            raise ValueError("grid spacing must be positive")
        if not (x1 > x0 and y1 > y0):
            raise ValueError("grid extents must be increasing")
        nx = int(round((x1 - x0) / h)) + 1
        ny = int(round((y1 - y0) / h)) + 1
        x = x0 + h * np.arange(nx)
        y = y0 + h * np.arange(ny)
        X, Y = np.meshgrid(x, y, indexing="xy")
        Z = X + 1j * Y
        mask = np.asarray(domain.contains(Z)) | (np.asarray(domain.boundary_distance(Z)) < h)
        return cls(x, y, float(h), mask)


def velocity_field(mu, domain, grid):
    """Samples of f = C[mu] at the unmasked grid points (NaN where masked)."""
    Z = grid.points
    out = np.full(Z.shape, np.nan + 1j * np.nan)
    keep = ~grid.mask
    if np.any(keep):
        if mu.density is None:
            out[keep] = mu.contour_function(domain)(Z[keep])
        else:
            out[keep] = mu.exterior_transform(domain, Z[keep])
    return out


@dataclass(frozen=True)
class DivCurlResult:
    residual: float
    checked: int
    skipped: int


def div_curl_check(field, h):
    """max |2 df/dz-bar| by central differences; stencils touching NaN are skipped."""
    f = np.asarray(field, complex)
    if f.ndim != 2 or min(f.shape) < 3:
        raise ValueError("field must be a 2-D array with at least 3 x 3 samples")
    fx = (f[1:-1, 2:] - f[1:-1, :-2]) / (2 * h)
    fy = (f[2:, 1:-1] - f[:-2, 1:-1]) / (2 * h)
    dzbar2 = fx + 1j * fy
    ok = np.isfinite(dzbar2)
    n_ok = int(np.count_nonzero(ok))
    res = float(np.max(np.abs(dzbar2[ok]))) if n_ok else 0.0
    return DivCurlResult(res, n_ok, int(ok.size - n_ok))


def write_csv(path, grid, field):
    """Write x,y,u,v,speed for every unmasked point (round-trip float formatting)."""
    Z = grid.points
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "u", "v", "speed"])
        for z, f, m in zip(Z.ravel(), np.asarray(field).ravel(), grid.mask.ravel()):
            if m:
                continue
            w.writerow([repr(float(z.real)), repr(float(z.imag)), repr(float(f.real)),
                        repr(float(f.imag)), repr(float(abs(f)))])


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: np.array([float(r[k]) for r in rows]) for k in ("x", "y", "u", "v", "speed")}


def check_sources(mu, domain):
    for a, _ in mu.masses:
        if not (domain.contains(a) or domain.boundary_distance(a) <= 1e-12):
            raise DomainError(f"source at {a!r} lies outside the closed domain")
