import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypomodel.domain import Disk, Ellipse
from hypomodel.errors import AccuracyError, DomainError, EvaluationError
from hypomodel.quadrature import (AreaQuadrature, _bump, area_quadrature, gauss_legendre01,
                                  integrate_area, integrate_boundary, refine_near,
                                  trapezoid_curve)

# 4 E(k = 0.9), complete elliptic integral of the second kind (scipy.special.ellipe(0.81))
NEWTON_POTENTIAL_DISK_AT_09 = 4.686788211126457


@given(st.integers(1, 30), st.integers(0, 20))
def test_gauss_legendre_exact_for_polynomials(n, p):
    x, w = gauss_legendre01(n)
    if p <= 2 * n - 1:
        assert np.sum(w * x ** p) == pytest.approx(1 / (p + 1), rel=1e-13, abs=1e-15)


def test_trapezoid_circle_moments():
    q = trapezoid_curve(lambda t: np.exp(1j * t), lambda t: 1j * np.exp(1j * t), 64)
    assert integrate_boundary(lambda z: 1 / z, q) == pytest.approx(2j * math.pi, abs=1e-14)
    for k in range(0, 10):
        assert abs(integrate_boundary(lambda z: z ** k, q)) < 1e-13


def test_boundary_rule_rounds_to_even_nodes():
    assert len(Disk().boundary_quadrature(33)) == 34


def test_nonfinite_integrand_raises():
    q = Disk().boundary_quadrature(16)
    with pytest.raises(EvaluationError), np.errstate(all="ignore"):
        integrate_boundary(lambda z: 1 / (z - 1), q)


def test_bump_profile():
    s = np.linspace(0, 1.5, 301)
    b = _bump(s)
    assert np.all(b[s <= 0.3] == 1) and np.all(b[s >= 1] == 0)
    assert np.all(np.diff(b) <= 0)


@pytest.mark.parametrize("domain", [Disk(), Disk(0.5 - 0.2j, 2.0), Ellipse(2, 1)])
def test_area_rule_total_weight(domain):
    q = area_quadrature(domain)
    assert isinstance(q, AreaQuadrature)
    assert q.total_weight == pytest.approx(domain.area, rel=1e-13)
    assert np.all(q.weights > 0)


def test_area_rule_moments_on_ellipse():
    # int_E x^2 dA = pi a^3 b / 4
    d = Ellipse(2, 1)
    val = integrate_area(lambda z: z.real ** 2, area_quadrature(d), tol=1e-12)
    assert val == pytest.approx(math.pi * 8 / 4, rel=1e-12)


def test_singular_refinement_matches_oracle():
    val = integrate_area(lambda z: 1 / np.abs(z - 0.9), area_quadrature(Disk()), tol=1e-9,
                         singular_points=[0.9])
    assert abs(val - NEWTON_POTENTIAL_DISK_AT_09) < 1e-6


def test_refined_rule_preserves_area_and_rebuilds():
    d = Disk()
    q = refine_near(area_quadrature(d), [0.5], 0.2)
    one = lambda z: np.ones(z.shape)  # noqa: E731
    assert integrate_area(one, q, tol=1e-8) == pytest.approx(math.pi, abs=1e-8)
    q2 = refine_near(q, [-0.5j], 0.2)
    assert set(q2.points) == {0.5 + 0j, -0.5j}
    assert integrate_area(one, q2, tol=1e-8) == pytest.approx(math.pi, abs=1e-8)


def test_refinement_point_outside_raises():
    with pytest.raises(DomainError):
        refine_near(area_quadrature(Disk()), [1.5], 0.1)


def test_accuracy_error_carries_estimate():
    with pytest.raises(AccuracyError) as info:
        integrate_area(lambda z: np.abs(z - 0.3) ** -1.9, area_quadrature(Disk()), tol=1e-14,
                       max_depth=2)
    assert np.isfinite(info.value.estimate) and info.value.error > 0


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0.0, 0.9))
def test_polynomial_integrals_exact(theta, r):
    # mean value property: (1/pi) int_D (z - c)^2 ... use harmonic u = Re(z^3) + 1
    c = r * np.exp(1j * theta)
    val = integrate_area(lambda z: (z ** 3 * np.exp(1j * theta)).real + 1 + 0 * c,
                         area_quadrature(Disk()))
    assert val == pytest.approx(math.pi, abs=1e-12)
