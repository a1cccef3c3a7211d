import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypomodel import hilbert as hb
from hypomodel.domain import Disk, Ellipse
from hypomodel.errors import ConvergenceError, DomainError
from hypomodel.kernels import KernelEvaluator
from hypomodel.series import LaurentTail

DISK = Disk()
ELL = Ellipse(2, 1)
KD = KernelEvaluator(DISK)
KE = KernelEvaluator(ELL)


def test_schedule_validation():
    with pytest.raises(ValueError):
        hb.EpsilonSchedule((0.01, 0.02))
    with pytest.raises(ValueError):
        hb.EpsilonSchedule((0.6,))


def test_extrapolate_exact_for_quadratics():
    eps = (0.04, 0.02, 0.01)
    vals = [3 + 2 * e + 5 * e * e for e in eps]
    assert hb.extrapolate(eps, vals, 2) == pytest.approx(3.0, abs=1e-12)


@settings(max_examples=10, deadline=None)
@given(st.floats(0, 2 * math.pi), st.floats(0, 0.8))
def test_disk_cauchy_kernel_norm(t, r):
    a = r * np.exp(1j * t)
    assert hb.inner_product_O(hb.k_a(a), hb.k_a(a), DISK, kernel=KD) == pytest.approx(
        1 / (1 - r * r), rel=1e-10)


def test_s_minus_norms():
    for d, k, expected in ((DISK, KD, 1.0), (ELL, KE, 2.0)):
        v = hb.inner_product_O(k.s_minus_continued, k.s_minus_continued, d, kernel=k)
        assert v == pytest.approx(expected, abs=1e-12)


def test_inner_product_is_hermitian():
    f, g = hb.k_a(0.3), LaurentTail([1.0, 0.5j])
    a = hb.inner_product_O(f, g, ELL, kernel=KE)
    b = hb.inner_product_O(g, f, ELL, kernel=KE)
    assert a == pytest.approx(np.conj(b), abs=1e-13)


def test_gram_psd_and_hermitian():
    els = [hb.k_a(a) for a in (0.1, -0.3j, 0.5 + 0.2j)] + [LaurentTail.monomial(j) for j in range(3)]
    G = hb.gram_matrix(els, ELL, kernel=KE)
    assert np.allclose(G, G.conj().T)
    assert np.min(np.linalg.eigvalsh(G)) > -1e-10


def test_disk_on_family_e0k():
    els = [hb.disk_basis_element(0, k) for k in range(4)]
    G = hb.gram_matrix(els, DISK, kernel=KD)
    assert np.allclose(G, np.eye(4), atol=1e-10)


def test_disk_e_nk_coincide_or_vanish():
    # e_nk has the same exterior transform as e_{0,k-n} (n <= k) and is null for n > k
    z = np.array([2.0, -1.5j])
    for n in range(3):
        for k in range(3):
            f = hb.disk_basis_element(n, k).contour_function(DISK)(z)
            if n > k:
                assert np.allclose(f, 0, atol=1e-14)
            else:
                g = hb.disk_basis_element(0, k - n).contour_function(DISK)(z)
                assert np.allclose(f, g, atol=1e-14)


def test_point_mass_pairing_and_mean_value():
    assert hb.inner_product_point_masses(0.2, 0.3j, DISK, KD) == pytest.approx(
        1 / (1 - 0.2 * np.conj(0.3j)))
    f = hb.HElement(poly={(2, 1): 1.0, (0, 2): 0.5j, (0, 0): -2.0})
    lhs, rhs = hb.mean_value_identity(f, ELL, kernel=KE)
    assert lhs == pytest.approx(rhs, abs=1e-10)


def test_general_density_pairs_like_polynomial():
    # the constant density 1 given as a callable versus as a polynomial; the
    # area-quadrature pairing is limited by the boundary singularity of H
    poly = hb.HElement.monomial(0, 0)
    dens = hb.HElement(density=lambda s: np.ones(np.shape(s), complex))
    a = hb.inner_product_H(poly, poly, DISK, kernel=KD)
    b = hb.inner_product_H(dens, poly, DISK, kernel=KD)
    assert b == pytest.approx(a, rel=1e-3)


def test_null_tests():
    rep = hb.null_test(hb.HElement(poly={(0, 1): 3.0, (1, 0): -5.0}), ELL, kernel=KE)
    assert rep.is_null
    rep = hb.null_test(hb.HElement.monomial(1, 1), DISK, kernel=KD)
    assert not rep.is_null and rep.norm > 0.1


def test_instability_demo_only_on_unit_disk():
    a, b = hb.decomposition_instability_demo(DISK, kernel=KD)
    assert abs(a) < 1e-10 and b == pytest.approx(0.5, abs=1e-10)
    with pytest.raises(DomainError):
        hb.decomposition_instability_demo(ELL, kernel=KE)


def test_reproducing_kernel_tail_and_decay():
    L = hb.reproducing_kernel_L(ELL, 4.0 + 1j, KE)
    rec = L.tail(24, tol=1e-6)
    assert rec.residual < 1e-6
    assert abs(hb.reproducing_kernel_L(ELL, 1e6, KE)(5.0)) < 1e-5
    with pytest.raises(DomainError):
        hb.reproducing_kernel_L(ELL, 0.5, KE)


def test_boundary_identities_disk():
    assert hb.int_HS(0.3 + 0.1j, DISK, kernel=KD).value == pytest.approx(1, abs=1e-12)
    w = 2.0 - 1.0j
    assert hb.int_HE(0.3, w, DISK, kernel=KD).value == pytest.approx(1 / np.conj(w - 0.3), abs=1e-12)
    assert hb.kernel_normalization(0.4j, DISK, KD) == pytest.approx(1, abs=1e-12)


def test_convergence_check_raises_for_non_analytic_input():
    # a pole at 0.975 sits between the eps contours, so the values jump
    with pytest.raises(ConvergenceError):
        hb.contour_gram([hb.k_a(0.975), hb.k_a(0.1)], DISK, kernel=KD)
