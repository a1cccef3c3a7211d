import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hypomodel.domain import Disk, Ellipse
from hypomodel.errors import ConditioningError, RegionError, TruncationError
from hypomodel.series import (LaurentTail, convolve_schwarz_minus, evaluate,
                              multiply_by_z_minus, residue_at_infinity, tail_from_samples)

coef = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)
tails = st.lists(coef, min_size=1, max_size=12).map(LaurentTail)


@given(tails, tails)
def test_addition_is_coefficientwise(f, g):
    h = f + g
    n = max(f.order, g.order)
    assert np.allclose(h.coeffs, f.padded(n) + g.padded(n))


@given(tails)
def test_residue_is_minus_leading_coefficient(f):
    assert residue_at_infinity(f) == -f.coeffs[0]


@settings(max_examples=25)
@given(tails)
def test_residue_matches_contour_integral(f):
    R = 3.0
    n = 64
    z = R * np.exp(2j * np.pi * np.arange(n) / n)
    integral = np.mean(evaluate(f, z)[0] * z)  # (1/2 pi i) oint f dz
    assert residue_at_infinity(f) == pytest.approx(-integral, abs=1e-9 * (1 + np.max(np.abs(f.coeffs))))


@given(tails)
def test_shift_drops_constant(f):
    out = multiply_by_z_minus(f)
    assert out.dropped == f.coeffs[0]
    assert np.array_equal(out.tail.coeffs, f.coeffs[1:])


def test_incomplete_tail_refuses_padding():
    f = LaurentTail([1, 2], complete=False, exact=2)
    with pytest.raises(TruncationError):
        f.padded(4)
    with pytest.raises(TruncationError):
        f.coefficient(3)


def test_evaluate_region_and_bound():
    f = LaurentTail([1.0, 0.5], complete=False, exact=2, radius=1.0)
    with pytest.raises(RegionError):
        evaluate(f, 0.5)
    val, bound = evaluate(f, 3.0)
    assert val == pytest.approx(1 / 3 + 0.5 / 9)
    assert bound > 0


def test_derivative():
    f = LaurentTail([1.0, 2.0])
    z = 2.5
    h = 1e-6
    num = (evaluate(f, z + h)[0] - evaluate(f, z - h)[0]) / (2 * h)
    assert evaluate(f.derivative(), z)[0] == pytest.approx(num, rel=1e-8)


def test_disk_schwarz_convolution_is_exact():
    # unit disk: S = 1/z so (S f)_- = f / z, a pure shift up
    S = Disk().schwarz_series(4, 4)
    f = LaurentTail([1.0, 2.0, 3.0])
    out = convolve_schwarz_minus(S, f)
    assert np.allclose(out.coeffs[:4], [0, 1, 2, 3])


def test_convolution_refuses_unreliable_orders():
    S = Ellipse(2, 1).schwarz_series(4, 6)
    f = LaurentTail([1.0, 0.5])
    with pytest.raises(TruncationError):
        convolve_schwarz_minus(S, f, 50)


def test_tail_from_samples_roundtrip():
    f = LaurentTail([1.0, -0.5j, 0.25, 0.0, 0.1])
    R, M = 2.0, 32
    z = R * np.exp(2j * np.pi * np.arange(M) / M)
    rec = tail_from_samples(evaluate(f, z)[0], R, 8)
    assert np.allclose(rec.tail.coeffs[:5], f.coeffs, atol=1e-12)
    assert rec.residual < 1e-12


def test_tail_from_samples_flags_truncation():
    R, M = 1.2, 32
    z = R * np.exp(2j * np.pi * np.arange(M) / M)
    with pytest.raises(ConditioningError):
        tail_from_samples(1 / (z - 1.0), R, 4)
