"""Checks for the K0..K3 evaluators: oracle agreement, recurrences, expansions."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from efimov4d import specfun
from efimov4d.specfun import (
    EULER_GAMMA,
    UnderflowWarning,
    bessel_combo,
    bessel_k,
    expansion_remainder,
    k_square_antiderivative,
    remainder_bound,
    small_z_reference,
)


def kv_integral_oracle(nu, z):
    """K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt by direct quadrature."""
    # exp(-z cosh t) < 1e-22 once z cosh t > 51 + z
    t_max = math.acosh((51.0 + z) / z) if z < 51.0 else 5.0
    val, err = quad(
        lambda t: math.exp(-z * math.cosh(t)) * math.cosh(nu * t),
        0.0,
        t_max,
        epsabs=1e-16,
        epsrel=1e-13,
        limit=400,
    )
    return val


@pytest.mark.parametrize("nu", [0, 1, 2, 3])
def test_oracle_agreement(nu):
    for z in np.logspace(np.log10(0.01), np.log10(30.0), 25):
        ref = kv_integral_oracle(nu, z)
        assert bessel_k(nu, z) == pytest.approx(ref, rel=1e-10)


def test_k0_of_one_frozen_value():
    # frozen from the integral-representation oracle
    assert bessel_k(0, 1.0) == pytest.approx(0.42102443824070834, rel=1e-12)


def test_positive_and_decreasing():
    z = np.logspace(-3, np.log10(50.0), 300)
    for nu in range(4):
        vals = bessel_k(nu, z)
        assert np.all(vals > 0.0)
        assert np.all(np.diff(vals) < 0.0)


def test_recurrence_residual():
    z = np.logspace(-3, np.log10(50.0), 200)
    for nu in (1, 2):
        lhs = bessel_k(nu + 1, z)
        rhs = bessel_k(nu - 1, z) + 2.0 * nu * bessel_k(nu, z) / z
        assert np.max(np.abs(lhs - rhs) / lhs) < 1e-12


@pytest.mark.parametrize("nu", [1, 2, 3])
def test_derivative_recurrence_by_central_difference(nu):
    # -K_nu'(z) = K_{nu-1}(z) + nu K_nu(z) / z
    for z in (0.3, 1.0, 2.0, 5.0, 10.0):
        h = 1e-6 * max(z, 1.0)
        deriv = (bessel_k(nu, z + h) - bessel_k(nu, z - h)) / (2.0 * h)
        expected = -(bessel_k(nu - 1, z) + nu * bessel_k(nu, z) / z)
        assert deriv == pytest.approx(expected, rel=1e-8)


def test_seam_continuity():
    for nu in range(4):
        lo = bessel_k(nu, np.nextafter(2.0, 0.0))
        hi = bessel_k(nu, np.nextafter(2.0, 3.0))
        assert abs(lo - hi) / lo < 1e-12


def test_domain_errors():
    with pytest.raises(ValueError):
        bessel_k(0, 0.0)
    with pytest.raises(ValueError):
        bessel_k(0, -1.0)
    with pytest.raises(ValueError):
        bessel_k(4, 1.0)


def test_underflow_flag():
    with pytest.warns(UnderflowWarning):
        val = bessel_k(1, 800.0)
    assert val == 0.0


def test_k2_small_z_limit():
    # K_2(z) - 2/z^2 -> -1/2
    for z in (1e-3, 1e-4):
        assert bessel_k(2, z) - 2.0 / z**2 == pytest.approx(-0.5, abs=1e-4)


def test_small_z_reference_values():
    z = 0.01
    assert small_z_reference(0, z) == pytest.approx(-math.log(0.005) - EULER_GAMMA, rel=1e-15)
    assert abs(bessel_k(0, z) - small_z_reference(0, z)) < 1e-3
    z = 0.1
    assert small_z_reference(3, z) == pytest.approx(8.0 / 0.001 - 1.0 / 0.1, rel=1e-15)
    assert small_z_reference(1, z) == pytest.approx(
        1.0 / z + 0.5 * z * (math.log(z / 2.0) + EULER_GAMMA - 0.5), rel=1e-15
    )


def test_small_z_reference_orders():
    assert small_z_reference(1, 0.1, order=1) == pytest.approx(10.0, rel=1e-15)
    with pytest.raises(NotImplementedError):
        small_z_reference(0, 0.1, order=2)
    with pytest.raises(NotImplementedError):
        small_z_reference(2, 0.1, order=3)


@pytest.mark.parametrize("nu", [0, 1, 2, 3])
def test_expansion_remainder_envelope(nu):
    # remainder orders: z^2 log z for nu in {0,1,2}, z log z for nu=3
    for z in np.logspace(-3, np.log10(0.5), 40):
        assert abs(expansion_remainder(nu, z)) <= remainder_bound(nu, z)


def test_combo_log_limits():
    # (1/2) z^2 (K0 K2 - K1^2) = -log z + O(1)
    for z in (1e-3, 1e-2):
        val = bessel_combo("K0K2_minus_K1sq", z)
        assert abs(val + math.log(z)) < 1.0
    # (2 - z^2 K2) K2 -> 1
    assert bessel_combo("two_minus_z2K2_times_K2", 1e-3) == pytest.approx(1.0, abs=1e-4)
    # (1 - z K1) K2 at 1e-4 matches its expansion
    z = 1e-4
    expected = -math.log(z) - EULER_GAMMA + 0.5 + math.log(2.0)
    assert bessel_combo("one_minus_zK1_times_K2", z) == pytest.approx(expected, abs=1e-4)


def test_combo_bad_id():
    with pytest.raises(ValueError):
        bessel_combo("K9", 1.0)


def test_antiderivative_by_finite_difference():
    # d/dz of the antiderivative equals z K_nu(z)^2
    z, h = 2.0, 1e-5
    for nu in (1, 2):
        fd = (k_square_antiderivative(nu, z + h) - k_square_antiderivative(nu, z - h)) / (2 * h)
        assert fd == pytest.approx(z * bessel_k(nu, z) ** 2, rel=1e-8)


def test_antiderivative_vanishes_at_infinity():
    assert abs(k_square_antiderivative(1, 60.0)) < 1e-50
    assert abs(k_square_antiderivative(2, 60.0)) < 1e-50


def test_antiderivative_log_behaviour_near_zero():
    # (1/2) z^2 (K1^2 - K0 K2) = log z + (1/2 + gamma - log 2) + O(z^2 log z)
    for z in (1e-3, 1e-2):
        val = k_square_antiderivative(1, z)
        assert abs(val - math.log(z)) < 1.0


def test_antiderivative_domain():
    for nu in (0, 3):
        with pytest.raises(ValueError):
            k_square_antiderivative(nu, 1.0)
