"""Critical-coupling and resonance-profile checks against the closed-form well.

For the unit square well the interior zero-energy solution is J1(k r)/r, and
matching the log-derivative -2 at the edge forces J0(k) = 0, so the critical
coupling is the square of the first J0 zero.
"""

import math

import numpy as np
import pytest
import scipy.special as sp

from efimov4d import criticality as crit

J0_FIRST_ZERO = sp.jn_zeros(0, 1)[0]
LAMBDA_C_EXACT = float(J0_FIRST_ZERO**2)


@pytest.fixture(scope="module")
def well():
    return crit.RadialPotential.square_well()


@pytest.fixture(scope="module")
def lam_c(well):
    return crit.find_lambda_crit(well, (1.0, 10.0), tol=1e-12)


@pytest.fixture(scope="module")
def prof(well, lam_c):
    return crit.resonance_profile(well, lam_c)


def test_subcritical_mismatch_positive(well):
    assert crit.shoot_zero_energy(well, 1.0) > 0.0


def test_mismatch_small_coupling_limit(well):
    # u stays nearly constant, so r u'/u + 2 -> 2
    assert crit.shoot_zero_energy(well, 1e-8) == pytest.approx(2.0, abs=1e-7)


def test_mismatch_vanishes_at_exact_coupling(well):
    assert abs(crit.shoot_zero_energy(well, LAMBDA_C_EXACT)) < 1e-10


def test_mismatch_monotone_decreasing(well):
    lams = np.linspace(0.5, LAMBDA_C_EXACT, 12)
    ms = [crit.shoot_zero_energy(well, lam) for lam in lams]
    assert np.all(np.diff(ms) < 0.0)


def test_lambda_crit_value(lam_c):
    assert lam_c == pytest.approx(LAMBDA_C_EXACT, abs=1e-10)


def test_lambda_crit_scaling():
    # x -> a x scaling of the zero-energy equation: lambda_c(a) = j01^2 / a^2
    for a in (0.5, 2.0):
        pot = crit.RadialPotential.square_well(radius=a)
        lam = crit.find_lambda_crit(pot, (0.5 / a**2, 20.0 / a**2), tol=1e-10)
        assert lam == pytest.approx(LAMBDA_C_EXACT / a**2, rel=1e-8)


def test_lambda_crit_tolerance_contract(well, lam_c):
    coarse = crit.find_lambda_crit(well, (1.0, 10.0), tol=1e-4)
    assert abs(coarse - lam_c) < 1e-4


def test_bracket_error(well):
    with pytest.raises(crit.BracketError):
        crit.find_lambda_crit(well, (0.5, 1.0))


def test_profile_matches_interior_closed_form(prof):
    k = J0_FIRST_ZERO
    r = np.linspace(1e-3, 1.0, 700)
    exact = sp.j1(k * r) / (r * sp.j1(k))
    assert np.max(np.abs(prof.value(r) - exact)) < 1e-8


def test_profile_exact_tail(prof):
    assert prof.value(2.0) == pytest.approx(0.25, rel=1e-14)
    assert prof.value(10.0) == pytest.approx(0.01, rel=1e-14)
    assert prof.slope(2.0) == pytest.approx(-0.25, rel=1e-14)


def test_profile_positive(prof):
    assert np.all(prof.values > 0.0)


def test_profile_c1_matching(prof):
    a = prof.matching_radius
    inside = prof.value(a * (1.0 - 1e-10))
    outside = prof.value(a * (1.0 + 1e-10))
    assert inside == pytest.approx(outside, rel=1e-8)


def test_profile_rejects_noncritical(well):
    with pytest.raises(crit.ConsistencyError):
        crit.resonance_profile(well, 4.0)


def test_interior_node_flag(well):
    # beyond k = j_{1,1} the interior solution crosses zero before the edge
    assert crit.shoot_zero_energy(well, 16.0) == -math.inf


def test_c0_identity(prof, well, lam_c):
    assert abs(crit.c0_identity_residual(prof, well, lam_c)) < 1e-6


def test_c0_identity_quadrature_convergence(prof, well, lam_c):
    loose = crit.inner_product_v_phi(prof, well, lam_c, tol=1e-4)
    tight = crit.inner_product_v_phi(prof, well, lam_c, tol=1e-12)
    assert abs(loose - tight) / abs(tight) < 1e-4


def test_zero_energy_identity(prof, well, lam_c):
    gsq = crit.gradient_norm_sq(prof, well)
    vterm = crit.potential_term(prof, well, lam_c)
    assert abs(gsq + vterm) / gsq < 1e-6
    # closed form for the square well: -int V |phi0|^2 = pi^2 lambda_c
    assert -vterm == pytest.approx(math.pi**2 * LAMBDA_C_EXACT, rel=1e-9)


def test_phi0_not_square_integrable(prof):
    # tail is exactly c0 r^-2, so the L2 integrand decays like 1/r: log-divergent
    r = np.geomspace(prof.matching_radius, 1e6, 50)
    integrand = prof.value(r) ** 2 * r**3
    assert prof.tail_constant == 1.0
    assert np.allclose(integrand, 1.0 / r, rtol=1e-12)


def test_potential_requires_compact_support():
    with pytest.raises(ValueError):
        crit.RadialPotential(profile=lambda r: np.exp(-np.asarray(r)), support_radius=1.0)
