"""Closed-form convolution identities vs quadrature, over the parameter grid."""

import math

import numpy as np
import pytest

from efimov4d import identities as idn
from efimov4d.specfun import bessel_k

TWO_PI_SQ = 2.0 * math.pi**2


def test_conv_k0_k0_frozen_point():
    rep = idn.conv_k0_k0(1.0, 2.0)
    assert rep.closed_form == pytest.approx((4 * math.pi**2 / 3) * bessel_k(2, 2.0), rel=1e-14)
    assert rep.closed_form == pytest.approx(3.3393445, rel=1e-6)
    assert rep.rel_err < 1e-6


def test_conv_k0_k0_small_d_limit_reproduces_l2():
    # d -> 0: 2 pi^2 d^2 K2(mu d)/(6 mu^2) -> 2 pi^2/(3 mu^4)
    mu = 1.0
    closed_small = TWO_PI_SQ * 1e-8 / (6 * mu**2) * bessel_k(2, mu * 1e-4)
    assert closed_small == pytest.approx(idn.l2_k0(mu).closed_form, rel=1e-7)


def test_conv_g_g_values():
    rep = idn.conv_g_g(1.0, 2.0)
    assert rep.closed_form == pytest.approx(2.2481749, rel=1e-6)
    assert rep.rel_err < 1e-6
    # depends on mu d only
    rep2 = idn.conv_g_g(0.5, 4.0)
    assert rep2.closed_form == pytest.approx(rep.closed_form, rel=1e-14)
    assert rep2.rel_err < 1e-6


def test_conv_k0_dg_axial_value_and_sign():
    rep = idn.conv_k0_dg(1.0, 2.0)
    assert rep.closed_form == pytest.approx(math.pi**2 * bessel_k(0, 2.0) * 2.0, rel=1e-14)
    assert rep.rel_err < 1e-6
    # swapping a and b flips b - a, hence the sign: numeric check via -d axis
    # direction is equivalent to flipping the component's sign
    assert rep.closed_form > 0.0


def test_conv_k0_dg_transverse_vanishes():
    rep = idn.conv_k0_dg(1.0, 2.0, component="transverse")
    assert rep.closed_form == 0.0
    assert abs(rep.numeric) < 1e-12


def test_conv_dg_dg_components():
    axial = idn.conv_dg_dg(1.0, 2.0, "axial")
    trans = idn.conv_dg_dg(1.0, 2.0, "transverse")
    assert axial.closed_form == pytest.approx(
        TWO_PI_SQ * (bessel_k(1, 2.0) / 2.0 - bessel_k(2, 2.0)), rel=1e-14
    )
    assert trans.closed_form == pytest.approx(TWO_PI_SQ * bessel_k(1, 2.0) / 2.0, rel=1e-14)
    assert axial.rel_err < 1e-6
    assert trans.rel_err < 1e-6


def test_conv_dg_dg_component_sum():
    # summed over the four components: 2 pi^2 (4 mu K1/d - mu^2 K2)
    mu, d = 1.0, 2.0
    axial = idn.conv_dg_dg(mu, d, "axial")
    trans = idn.conv_dg_dg(mu, d, "transverse")
    total = axial.numeric + 3.0 * trans.numeric
    expected = TWO_PI_SQ * (4.0 * mu * bessel_k(1, mu * d) / d - mu**2 * bessel_k(2, mu * d))
    assert total == pytest.approx(expected, rel=1e-7)


def test_l2_k0_values():
    rep = idn.l2_k0(1.0)
    assert rep.closed_form == pytest.approx(6.5797363, rel=1e-6)
    assert rep.rel_err < 1e-6
    rep2 = idn.l2_k0(2.0)
    assert rep2.closed_form == pytest.approx(TWO_PI_SQ / 48.0, rel=1e-14)
    assert rep2.rel_err < 1e-6


def test_full_grid_under_tolerance():
    reports = idn.standard_grid_reports()
    worst = max(r.rel_err for r in reports if r.closed_form != 0.0)
    assert worst < 1e-6
    names = {r.name for r in reports}
    assert names == {"conv_k0_k0", "conv_g_g", "conv_k0_dg", "conv_dg_dg", "l2_k0"}


def test_green_flux_normalization():
    vals, extr = idn.green_flux_normalization(0.7)
    target = -4.0 * math.pi**2
    # straight values converge, the extrapolation is much sharper
    assert vals[1] == pytest.approx(target, rel=1e-4)
    assert extr == pytest.approx(target, rel=1e-8)


def test_component_validation():
    with pytest.raises(ValueError):
        idn.conv_dg_dg(1.0, 2.0, "diagonal")
    with pytest.raises(ValueError):
        idn.conv_k0_dg(1.0, 2.0, "diagonal")
