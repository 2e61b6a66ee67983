"""Norm, energy, and kinetic-control functionals of the double-well trial state.

The quadratic form splits by region and reflection symmetry,

    <phi, H phi> = 2 |grad phi|^2_ball + 2 |grad phi|^2_annulus
                   + |grad phi|^2_exterior + <phi, V phi>,

with each region integral evaluated by axisymmetric quadrature.  The ball
gradient is assembled through the zero-energy identity of the resonance
(interior gradient norm = -int V phi0^2 minus the exact tail beyond rho), so
the potential term cancels structurally against it and the L^(-2 theta)
leading order drops out without catastrophic cancellation; the direct
quadrature value is kept alongside as a diagnostic.  The kinetic-control form
Q uses the closed-form mu-derivative of the Green function, which removes the
pointwise cancellation between the shift and (x3, x4) gradients exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import criticality as crit
from .criticality import RadialPotential, ResonanceProfile
from .quadrature import annulus_blocks, axisym_integrate, exterior_blocks, radial_integrate
from .specfun import bessel_k
from .trialstate import RegionTag, TrialParams, gamma_ws, grad_phi_sq_ws, phi_ws

PI_SQ = math.pi**2
FOUR_PI_SQ = 4.0 * PI_SQ
EIGHT_PI_SQ = 8.0 * PI_SQ
TRUNCATION_DECADES = 40.0

_LOG2 = math.log(2.0)
from .specfun import EULER_GAMMA as _GAMMA


class FitError(ValueError):
    """Asymptotic fit rejected: too few samples, span, or conditioning."""


@dataclass(frozen=True)
class PaperConstants:
    """Closed-form coefficients of the L^-2 energy and kinetic expansions."""

    mu0: float
    C1: float
    C2: float
    C3: float
    C4: float
    C5: float
    energy_coeff: float
    kinetic_coeff: float


def paper_constants(mu0: float) -> PaperConstants:
    """All five expansion constants at a given mu0, with the algebraic
    cancellation C1 + C3 + C4 = 2 pi^2 mu0^2 (1 - 2 K2(mu0)) verified."""
    if mu0 <= 0.0:
        raise ValueError("mu0 must be positive")
    k0 = bessel_k(0, mu0)
    k1 = bessel_k(1, mu0)
    k2 = bessel_k(2, mu0)
    c1 = EIGHT_PI_SQ * mu0**2 * (_LOG2 - _GAMMA) + FOUR_PI_SQ * mu0**2 - 16.0 * PI_SQ * mu0 * k1
    c2 = EIGHT_PI_SQ * mu0**2
    c3 = EIGHT_PI_SQ * mu0**2 * (_GAMMA - _LOG2) - 2.0 * PI_SQ * mu0**2
    c4 = 16.0 * PI_SQ * mu0 * k1 - FOUR_PI_SQ * mu0**2 * k2
    c5 = (FOUR_PI_SQ / 3.0) * (1.0 + mu0 * k1 + 3.5 * mu0**2 * k0)
    energy_coeff = 2.0 * PI_SQ * mu0**2 * (1.0 - 2.0 * k2)
    summed = c1 + c3 + c4
    if abs(summed - energy_coeff) > 1e-12 * max(abs(energy_coeff), 1.0):
        raise AssertionError(
            f"constant algebra broke: C1+C3+C4 = {summed!r} vs {energy_coeff!r}"
        )
    return PaperConstants(
        mu0=mu0, C1=c1, C2=c2, C3=c3, C4=c4, C5=c5,
        energy_coeff=energy_coeff, kinetic_coeff=c5 / FOUR_PI_SQ,
    )


@dataclass(frozen=True)
class EffectiveCoupling:
    """c(eps) = 5/6 - (11/4) eps and whether it clears the 1/2 threshold."""

    eps: float
    value: float
    exceeds_half: bool


def effective_coupling(eps: float) -> EffectiveCoupling:
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    value = 5.0 / 6.0 - 2.75 * eps
    return EffectiveCoupling(eps=eps, value=value, exceeds_half=value > 0.5)


# ---------------------------------------------------------------------------
# Region integrals.
# ---------------------------------------------------------------------------


def _truncation(p: TrialParams) -> float:
    return 0.5 * p.L + TRUNCATION_DECADES / p.mu


def _ball_norm_sq(p: TrialParams, res: ResonanceProfile, tol) -> float:
    """|phi0|^2 over one rho-ball: interior table plus the exact log tail."""
    a = res.matching_radius
    interior = radial_integrate(lambda r: res.value(r) ** 2, [(0.0, a)], tol=tol).value
    return interior + 2.0 * PI_SQ * res.tail_constant**2 * math.log(p.rho / a)


def _ball_grad_sq_direct(p: TrialParams, res: ResonanceProfile, tol) -> float:
    """|grad phi0|^2 over one rho-ball by direct quadrature."""
    a = res.matching_radius
    interior = radial_integrate(lambda r: res.slope(r) ** 2, [(0.0, a)], tol=tol).value
    tail = FOUR_PI_SQ * res.tail_constant**2 * (a**-2 - p.rho**-2)
    return interior + tail


def _ball_grad_sq_identity(p: TrialParams, res: ResonanceProfile,
                           pot: RadialPotential, lam: float, tol) -> float:
    """|grad phi0|^2 over one rho-ball via the zero-energy identity:

        |grad phi0|^2_{B_rho} = -int V phi0^2 - |grad phi0|^2_{r > rho},

    with the tail term exact.  Keeps the potential cancellation structural.
    """
    vterm = crit.potential_term(res, pot, lam, tol=tol)
    tail = FOUR_PI_SQ * res.tail_constant**2 / p.rho**2
    return -vterm - tail


def norm_squared(p: TrialParams, res: ResonanceProfile, tol=1e-9) -> float:
    """Full-space |phi|^2: 2 x ball + 2 x annulus + exterior."""
    pieces = norm_squared_by_region(p, res, tol)
    return math.fsum(pieces.values())


def norm_squared_by_region(p: TrialParams, res: ResonanceProfile, tol=1e-9):
    trunc = _truncation(p)
    ball = _ball_norm_sq(p, res, tol)

    def phi_sq(w, s):
        return phi_ws(p, res, w, s) ** 2

    ann = axisym_integrate(
        phi_sq, annulus_blocks(0.5 * p.L, p.rho, 2.0 * p.rho), tol=tol
    ).value

    def gam_sq(w, s):
        return gamma_ws(p, w, s) ** 2

    ext = axisym_integrate(
        gam_sq, exterior_blocks(p.L, 2.0 * p.rho, trunc), tol=tol
    ).value
    return {
        RegionTag.BALL_PLUS: ball,
        RegionTag.BALL_MINUS: ball,
        RegionTag.ANNULUS_PLUS: ann,
        RegionTag.ANNULUS_MINUS: ann,
        RegionTag.EXTERIOR: ext,
    }


@dataclass(frozen=True)
class EnergyReport:
    """Per-separation evaluation of the quadratic form and its pieces."""

    L: float
    norm_sq: float
    grad_sq: float
    pot_term: float
    energy: float
    rayleigh: float
    kinetic_control: float
    per_region: dict = field(default_factory=dict)
    ball_identity_defect: float = 0.0

    def __post_init__(self):
        if self.norm_sq <= 0.0:
            raise ValueError("norm must be positive")


def energy_form(p: TrialParams, res: ResonanceProfile, pot: RadialPotential,
                lam: float, tol=1e-9, with_kinetic=False) -> EnergyReport:
    """Quadratic form <phi, H phi> with per-region breakdown.

    lam is the (critical) coupling multiplying pot.profile.  Only the plus
    half is integrated; reflection symmetry doubles it.
    """
    trunc = _truncation(p)

    pot_term = 2.0 * crit.potential_term(res, pot, lam, tol=tol)
    ball_grad_id = _ball_grad_sq_identity(p, res, pot, lam, tol)
    ball_grad_direct = _ball_grad_sq_direct(p, res, tol)

    def grad_sq_field(w, s):
        return grad_phi_sq_ws(p, res, w, s)

    ann_grad = axisym_integrate(
        grad_sq_field, annulus_blocks(0.5 * p.L, p.rho, 2.0 * p.rho), tol=tol
    ).value
    ext_grad = axisym_integrate(
        grad_sq_field, exterior_blocks(p.L, 2.0 * p.rho, trunc), tol=tol
    ).value

    norms = norm_squared_by_region(p, res, tol)
    norm_sq = math.fsum(norms.values())

    grad_sq = 2.0 * ball_grad_id + 2.0 * ann_grad + ext_grad
    energy = grad_sq + pot_term
    kinetic = kinetic_control_form(p, tol=tol) if with_kinetic else math.nan

    per_region = {
        tag: (norms[tag], grad)
        for tag, grad in (
            (RegionTag.BALL_PLUS, ball_grad_id),
            (RegionTag.BALL_MINUS, ball_grad_id),
            (RegionTag.ANNULUS_PLUS, ann_grad),
            (RegionTag.ANNULUS_MINUS, ann_grad),
            (RegionTag.EXTERIOR, ext_grad),
        )
    }
    return EnergyReport(
        L=p.L,
        norm_sq=norm_sq,
        grad_sq=grad_sq,
        pot_term=pot_term,
        energy=energy,
        rayleigh=energy / norm_sq,
        kinetic_control=kinetic,
        per_region=per_region,
        ball_identity_defect=ball_grad_direct - ball_grad_id,
    )


# ---------------------------------------------------------------------------
# Kinetic-control form Q over Omega_rho.
# ---------------------------------------------------------------------------


def _kinetic_integrand(p: TrialParams, cross_only=False, singles_only=False):
    """Pointwise Q integrand for Gamma with the exact mu-derivative forms.

    With A = G(x - l/2), B = G(x + l/2) and the shift r = (0, L) e4:

        |grad_r Gamma|^2 - (1/4) |grad_34 Gamma|^2
            = -grad_34 A . grad_34 B
              + (mu^2/L)(K0(mu d+) + K0(mu d-)) (d4 B - d4 A)
              + (mu^4/L^2)(K0(mu d+) + K0(mu d-))^2,

    after the exact cancellation of the (1/4)-terms; the transverse product
    x3^2 averages to s^2/3 over the angular sphere.
    """
    mu, L = p.mu, p.L

    def f(w, s):
        dp = np.hypot(w - 0.5 * L, s)
        dm = np.hypot(w + 0.5 * L, s)
        ra = -(mu**2) * bessel_k(2, mu * dp) / dp
        rb = -(mu**2) * bessel_k(2, mu * dm) / dm
        k0p = bessel_k(0, mu * dp)
        k0m = bessel_k(0, mu * dm)
        d4a = ra * (w - 0.5 * L) / dp
        d4b = rb * (w + 0.5 * L) / dm
        cross = -ra * rb * (s * s / 3.0 + (w - 0.5 * L) * (w + 0.5 * L)) / (dp * dm)
        cross += (mu**2 / L) * (k0p * d4b - k0m * d4a)
        cross += 2.0 * (mu**4 / L**2) * k0p * k0m
        singles = (mu**2 / L) * (k0m * d4b - k0p * d4a)
        singles += (mu**4 / L**2) * (k0p**2 + k0m**2)
        if cross_only:
            return cross
        if singles_only:
            return singles
        return cross + singles

    return f


def kinetic_control_form(p: TrialParams, tol=1e-9) -> float:
    """Q(Gamma) over Omega_rho; L^2 Q(Gamma) -> C5(mu0) as L grows."""
    blocks = exterior_blocks(p.L, p.rho, _truncation(p))
    return axisym_integrate(_kinetic_integrand(p), blocks, tol=tol).value


def kinetic_control_parts(p: TrialParams, tol=1e-9):
    """(total, single-well part) of Q(Gamma); the single-well part carries the
    4 pi^2/3 L^-2 leading order."""
    blocks = exterior_blocks(p.L, p.rho, _truncation(p))
    total = axisym_integrate(_kinetic_integrand(p), blocks, tol=tol).value
    singles = axisym_integrate(
        _kinetic_integrand(p, singles_only=True), blocks, tol=tol
    ).value
    return total, singles


# ---------------------------------------------------------------------------
# Asymptotic fits.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticFit:
    """Least-squares extraction of the leading coefficient across L."""

    model: str
    theta: float
    a: float
    b: float
    residual_norm: float
    L_samples: tuple

    def predict(self, L):
        L = np.asarray(L, dtype=float)
        if self.model == "log":
            return self.a * np.log(L) + self.b
        return self.a + self.b * L ** (self.theta - 1.0)


def fit_asymptotic(samples, theta: float, model: str) -> AsymptoticFit:
    """Fit value(L) = a + b L^(theta-1) ('power') or a log L + b ('log').

    Needs at least 4 samples spanning two decades of L.
    """
    if model not in ("power", "log"):
        raise FitError(f"unknown model {model!r}")
    ls = np.array([s[0] for s in samples], dtype=float)
    vals = np.array([s[1] for s in samples], dtype=float)
    if len(ls) < 4:
        raise FitError("need at least 4 samples")
    if np.max(ls) / np.min(ls) < 99.0:
        raise FitError("samples must span at least two decades of L")
    if model == "log":
        design = np.column_stack([np.log(ls), np.ones_like(ls)])
    else:
        design = np.column_stack([np.ones_like(ls), ls ** (theta - 1.0)])
    cond = np.linalg.cond(design)
    if not np.isfinite(cond) or cond > 1e12:
        raise FitError(f"ill-conditioned design matrix (cond = {cond:.2g})")
    coef, _, *_ = np.linalg.lstsq(design, vals, rcond=None)
    resid = float(np.linalg.norm(design @ coef - vals))
    return AsymptoticFit(
        model=model, theta=theta, a=float(coef[0]), b=float(coef[1]),
        residual_norm=resid, L_samples=tuple(ls),
    )


def energy_scan(mu0, l_values, delta=1.0, rho0=1.0, pot=None, lam=None,
                res=None, tol=1e-9, with_kinetic=True):
    """EnergyReports across separations at fixed mu0 (shared resonance)."""
    if pot is None:
        pot = RadialPotential.square_well(radius=rho0)
    if lam is None:
        lam = crit.find_lambda_crit(pot, (1.0, 10.0 / rho0**2), tol=1e-12)
    if res is None:
        res = crit.resonance_profile(pot, lam)
    reports = []
    for L in l_values:
        p = TrialParams(L=float(L), mu0=mu0, delta=delta, rho0=rho0)
        reports.append(energy_form(p, res, pot, lam, tol=tol, with_kinetic=with_kinetic))
    return reports
