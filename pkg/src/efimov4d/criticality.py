"""Critical coupling and zero-energy resonance profile for radial 4D wells.

The zero-energy radial equation u'' + (3/r) u' = lam * profile(r) * u is
integrated outward from a series start at the regular singular origin.  At the
support edge the logarithmic derivative r u'/u equals -2 exactly when the
exterior solution is the pure decaying tail c0 / r^2; the mismatch
m(lam) = r u'/u + 2 is driven to zero by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from .quadrature import radial_integrate

FOUR_PI_SQ = 4.0 * math.pi**2


class BracketError(ValueError):
    """No sign change of the shooting mismatch across the coupling bracket."""


class ConsistencyError(RuntimeError):
    """The supplied coupling is not critical within tolerance."""


@dataclass(frozen=True)
class RadialPotential:
    """Radial, compactly supported potential profile.

    profile carries the sign (an attractive unit well is -1 inside the
    support); coupling scales it, so V(r) = coupling * profile(r).
    """

    profile: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    short_range_R: float | None = None
    short_range_delta: float = 1.0
    coupling: float = 1.0

    def __post_init__(self):
        if self.support_radius <= 0.0:
            raise ValueError("support_radius must be positive")
        if self.short_range_delta <= 0.0:
            raise ValueError("short_range_delta must be positive")
        if self.short_range_R is None:
            object.__setattr__(self, "short_range_R", self.support_radius)
        r_out = self.support_radius * (1.0 + np.linspace(1e-9, 3.0, 64))
        if np.any(np.asarray(self.profile(r_out)) != 0.0):
            raise ValueError("profile must vanish beyond support_radius")

    @classmethod
    def square_well(cls, radius=1.0, **kw):
        def profile(r):
            r = np.asarray(r, dtype=float)
            return np.where(r < radius, -1.0, 0.0)

        return cls(profile=profile, support_radius=radius, **kw)

    def value(self, r, lam=None):
        lam = self.coupling if lam is None else lam
        return lam * np.asarray(self.profile(r), dtype=float)


@dataclass
class ResonanceProfile:
    """Zero-energy radial solution, normalized so the tail is exactly r^-2."""

    grid: np.ndarray
    values: np.ndarray
    derivative: np.ndarray
    tail_constant: float
    matching_radius: float
    _interp_u: PchipInterpolator = field(repr=False, default=None)
    _interp_du: PchipInterpolator = field(repr=False, default=None)

    def __post_init__(self):
        if self._interp_u is None:
            self._interp_u = PchipInterpolator(self.grid, self.values)
        if self._interp_du is None:
            self._interp_du = PchipInterpolator(self.grid, self.derivative)

    def value(self, r):
        """u(r): interpolated inside the support, exact c0 r^-2 tail outside."""
        r = np.asarray(r, dtype=float)
        inside = r <= self.matching_radius
        out = np.empty_like(r)
        if np.any(inside):
            out[inside] = self._interp_u(r[inside])
        if np.any(~inside):
            out[~inside] = self.tail_constant / r[~inside] ** 2
        if out.ndim == 0:
            return float(out)
        return out

    def slope(self, r):
        """u'(r), with the exact -2 c0 r^-3 tail outside the support."""
        r = np.asarray(r, dtype=float)
        inside = r <= self.matching_radius
        out = np.empty_like(r)
        if np.any(inside):
            out[inside] = self._interp_du(r[inside])
        if np.any(~inside):
            out[~inside] = -2.0 * self.tail_constant / r[~inside] ** 3
        if out.ndim == 0:
            return float(out)
        return out


_SERIES_START_FRACTION = 1e-3


def _integrate_radial(pot: RadialPotential, lam: float, dense=False):
    """Outward integration of the zero-energy equation up to support_radius."""
    r0 = _SERIES_START_FRACTION * pot.support_radius
    v0 = lam * float(pot.profile(np.asarray(0.5 * r0)))
    # series about the regular origin: u = 1 + v0 r^2/8 + v0^2 r^4/192
    u0 = 1.0 + v0 * r0**2 / 8.0 + v0**2 * r0**4 / 192.0
    du0 = v0 * r0 / 4.0 + v0**2 * r0**3 / 48.0

    def rhs(r, y):
        u, du = y
        return [du, lam * float(pot.profile(np.asarray(r))) * u - 3.0 * du / r]

    def node(r, y):
        return y[0]

    node.terminal = True
    node.direction = -1.0

    sol = solve_ivp(
        rhs,
        (r0, pot.support_radius),
        [u0, du0],
        method="DOP853",
        rtol=1e-13,
        atol=1e-14,
        dense_output=dense,
        events=node,
    )
    if not sol.success and sol.status != 1:
        raise RuntimeError(f"radial integration failed: {sol.message}")
    hit_node = sol.status == 1
    return sol, hit_node


def shoot_zero_energy(pot: RadialPotential, lam: float) -> float:
    """Mismatch m(lam) = r u'/u + 2 at the support edge.

    Returns -inf when u develops an interior node (coupling beyond
    criticality).
    """
    if lam <= 0.0:
        raise ValueError("coupling must be positive")
    sol, hit_node = _integrate_radial(pot, lam)
    if hit_node:
        return -math.inf
    u, du = sol.y[0, -1], sol.y[1, -1]
    return pot.support_radius * du / u + 2.0


def find_lambda_crit(pot: RadialPotential, bracket, tol=1e-10) -> float:
    """Bisection for the coupling with a pure r^-2 zero-energy tail."""
    lo, hi = bracket
    m_lo = shoot_zero_energy(pot, lo)
    m_hi = shoot_zero_energy(pot, hi)
    if m_lo == 0.0:
        return lo
    if m_hi == 0.0:
        return hi
    if m_lo * m_hi > 0.0:
        raise BracketError(
            f"mismatch does not change sign on [{lo}, {hi}]: m={m_lo:.3g}, {m_hi:.3g}"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        m_mid = shoot_zero_energy(pot, mid)
        if m_mid == 0.0:
            return mid
        if m_lo * m_mid < 0.0:
            hi = mid
        else:
            lo, m_lo = mid, m_mid
    return 0.5 * (lo + hi)


def resonance_profile(pot: RadialPotential, lambda_c: float,
                      n_grid=4001, r_max=None, mismatch_tol=1e-6) -> ResonanceProfile:
    """Tabulated zero-energy solution rescaled so the exterior tail is r^-2."""
    mismatch = shoot_zero_energy(pot, lambda_c)
    if not abs(mismatch) < mismatch_tol:
        raise ConsistencyError(
            f"coupling {lambda_c} is not critical: mismatch {mismatch:.3g}"
        )
    sol, _ = _integrate_radial(pot, lambda_c, dense=True)
    a = pot.support_radius
    if r_max is None:
        r_max = 10.0 * a

    r0 = sol.t[0]
    inner = np.linspace(0.0, r0, 17)[:-1]
    core = np.linspace(r0, a, n_grid)
    grid_in = np.concatenate([inner, core])

    v0 = lambda_c * float(pot.profile(np.asarray(0.5 * r0)))
    u_in = np.empty_like(grid_in)
    du_in = np.empty_like(grid_in)
    series = grid_in < r0
    u_in[series] = 1.0 + v0 * grid_in[series] ** 2 / 8.0 + v0**2 * grid_in[series] ** 4 / 192.0
    du_in[series] = v0 * grid_in[series] / 4.0 + v0**2 * grid_in[series] ** 3 / 48.0
    dense = sol.sol(grid_in[~series])
    u_in[~series] = dense[0]
    du_in[~series] = dense[1]

    scale = (1.0 / a**2) / u_in[-1]
    u_in *= scale
    du_in *= scale

    slope_gap = abs(du_in[-1] - (-2.0 / a**3)) / (2.0 / a**3)
    if slope_gap > 1e-8:
        raise ConsistencyError(
            f"C1 matching at the support edge fails: relative slope gap {slope_gap:.3g}"
        )

    tail = np.geomspace(a * (1.0 + 1e-12), r_max, 65)
    grid = np.concatenate([grid_in, tail])
    u = np.concatenate([u_in, 1.0 / tail**2])
    du = np.concatenate([du_in, -2.0 / tail**3])

    prof = ResonanceProfile(
        grid=grid,
        values=u,
        derivative=du,
        tail_constant=1.0,
        matching_radius=a,
    )
    if np.any(u <= 0.0):
        raise ConsistencyError("resonance profile is not positive")
    return prof


def inner_product_v_phi(profile: ResonanceProfile, pot: RadialPotential,
                        lam: float, tol=1e-11) -> float:
    """<V, phi0> over R^4 with radial measure 2 pi^2 r^3 dr."""
    a = pot.support_radius

    def f(r):
        return pot.value(r, lam) * profile.value(r)

    res = radial_integrate(f, [(0.0, a)], tol=tol)
    return res.value


def c0_identity_residual(profile: ResonanceProfile, pot: RadialPotential,
                         lam: float) -> float:
    """c0 + <V, phi0> / (4 pi^2); vanishes at criticality."""
    return profile.tail_constant + inner_product_v_phi(profile, pot, lam) / FOUR_PI_SQ


def gradient_norm_sq(profile: ResonanceProfile, pot: RadialPotential,
                     tol=1e-11) -> float:
    """|grad phi0|^2 over R^4: interior quadrature plus the exact tail."""
    a = pot.support_radius

    def f(r):
        return profile.slope(r) ** 2

    interior = radial_integrate(f, [(0.0, a)], tol=tol).value
    tail = FOUR_PI_SQ / a**2  # 2 pi^2 * int_a^inf 4 r^-6 r^3 dr
    return interior + tail


def potential_term(profile: ResonanceProfile, pot: RadialPotential,
                   lam: float, tol=1e-11) -> float:
    """int V |phi0|^2 over R^4."""
    a = pot.support_radius

    def f(r):
        return pot.value(r, lam) * profile.value(r) ** 2

    return radial_integrate(f, [(0.0, a)], tol=tol).value
