"""Double-well trial state: Green function, cutoffs, regions, and gradients.

The separation vector is fixed along the fourth coordinate axis, l = L e4, so
every field here is axisymmetric: a point x in R^4 reduces to the axial
coordinate w = x4 and the transverse radius s = |(x1, x2, x3)|.  The shift
parameter of the kinetic-control form lives in the (x3, x4) plane and is
realized as r = (0, L).

The trial state glues the resonance profile inside each rho-ball to a sum of
shifted Green functions outside the 2 rho-balls, interpolating linearly on the
annuli.  Its gradient there decomposes into the five h_j fields; the shift
derivative leaves the remainder g.  Near-cancelling small-argument
combinations (1 - z K1, 2 - z^2 K2) are always evaluated in subtracted form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .criticality import ResonanceProfile
from .specfun import bessel_k


class RegionTag(enum.IntEnum):
    BALL_PLUS = 0
    BALL_MINUS = 1
    ANNULUS_PLUS = 2
    ANNULUS_MINUS = 3
    EXTERIOR = 4


@dataclass(frozen=True)
class TrialParams:
    """Separation L with the derived scales rho = L^theta and mu = mu0 / L."""

    L: float
    mu0: float
    delta: float = 1.0
    rho0: float = 1.0
    l_min: float | None = None

    def __post_init__(self):
        if min(self.L, self.mu0, self.delta, self.rho0) <= 0.0:
            raise ValueError("all trial parameters must be positive")
        l_min = self.l_min if self.l_min is not None else 10.0 * max(self.rho0, 1.0)
        object.__setattr__(self, "l_min", l_min)
        if self.L < l_min:
            raise ValueError(f"L = {self.L} below the separation threshold {l_min}")
        if 2.0 * self.rho >= 0.5 * self.L:
            raise ValueError(
                f"wells overlap: 2 rho = {2 * self.rho:.4g} must stay below "
                f"L/2 = {self.L / 2:.4g} (raise L or delta)"
            )
        if self.rho <= self.rho0:
            raise ValueError("rho must exceed the resonance support radius")

    @property
    def theta(self) -> float:
        return 4.0 / (4.0 + self.delta)

    @property
    def rho(self) -> float:
        return self.L**self.theta

    @property
    def mu(self) -> float:
        return self.mu0 / self.L


@dataclass(frozen=True)
class Point4:
    """Point in R^4 with the axial/transverse split along l = L e4."""

    coords: tuple

    def __init__(self, coords):
        arr = np.asarray(coords, dtype=float)
        if arr.shape != (4,):
            raise ValueError("Point4 needs exactly four coordinates")
        object.__setattr__(self, "coords", tuple(arr))

    @property
    def array(self):
        return np.asarray(self.coords)

    @property
    def w(self) -> float:
        return self.coords[3]

    @property
    def s(self) -> float:
        return math.hypot(self.coords[0], math.hypot(self.coords[1], self.coords[2]))


def _as_array4(x):
    if isinstance(x, Point4):
        return x.array
    arr = np.asarray(x, dtype=float)
    if arr.shape != (4,):
        raise ValueError("expected a Point4 or a length-4 coordinate array")
    return arr


def green_g(mu, r):
    """G_mu(r) = mu K1(mu r) / r, the (-Delta + mu^2) kernel up to 4 pi^2."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("green_g is singular at r = 0")
    out = mu * bessel_k(1, mu * r) / r
    if out.ndim == 0:
        return float(out)
    return out


def green_g_radial_slope(mu, r):
    """d/dr G_mu(r) = -mu^2 K2(mu r) / r."""
    r = np.asarray(r, dtype=float)
    out = -(mu**2) * bessel_k(2, mu * r) / r
    if out.ndim == 0:
        return float(out)
    return out


def green_g_grad(mu, x, center):
    """grad of G_mu(|x - center|): -mu^2 K2(mu p)/p * (x - center)/p."""
    y = _as_array4(x) - _as_array4(center)
    p = float(np.linalg.norm(y))
    if p == 0.0:
        raise ValueError("green_g_grad is singular at the center")
    return green_g_radial_slope(mu, p) * y / p


def cutoff_u(rho, r):
    """chi(r / rho): 1 inside rho, linear on (rho, 2 rho], 0 beyond."""
    r = np.asarray(r, dtype=float)
    out = np.clip(2.0 - r / rho, 0.0, 1.0)
    if out.ndim == 0:
        return float(out)
    return out


def cutoff_v(rho, r):
    return 1.0 - cutoff_u(rho, r)


def distances_ws(p: TrialParams, w, s):
    """(d_plus, d_minus): distances to the wells at +-L/2 e4."""
    w = np.asarray(w, dtype=float)
    s = np.asarray(s, dtype=float)
    return np.hypot(w - 0.5 * p.L, s), np.hypot(w + 0.5 * p.L, s)


def region_tag_ws(p: TrialParams, w, s):
    """RegionTag values on the (w, s) half-plane (vectorized)."""
    scalar = np.ndim(w) == 0 and np.ndim(s) == 0
    dp, dm = distances_ws(p, np.atleast_1d(w), np.atleast_1d(s))
    out = np.full(np.broadcast(dp, dm).shape, int(RegionTag.EXTERIOR))
    out[dm <= 2.0 * p.rho] = int(RegionTag.ANNULUS_MINUS)
    out[dp <= 2.0 * p.rho] = int(RegionTag.ANNULUS_PLUS)
    out[dm <= p.rho] = int(RegionTag.BALL_MINUS)
    out[dp <= p.rho] = int(RegionTag.BALL_PLUS)
    if scalar:
        return RegionTag(int(out[0]))
    return out


def classify(p: TrialParams, x) -> RegionTag:
    x = _as_array4(x)
    return region_tag_ws(p, x[3], math.hypot(x[0], math.hypot(x[1], x[2])))


def _one_minus_zk1(z):
    return 1.0 - z * bessel_k(1, z)


def f_from_distances(p: TrialParams, res: ResonanceProfile, d_near, d_far):
    """Interpolation remainder u_rho(d_near) (phi0 - G_near - G_far).

    d_near is the distance to the well whose annulus contains the point; the
    formula returns 0 outside [rho, 2 rho] in d_near.  phi0 - G_near is
    evaluated in the subtracted form (c0 - z K1(z)) / d^2, exact because the
    annuli lie outside the resonance support.
    """
    d_near = np.asarray(d_near, dtype=float)
    d_far = np.asarray(d_far, dtype=float)
    u = cutoff_u(p.rho, d_near)
    z = p.mu * d_near
    near_gap = (res.tail_constant - z * bessel_k(1, z)) / d_near**2
    far = p.mu * bessel_k(1, p.mu * d_far) / d_far
    out = u * (near_gap - far)
    return out


def f_ws(p: TrialParams, res: ResonanceProfile, w, s):
    """f on the (w, s) half-plane: supported on the two annuli."""
    dp, dm = distances_ws(p, w, s)
    dp, dm = np.atleast_1d(dp), np.atleast_1d(dm)
    out = np.zeros_like(dp)
    on_plus = (dp >= p.rho) & (dp <= 2.0 * p.rho)
    on_minus = (dm >= p.rho) & (dm <= 2.0 * p.rho)
    if np.any(on_plus):
        out[on_plus] = f_from_distances(p, res, dp[on_plus], dm[on_plus])
    if np.any(on_minus):
        out[on_minus] = f_from_distances(p, res, dm[on_minus], dp[on_minus])
    if np.ndim(w) == 0:
        return float(out[0])
    return out


def gamma_ws(p: TrialParams, w, s):
    """Far field Gamma = G_mu(x - l/2) + G_mu(x + l/2)."""
    dp, dm = distances_ws(p, w, s)
    out = green_g(p.mu, dp) + green_g(p.mu, dm)
    if np.ndim(w) == 0:
        return float(out)
    return out


def phi_ws(p: TrialParams, res: ResonanceProfile, w, s):
    """Trial state on the (w, s) half-plane, by region (vectorized)."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    dp, dm = distances_ws(p, w, s)
    out = np.empty_like(dp)

    ball_p = dp <= p.rho
    ball_m = dm <= p.rho
    ann_p = (~ball_p) & (dp <= 2.0 * p.rho)
    ann_m = (~ball_m) & (dm <= 2.0 * p.rho)
    ext = ~(ball_p | ball_m | ann_p | ann_m)

    if np.any(ball_p):
        out[ball_p] = res.value(dp[ball_p])
    if np.any(ball_m):
        out[ball_m] = res.value(dm[ball_m])
    if np.any(ann_p):
        gam = green_g(p.mu, dp[ann_p]) + green_g(p.mu, dm[ann_p])
        out[ann_p] = gam + f_from_distances(p, res, dp[ann_p], dm[ann_p])
    if np.any(ann_m):
        gam = green_g(p.mu, dp[ann_m]) + green_g(p.mu, dm[ann_m])
        out[ann_m] = gam + f_from_distances(p, res, dm[ann_m], dp[ann_m])
    if np.any(ext):
        out[ext] = green_g(p.mu, dp[ext]) + green_g(p.mu, dm[ext])
    if out.shape == (1,):
        return float(out[0])
    return out


def assemble_phi(p: TrialParams, res: ResonanceProfile, x) -> float:
    x = _as_array4(x)
    return phi_ws(p, res, x[3], math.hypot(x[0], math.hypot(x[1], x[2])))


def interp_f(p: TrialParams, res: ResonanceProfile, x) -> float:
    x = _as_array4(x)
    return f_ws(p, res, x[3], math.hypot(x[0], math.hypot(x[1], x[2])))


def _annulus_h_coeffs(p: TrialParams, res: ResonanceProfile, d_near, d_far):
    """Coefficients of the h_j fields on hat-y (toward near well) and hat-p.

    Returns (h1 + h2 + h3 coefficient on hat-y, h4 coefficient on hat-p); h5
    vanishes for the compactly supported radial instance.
    """
    z = p.mu * d_near
    zf = p.mu * d_far
    u = cutoff_u(p.rho, d_near)
    h1 = -(res.tail_constant - z * bessel_k(1, z)) / (p.rho * d_near**2)
    h2 = p.mu * bessel_k(1, zf) / (d_far * p.rho)
    h3 = -u * (2.0 * res.tail_constant - z * z * bessel_k(2, z)) / d_near**3
    h4 = u * p.mu**2 * bessel_k(2, zf) / d_far
    return h1 + h2 + h3, h4


def grad_coeffs_ws(p: TrialParams, res: ResonanceProfile, w, s):
    """Radial coefficients (c_plus, c_minus) of the trial-state gradient:

        grad phi = c_plus (x - l/2)/d_plus + c_minus (x + l/2)/d_minus.

    Raises on seam points and well centers, where the gradient is undefined.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    dp, dm = distances_ws(p, w, s)
    if np.any(dp == 0.0) or np.any(dm == 0.0):
        raise ValueError("gradient is singular at the well centers")
    cp = np.zeros_like(dp)
    cm = np.zeros_like(dm)

    ball_p = dp < p.rho
    ball_m = dm < p.rho
    ann_p = (dp > p.rho) & (dp < 2.0 * p.rho)
    ann_m = (dm > p.rho) & (dm < 2.0 * p.rho)
    ext = (dp > 2.0 * p.rho) & (dm > 2.0 * p.rho)
    if not np.all(ball_p | ball_m | ann_p | ann_m | ext):
        raise ValueError("gradient evaluated on a cutoff seam")

    if np.any(ball_p):
        cp[ball_p] = res.slope(dp[ball_p])
    if np.any(ball_m):
        cm[ball_m] = res.slope(dm[ball_m])
    if np.any(ann_p):
        cy, cfar = _annulus_h_coeffs(p, res, dp[ann_p], dm[ann_p])
        cp[ann_p] = green_g_radial_slope(p.mu, dp[ann_p]) + cy
        cm[ann_p] = green_g_radial_slope(p.mu, dm[ann_p]) + cfar
    if np.any(ann_m):
        cy, cfar = _annulus_h_coeffs(p, res, dm[ann_m], dp[ann_m])
        cm[ann_m] = green_g_radial_slope(p.mu, dm[ann_m]) + cy
        cp[ann_m] = green_g_radial_slope(p.mu, dp[ann_m]) + cfar
    if np.any(ext):
        cp[ext] = green_g_radial_slope(p.mu, dp[ext])
        cm[ext] = green_g_radial_slope(p.mu, dm[ext])
    return cp, cm, dp, dm


def grad_phi_sq_ws(p: TrialParams, res: ResonanceProfile, w, s):
    """|grad phi|^2 on the half-plane, using the two-center dot product."""
    cp, cm, dp, dm = grad_coeffs_ws(p, res, w, s)
    w = np.atleast_1d(np.asarray(w, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    # hat-y . hat-p = (d_plus^2 + L (w - L/2)) / (d_plus d_minus)
    cos_psi = (dp * dp + p.L * (w - 0.5 * p.L)) / (dp * dm)
    out = cp * cp + cm * cm + 2.0 * cp * cm * cos_psi
    if out.shape == (1,):
        return float(out[0])
    return out


def grad_phi(p: TrialParams, res: ResonanceProfile, x):
    """Gradient 4-vector of the trial state at a point."""
    xa = _as_array4(x)
    w, s = xa[3], math.hypot(xa[0], math.hypot(xa[1], xa[2]))
    cp, cm, dp, dm = grad_coeffs_ws(p, res, w, s)
    half_l = np.array([0.0, 0.0, 0.0, 0.5 * p.L])
    return cp[0] * (xa - half_l) / dp[0] + cm[0] * (xa + half_l) / dm[0]


def h_components(p: TrialParams, res: ResonanceProfile, x):
    """The five h_j gradient fields at an annulus point, as a (5, 4) array.

    h5 is retained but identically zero for compactly supported radial
    potentials.  Outside the annuli all rows vanish.
    """
    xa = _as_array4(x)
    w, s = xa[3], math.hypot(xa[0], math.hypot(xa[1], xa[2]))
    dp, dm = (float(v) for v in distances_ws(p, w, s))
    out = np.zeros((5, 4))
    on_plus = p.rho <= dp <= 2.0 * p.rho
    on_minus = p.rho <= dm <= 2.0 * p.rho
    if not (on_plus or on_minus):
        return out
    half_l = np.array([0.0, 0.0, 0.0, 0.5 * p.L])
    if on_plus:
        d_near, d_far = dp, dm
        y_hat = (xa - half_l) / dp
        p_hat = (xa + half_l) / dm
    else:
        d_near, d_far = dm, dp
        y_hat = (xa + half_l) / dm
        p_hat = (xa - half_l) / dp
    z = p.mu * d_near
    zf = p.mu * d_far
    u = cutoff_u(p.rho, d_near)
    out[0] = -(res.tail_constant - z * bessel_k(1, z)) / (p.rho * d_near**2) * y_hat
    out[1] = p.mu * bessel_k(1, zf) / (d_far * p.rho) * y_hat
    out[2] = -u * (2.0 * res.tail_constant - z * z * bessel_k(2, z)) / d_near**3 * y_hat
    out[3] = u * p.mu**2 * bessel_k(2, zf) / d_far * p_hat
    return out


def g_func(p: TrialParams, res: ResonanceProfile, x):
    """Shift-derivative remainder g on the annuli, as its (x3, x4) components.

    On the plus annulus g collects the mu-derivative of both Green functions,
    the rho-scaling of the cutoff, and the far-well gradient h4; on the minus
    annulus g(x) = g(-x) by reflection symmetry.  Zero off the annuli.
    """
    xa = _as_array4(x)
    w, s = xa[3], math.hypot(xa[0], math.hypot(xa[1], xa[2]))
    dp, dm = (float(v) for v in distances_ws(p, w, s))
    if p.rho <= dm <= 2.0 * p.rho:
        mirrored = g_func(p, res, -xa)
        return mirrored
    if not p.rho <= dp <= 2.0 * p.rho:
        return np.zeros(2)
    u = cutoff_u(p.rho, dp)
    z = p.mu * dp
    zf = p.mu * dm
    k0_sum = bessel_k(0, z) + bessel_k(0, zf)
    axial = -p.mu0 * p.mu / p.L**2 * u * k0_sum
    near_gap = (res.tail_constant - z * bessel_k(1, z)) / dp**2
    far = p.mu * bessel_k(1, zf) / dm
    axial += p.theta * dp / p.L ** (1.0 + p.theta) * (near_gap - far)
    h4 = u * p.mu**2 * bessel_k(2, zf) / dm
    half_l = np.array([0.0, 0.0, 0.0, 0.5 * p.L])
    p_hat = (xa + half_l) / dm
    return np.array([h4 * p_hat[2], axial + h4 * p_hat[3]])
