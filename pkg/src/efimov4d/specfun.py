"""Modified Bessel functions of the second kind K0..K3 and their small-argument identities.

Evaluation strategy: ascending series below z = 2, exponentially scaled
continued fraction (Temme/Thompson-Barnett CF2) above.  Orders 2 and 3 come
from the upward recurrence, which is stable for K.  All evaluators accept
scalars or numpy arrays.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

# Euler-Mascheroni constant, 20 significant digits.  Enters the closed-form
# energy constants through log(2) - gamma combinations.
EULER_GAMMA = 0.57721566490153286061

ORDERS = (0, 1, 2, 3)

_SERIES_CUTOFF = 2.0
_SERIES_TERMS = 34
_CF2_MAXIT = 120
_UNDERFLOW_Z = 740.0

COMBO_IDS = (
    "K0K2_minus_K1sq",
    "K1K3_minus_K2sq",
    "one_minus_zK1_times_K2",
    "two_minus_z2K2_times_K2",
)


class UnderflowWarning(RuntimeWarning):
    """K_nu(z) underflowed to zero for very large z."""


def bessel_order(nu):
    """Validate a Bessel order; only 0..3 are provided."""
    if nu not in ORDERS:
        raise ValueError(f"Bessel order must be one of {ORDERS}, got {nu!r}")
    return int(nu)


def _k0_k1_series(z):
    """K0 and K1 from the ascending series, accurate for 0 < z <= 2."""
    half = 0.5 * z
    q = half * half  # (z/2)^2
    log_half = np.log(half)

    i0 = np.ones_like(z)
    i1 = np.full_like(z, 0.5)
    s0 = np.full_like(z, -EULER_GAMMA)          # psi(1) term
    s1 = np.full_like(z, 0.5 * (1.0 - 2.0 * EULER_GAMMA))

    term_i0 = np.ones_like(z)
    term_i1 = np.full_like(z, 0.5)
    psi_m1 = -EULER_GAMMA   # psi(m+1)
    psi_m2 = 1.0 - EULER_GAMMA  # psi(m+2)
    for m in range(1, _SERIES_TERMS):
        term_i0 = term_i0 * q / (m * m)
        term_i1 = term_i1 * q / (m * (m + 1))
        psi_m1 += 1.0 / m
        psi_m2 += 1.0 / (m + 1)
        i0 += term_i0
        i1 += term_i1
        s0 += term_i0 * psi_m1
        s1 += term_i1 * (psi_m1 + psi_m2)

    i1 = i1 * z
    k0 = -log_half * i0 + s0
    k1 = 1.0 / z + log_half * i1 - half * s1
    return k0, k1


def _k0_k1_cf2(z):
    """Unscaled K0 and K1 via the CF2 continued fraction, for z >= 2."""
    b = 2.0 * (1.0 + z)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(z)
    q2 = np.ones_like(z)
    a1 = 0.25
    q = np.full_like(z, a1)
    c = np.full_like(z, a1)
    a = np.full_like(z, -a1)
    s = 1.0 + q * delh
    for i in range(2, _CF2_MAXIT):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1 = q2
        q2 = qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) <= 1e-17 * np.abs(s)):
            break
    h = a1 * h
    pref = np.sqrt(np.pi / (2.0 * z))
    with np.errstate(under="ignore"):
        scale = np.exp(-z)
    k0 = pref * scale / s
    k1 = k0 * (z + 0.5 - h) / z
    return k0, k1


def _k0_k1(z):
    z = np.asarray(z, dtype=float)
    k0 = np.empty_like(z)
    k1 = np.empty_like(z)
    lo = z <= _SERIES_CUTOFF
    if np.any(lo):
        k0[lo], k1[lo] = _k0_k1_series(z[lo])
    hi = ~lo
    if np.any(hi):
        k0[hi], k1[hi] = _k0_k1_cf2(z[hi])
    return k0, k1


def bessel_k(nu, z):
    """K_nu(z) for nu in {0,1,2,3} and z > 0.

    Values that underflow (z beyond ~740) come back as 0.0 with an
    UnderflowWarning.  Accepts arrays.
    """
    nu = bessel_order(nu)
    z_arr = np.asarray(z, dtype=float)
    scalar = z_arr.ndim == 0
    z_arr = np.atleast_1d(z_arr)
    if np.any(z_arr <= 0.0) or np.any(~np.isfinite(z_arr)):
        raise ValueError("bessel_k requires z > 0")

    k0, k1 = _k0_k1(z_arr)
    if nu == 0:
        out = k0
    elif nu == 1:
        out = k1
    elif nu == 2:
        out = k0 + 2.0 * k1 / z_arr
    else:
        k2 = k0 + 2.0 * k1 / z_arr
        out = k1 + 4.0 * k2 / z_arr

    under = (z_arr > _UNDERFLOW_Z) & (out == 0.0)
    if np.any(under):
        warnings.warn(
            "bessel_k underflowed to 0 for z > %g" % _UNDERFLOW_Z,
            UnderflowWarning,
            stacklevel=2,
        )
    if scalar:
        return float(out[0])
    return out


def small_z_reference(nu, z, order=None):
    """Truncated near-zero expansion of K_nu.

    order counts expansion terms: 1 keeps the leading singular block, 2 adds
    the first correction.  The defaults are the full displayed expansions
    (order 1 for nu=0, order 2 otherwise); anything else is unsupported.
    """
    nu = bessel_order(nu)
    z = np.asarray(z, dtype=float)
    if np.any(z <= 0.0):
        raise ValueError("small_z_reference requires z > 0")
    full = {0: 1, 1: 2, 2: 2, 3: 2}[nu]
    if order is None:
        order = full
    if order not in (1, 2) or order > full:
        raise NotImplementedError(f"unsupported (nu, order) pair: ({nu}, {order})")

    if nu == 0:
        out = -np.log(0.5 * z) - EULER_GAMMA
    elif nu == 1:
        out = 1.0 / z
        if order == 2:
            out = out + 0.5 * z * (np.log(0.5 * z) + EULER_GAMMA - 0.5)
    elif nu == 2:
        out = 2.0 / z**2
        if order == 2:
            out = out - 0.5
    else:
        out = 8.0 / z**3
        if order == 2:
            out = out - 1.0 / z
    if np.ndim(z) == 0:
        return float(out)
    return out


def expansion_remainder(nu, z):
    """K_nu(z) minus its full truncated expansion."""
    return bessel_k(nu, z) - small_z_reference(nu, z)


def remainder_bound(nu, z, const=5.0):
    """Remainder envelope per order: const * z^2 |log z| (z |log z| for nu=3)."""
    nu = bessel_order(nu)
    z = np.asarray(z, dtype=float)
    mag = np.abs(np.log(z))
    if nu == 3:
        return const * z * mag
    return const * z * z * mag


def bessel_combo(combo_id, z):
    """Named small-z combinations of K0..K3 used in the closed-form integrals."""
    if combo_id not in COMBO_IDS:
        raise ValueError(f"unknown combo id {combo_id!r}; pick one of {COMBO_IDS}")
    z = np.asarray(z, dtype=float)
    k0 = bessel_k(0, z)
    k1 = bessel_k(1, z)
    k2 = bessel_k(2, z)
    if combo_id == "K0K2_minus_K1sq":
        out = 0.5 * z * z * (k0 * k2 - k1 * k1)
    elif combo_id == "K1K3_minus_K2sq":
        k3 = bessel_k(3, z)
        out = 0.5 * z * z * (k1 * k3 - k2 * k2)
    elif combo_id == "one_minus_zK1_times_K2":
        out = (1.0 - z * k1) * k2
    else:
        out = (2.0 - z * z * k2) * k2
    if np.ndim(z) == 0:
        return float(out)
    return out


def k_square_antiderivative(nu, z):
    """(1/2) z^2 (K_nu^2 - K_{nu-1} K_{nu+1}); its z-derivative is z K_nu(z)^2.

    Only nu in {1, 2}: the neighbours K_{nu-1}, K_{nu+1} must both be provided
    orders.
    """
    if nu not in (1, 2):
        raise ValueError("k_square_antiderivative needs nu in {1, 2}")
    z = np.asarray(z, dtype=float)
    km = bessel_k(nu - 1, z)
    kc = bessel_k(nu, z)
    kp = bessel_k(nu + 1, z)
    out = 0.5 * z * z * (kc * kc - km * kp)
    if np.ndim(z) == 0:
        return float(out)
    return out
