"""Axisymmetric 4D quadrature reduced to the (w, s) half-plane.

For a field with rotational symmetry about the separation axis,

    int_{R^4} F dx = 4 pi  int int  F(w, s) s^2  dw ds,

with w the axial coordinate and s the transverse radius.  The half-plane is
tiled into blocks (rectangles, polar patches around well centers, and
circle-to-square transition patches) whose edges coincide with every declared
seam; a global heap then refines the worst cells until the error estimate
meets the tolerance.  One-center radial integrands take a 1D fast path with
weight 2 pi^2 r^3.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

FOUR_PI = 4.0 * math.pi
TWO_PI_SQ = 2.0 * math.pi**2

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}

DEFAULT_TOL = 1e-8
DEFAULT_BUDGET = 2**20


class BudgetExceededError(RuntimeError):
    """Cell budget ran out; carries the best estimate in .result."""

    def __init__(self, result):
        super().__init__(
            f"quadrature cell budget exceeded (value={result.value:.6g}, "
            f"error_estimate={result.error_estimate:.2g})"
        )
        self.result = result


@dataclass(frozen=True)
class QuadResult:
    value: float
    error_estimate: float
    cells_used: int


@dataclass
class AxisymField:
    """Evaluator F(w, s) (vectorized) for a field symmetric about the axis."""

    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    decay_scale: float = 1.0
    known_seams: tuple = ()

    def __call__(self, w, s):
        return self.evaluator(w, s)


def _gl_nodes(n):
    if n not in _GL_CACHE:
        x, wts = np.polynomial.legendre.leggauss(n)
        # rescale to [0, 1]
        _GL_CACHE[n] = (0.5 * (x + 1.0), 0.5 * wts)
    return _GL_CACHE[n]


# ---------------------------------------------------------------------------
# Blocks: smooth maps from the unit square onto half-plane patches.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RectBlock:
    w0: float
    w1: float
    s0: float
    s1: float

    def sample(self, u, v):
        w = self.w0 + u * (self.w1 - self.w0)
        s = self.s0 + v * (self.s1 - self.s0)
        jac = (self.w1 - self.w0) * (self.s1 - self.s0)
        return w, s, jac * np.ones_like(w)


@dataclass(frozen=True)
class PolarBlock:
    """Polar patch around (center_w, 0): t in [t0, t1], alpha in [a0, a1]."""

    center_w: float
    t0: float
    t1: float
    a0: float
    a1: float

    def sample(self, u, v):
        t = self.t0 + u * (self.t1 - self.t0)
        alpha = self.a0 + v * (self.a1 - self.a0)
        w = self.center_w + t * np.cos(alpha)
        s = t * np.sin(alpha)
        jac = t * (self.t1 - self.t0) * (self.a1 - self.a0)
        return w, s, jac


@dataclass(frozen=True)
class PlaneCappedPolarBlock:
    """Polar patch around (center_w, 0) pointing toward the mid-plane w = 0.

    beta is the angle from the toward-plane direction; the outer radius
    t1(beta) = min(plane_dist / cos(beta), s_cap / sin(beta)) ends exactly on
    the mid-plane or on the s = s_cap truncation line.  Panels must not cross
    the cap-switch angle atan2(s_cap, plane_dist), where t1 has a kink.
    """

    center_w: float
    t0: float
    plane_dist: float
    s_cap: float
    b0: float
    b1: float

    def _outer(self, beta):
        with np.errstate(divide="ignore"):
            radial = np.where(
                np.cos(beta) > 0.0, self.plane_dist / np.cos(beta), np.inf
            )
            vertical = np.where(np.sin(beta) > 0.0, self.s_cap / np.sin(beta), np.inf)
        return np.minimum(radial, vertical)

    def sample(self, u, v):
        beta = self.b0 + v * (self.b1 - self.b0)
        touter = self._outer(beta)
        t = self.t0 + u * (touter - self.t0)
        toward = -1.0 if self.center_w > 0.0 else 1.0
        w = self.center_w + toward * t * np.cos(beta)
        s = t * np.sin(beta)
        jac = t * (touter - self.t0) * (self.b1 - self.b0)
        return w, s, jac


# ---------------------------------------------------------------------------
# Adaptive engine.
# ---------------------------------------------------------------------------


def _unit_grids():
    x7, w7 = _gl_nodes(7)
    x15, w15 = _gl_nodes(15)
    u7, v7 = np.meshgrid(x7, x7, indexing="ij")
    u15, v15 = np.meshgrid(x15, x15, indexing="ij")
    u = np.concatenate([u7.ravel(), u15.ravel()])
    v = np.concatenate([v7.ravel(), v15.ravel()])
    wts = np.concatenate([np.outer(w7, w7).ravel(), np.outer(w15, w15).ravel()])
    return u, v, wts


_UNIT_U, _UNIT_V, _UNIT_W = None, None, None


def _cell_pair(func, block, u0, u1, v0, v1):
    """(coarse 7x7, fine 15x15) estimates from a single batched field call."""
    global _UNIT_U, _UNIT_V, _UNIT_W
    if _UNIT_U is None:
        _UNIT_U, _UNIT_V, _UNIT_W = _unit_grids()
    u = u0 + (u1 - u0) * _UNIT_U
    v = v0 + (v1 - v0) * _UNIT_V
    w, s, jac = block.sample(u, v)
    vals = func(w, s) * jac * (FOUR_PI * s * s) * _UNIT_W
    area = (u1 - u0) * (v1 - v0)
    coarse = float(np.sum(vals[:49])) * area
    fine = float(np.sum(vals[49:])) * area
    return coarse, fine


def integrate_blocks(func, blocks, tol=DEFAULT_TOL, abs_tol=0.0,
                     budget=DEFAULT_BUDGET, raise_on_budget=True):
    """Adaptively integrate func(w, s) * 4 pi s^2 over the given blocks.

    tol is relative to the accumulated value; abs_tol is an absolute floor
    (useful when the true integral may vanish).
    """
    if callable(func) and not isinstance(func, AxisymField):
        f = func
    else:
        f = func.evaluator

    heap = []
    counter = 0
    cells = {}
    running_val = 0.0
    running_err = 0.0

    def push(block, u0, u1, v0, v1):
        nonlocal counter, running_val, running_err
        coarse, fine = _cell_pair(f, block, u0, u1, v0, v1)
        err = abs(fine - coarse)
        cells[counter] = (fine, err, block, u0, u1, v0, v1)
        heapq.heappush(heap, (-err, counter))
        running_val += fine
        running_err += err
        counter += 1

    for blk in blocks:
        push(blk, 0.0, 1.0, 0.0, 1.0)

    def finish():
        # exact, order-independent reduction over the surviving leaves
        value = math.fsum(c[0] for c in cells.values())
        err = math.fsum(c[1] for c in cells.values())
        return QuadResult(value, err, counter)

    while True:
        if running_err <= max(tol * abs(running_val), abs_tol):
            return finish()
        if counter >= budget:
            result = finish()
            if raise_on_budget:
                raise BudgetExceededError(result)
            return result
        _, idx = heapq.heappop(heap)
        fine, err, blk, u0, u1, v0, v1 = cells.pop(idx)
        running_val -= fine
        running_err -= err
        um, vm = 0.5 * (u0 + u1), 0.5 * (v0 + v1)
        push(blk, u0, um, v0, vm)
        push(blk, um, u1, v0, vm)
        push(blk, u0, um, vm, v1)
        push(blk, um, u1, vm, v1)


# ---------------------------------------------------------------------------
# Block planners.
# ---------------------------------------------------------------------------

_ALPHA_PANELS = (0.0, 0.25 * math.pi, 0.5 * math.pi, 0.75 * math.pi, math.pi)


def _radial_spans(t0, t1, grade_floor_levels=12):
    """Geometric spans of [t0, t1]; t0 = 0 seeds dyadic levels toward zero."""
    spans = []
    if t0 == 0.0:
        lo = t1 / 2.0**grade_floor_levels
        spans.append((0.0, lo))
        t0 = lo
    while t1 / t0 > 4.0:
        spans.append((t0, 2.0 * t0))
        t0 *= 2.0
    spans.append((t0, t1))
    return spans


def polar_blocks(center_w, t0, t1, panels=_ALPHA_PANELS, graded=True):
    spans = _radial_spans(t0, t1) if graded else [(t0, t1)]
    return [
        PolarBlock(center_w, a, b, panels[i], panels[i + 1])
        for (a, b) in spans
        for i in range(len(panels) - 1)
    ]


def ball_blocks(center_w, radius):
    return polar_blocks(center_w, 0.0, radius)


def annulus_blocks(center_w, r0, r1):
    return polar_blocks(center_w, r0, r1, graded=(r1 / r0 > 4.0))


def _mid_wedge_blocks(center_w, hole, s_cap):
    """Plane-capped wedges covering {0 <= |w| <= plane_dist, s <= s_cap} minus
    the hole, seen from the well at (center_w, 0)."""
    plane_dist = abs(center_w)
    switch = math.atan2(s_cap, plane_dist)
    breaks = sorted({0.0, 0.25 * math.pi, switch, 0.5 * math.pi})
    inner = min(plane_dist, s_cap)
    spans = _radial_spans(hole, inner) if inner / max(hole, 1e-300) > 4 else [
        (hole, inner)
    ]
    blocks = []
    for k, (t0, t1) in enumerate(spans):
        last = k == len(spans) - 1
        for b0, b1 in zip(breaks[:-1], breaks[1:]):
            if last:
                blocks.append(
                    PlaneCappedPolarBlock(center_w, t0, plane_dist, s_cap, b0, b1)
                )
            else:
                # inner graded rings sit inside both caps; plain polar
                if center_w > 0:
                    a0, a1 = math.pi - b1, math.pi - b0
                else:
                    a0, a1 = b0, b1
                blocks.append(PolarBlock(center_w, t0, t1, a0, a1))
    return blocks


def exterior_blocks(separation, hole_radius, truncation_radius):
    """Half-plane minus the two holes of hole_radius around (+-D/2, 0).

    Outward wedges run in polar coordinates to the truncation radius with
    geometric radial grading; the middle slab is covered by plane-capped
    wedges from both centers up to s = D/2 plus a stack of rectangles above.
    hole_radius = 0 grades into the centers (integrable singularities).
    """
    d = separation
    if hole_radius >= 0.5 * d:
        raise ValueError("hole radius must stay below separation/2")
    if truncation_radius <= d:
        raise ValueError("truncation must extend beyond the wells")
    blocks = []
    blocks += polar_blocks(
        0.5 * d,
        hole_radius,
        truncation_radius,
        panels=(0.0, 0.25 * math.pi, 0.5 * math.pi),
    )
    blocks += polar_blocks(
        -0.5 * d,
        hole_radius,
        truncation_radius,
        panels=(0.5 * math.pi, 0.75 * math.pi, math.pi),
    )
    s_mid = 0.5 * d
    blocks += _mid_wedge_blocks(0.5 * d, hole_radius, s_mid)
    blocks += _mid_wedge_blocks(-0.5 * d, hole_radius, s_mid)
    lo = s_mid
    while lo < truncation_radius:
        hi = min(2.0 * lo, truncation_radius)
        blocks.append(RectBlock(-0.5 * d, 0.5 * d, lo, hi))
        lo = hi
    return blocks


def full_blocks(separation, truncation_radius):
    return exterior_blocks(separation, 0.0, truncation_radius)


def axisym_integrate(field, blocks, tol=DEFAULT_TOL, abs_tol=0.0,
                     budget=DEFAULT_BUDGET):
    """Integrate an axisymmetric field over a planned block list."""
    return integrate_blocks(field, blocks, tol=tol, abs_tol=abs_tol, budget=budget)


# ---------------------------------------------------------------------------
# 1D radial fast path.
# ---------------------------------------------------------------------------


def _radial_pair(f, a, b, weight_power):
    x7, w7 = _gl_nodes(7)
    x15, w15 = _gl_nodes(15)
    r = np.concatenate([a + (b - a) * x7, a + (b - a) * x15])
    vals = f(r) * (TWO_PI_SQ * r**weight_power)
    coarse = float(np.dot(vals[:7], w7)) * (b - a)
    fine = float(np.dot(vals[7:], w15)) * (b - a)
    return coarse, fine


def radial_integrate(f, segments, tol=DEFAULT_TOL, abs_tol=0.0,
                     budget=DEFAULT_BUDGET, weight_power=3):
    """Adaptive 1D integral of f(r) * 2 pi^2 r^weight_power over segments.

    segments is a sequence of (a, b) radial intervals whose endpoints carry
    any kinks or discontinuities of f.
    """
    heap = []
    counter = 0
    cells = {}
    running_val = 0.0
    running_err = 0.0

    def push(a, b):
        nonlocal counter, running_val, running_err
        coarse, fine = _radial_pair(f, a, b, weight_power)
        err = abs(fine - coarse)
        cells[counter] = (fine, err, a, b)
        heapq.heappush(heap, (-err, counter))
        running_val += fine
        running_err += err
        counter += 1

    for a, b in segments:
        if b > a:
            push(a, b)

    while True:
        if running_err <= max(tol * abs(running_val), abs_tol):
            value = math.fsum(c[0] for c in cells.values())
            err = math.fsum(c[1] for c in cells.values())
            return QuadResult(value, err, counter)
        if counter >= budget:
            value = math.fsum(c[0] for c in cells.values())
            err = math.fsum(c[1] for c in cells.values())
            raise BudgetExceededError(QuadResult(value, err, counter))
        _, idx = heapq.heappop(heap)
        fine, err, a, b = cells.pop(idx)
        running_val -= fine
        running_err -= err
        m = 0.5 * (a + b)
        push(a, m)
        push(m, b)
