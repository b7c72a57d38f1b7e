"""Smooth anchor loops whose means hit a prescribed target exactly.

Planning picks at most four anchor points from a sample cloud together
with convex weights whose weighted mean is the target, using
nonnegative least squares followed by exact support reduction (in R^3
any convex combination can be thinned to four points by shifting the
weights along an affine dependency until one vanishes).  Building then
lays out a periodic schedule that dwells at each anchor for a time
proportional to its weight, moves between anchors during short transit
windows with a quintic time ease (so the loop is C^2 and its Fourier
tail decays fast), optionally following prescribed waypoint routes,
band-limits the result by Fourier projection, and finally translates
the loop so its mean equals the target to machine precision; the
translation only touches the k = 0 mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import nnls

from .discs import BoundaryLoop

DEFAULT_TRANSIT_FRACTION = 0.15
MEAN_TOL = 1e-10


@dataclass
class LoopPlan:
    """Anchors, convex weights, and the time allocation of the loop."""

    p: np.ndarray
    anchors: np.ndarray
    weights: np.ndarray
    transit_fraction: float = DEFAULT_TRANSIT_FRACTION

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float).reshape(3)
        self.anchors = np.asarray(self.anchors, dtype=float).reshape(-1, 3)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(self.anchors) != len(self.weights):
            raise ValueError("anchors and weights must align")
        if (self.weights <= 0).any():
            raise ValueError("weights must be positive")
        if abs(self.weights.sum() - 1.0) > 1e-8:
            raise ValueError("weights must sum to one")

    def mean_error(self):
        return float(np.linalg.norm(self.weights @ self.anchors - self.p))


def _farthest_point_candidates(points, p, m):
    """Greedy farthest-point subset, seeded at the sample nearest p."""
    n = len(points)
    if n <= m:
        return np.arange(n)
    chosen = [int(np.linalg.norm(points - p, axis=1).argmin())]
    dist = np.linalg.norm(points - points[chosen[0]], axis=1)
    for _ in range(m - 1):
        nxt = int(dist.argmax())
        chosen.append(nxt)
        dist = np.minimum(dist, np.linalg.norm(points - points[nxt], axis=1))
    return np.array(chosen)


def _caratheodory_prune(anchors, weights, target_size=4):
    """Thin a convex combination to <= target_size support points.

    Support points beyond d+1 admit an affine dependency; moving the
    weights along it until one hits zero preserves both the weighted
    mean and the total weight exactly.
    """
    anchors = anchors.copy()
    weights = weights.copy()
    while len(anchors) > target_size:
        rows = np.vstack([anchors.T, np.ones(len(anchors))])
        _, _, vt = np.linalg.svd(rows)
        null = vt[-1]
        # Guard: with > 4 points in R^3 the system is wide, so a null
        # vector exists; numerical rank issues only make it better.
        step_candidates = weights[null > 1e-15] / null[null > 1e-15]
        if len(step_candidates) == 0:
            null = -null
            step_candidates = weights[null > 1e-15] / null[null > 1e-15]
        tstar = step_candidates.min()
        weights = weights - tstar * null
        keep = weights > 1e-14
        anchors = anchors[keep]
        weights = weights[keep]
    weights = weights / weights.sum()
    return anchors, weights


def plan_loop(p, omega_samples, k_anchors=4, n_candidates=32, tol=1e-9):
    """Pick anchors from the samples whose convex mean is exactly p.

    Raises ValueError when p lies outside the sampled convex hull (the
    nonnegative least squares feasibility residual exceeds tol).
    """
    p = np.asarray(p, dtype=float).reshape(3)
    samples = np.asarray(omega_samples, dtype=float).reshape(-1, 3)
    if len(samples) == 0:
        raise ValueError("need at least one sample")
    d_near = np.linalg.norm(samples - p, axis=1)
    if d_near.min() <= 1e-12:
        anchor = samples[[int(d_near.argmin())]]
        return LoopPlan(p=p, anchors=anchor, weights=np.array([1.0]))
    idx = _farthest_point_candidates(samples, p, n_candidates)
    cand = samples[idx]
    scale = max(1.0, float(np.abs(cand).max()))
    # Stack the affine constraint with a weight that makes sum(c) = 1
    # as important as the mean itself.
    a = np.vstack([cand.T / scale, np.full(len(cand), 1.0)])
    rhs = np.concatenate([p / scale, [1.0]])
    weights, resid = nnls(a, rhs)
    if resid > tol:
        raise ValueError("target lies outside the sampled convex hull")
    keep = weights > 1e-12
    anchors, weights = _caratheodory_prune(cand[keep], weights[keep], k_anchors)
    # Final polish: reproject the weights on the fixed support so the
    # mean is exact to rounding.
    a2 = np.vstack([anchors.T, np.ones(len(anchors))])
    rhs2 = np.concatenate([p, [1.0]])
    sol, *_ = np.linalg.lstsq(a2, rhs2, rcond=None)
    if (sol > 0).all() and np.linalg.norm(a2 @ sol - rhs2) < 1e-12:
        weights = sol / sol.sum()
    plan = LoopPlan(p=p, anchors=anchors, weights=weights)
    if plan.mean_error() > MEAN_TOL:
        raise ValueError("anchor mean missed the target beyond tolerance")
    return plan


def _quintic_ease(s):
    """C^2 monotone ramp on [0, 1]."""
    s = np.clip(s, 0.0, 1.0)
    return s**3 * (10.0 - 15.0 * s + 6.0 * s**2)


def _transit_path(start, stop, route, s):
    """Position along a waypoint polyline at eased progress s in [0, 1]."""
    pts = [np.asarray(start, dtype=float)]
    if route is not None:
        pts.extend(np.asarray(route, dtype=float).reshape(-1, 3))
    pts.append(np.asarray(stop, dtype=float))
    pts = np.stack(pts)
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    total = seg.sum()
    if total <= 1e-15:
        return np.broadcast_to(pts[0], (len(s), 3)).copy()
    cum = np.concatenate([[0.0], np.cumsum(seg)]) / total
    eased = _quintic_ease(s)
    out = np.empty((len(s), 3))
    for c in range(3):
        out[:, c] = np.interp(eased, cum, pts[:, c])
    return out


def build_loop(plan: LoopPlan, band_limit=48, routes: Optional[Sequence] = None, n_grid=None):
    """Realize the plan as a band-limited loop with mean exactly p.

    routes, when given, holds one waypoint array per transit (from
    anchor j to anchor j+1 cyclically); transits follow the polyline
    with a quintic ease.  After Fourier projection the k = 0 mode is
    replaced by the target, a rigid translation making the realized
    mean exact.
    """
    k = len(plan.anchors)
    if n_grid is None:
        n_grid = max(16 * band_limit, 1024)
    if k == 1:
        coeffs = np.zeros((3, 2 * band_limit + 1), dtype=complex)
        coeffs[:, band_limit] = plan.anchors[0]
        loop = BoundaryLoop(coeffs)
        return loop.translated(plan.p - loop.mean())
    eta = plan.transit_fraction
    dwell = (1.0 - eta) * plan.weights
    transit = np.full(k, eta / k)
    spans = np.empty(2 * k)
    spans[0::2] = dwell
    spans[1::2] = transit
    edges = np.concatenate([[0.0], np.cumsum(spans)])
    edges /= edges[-1]
    t = np.arange(n_grid) / n_grid
    samples = np.empty((n_grid, 3))
    for j in range(k):
        lo_d, hi_d = edges[2 * j], edges[2 * j + 1]
        in_dwell = (t >= lo_d) & (t < hi_d)
        samples[in_dwell] = plan.anchors[j]
        lo_t, hi_t = edges[2 * j + 1], edges[2 * j + 2]
        in_transit = (t >= lo_t) & (t < hi_t)
        if in_transit.any():
            s = (t[in_transit] - lo_t) / max(hi_t - lo_t, 1e-15)
            route = None if routes is None else routes[j]
            nxt = plan.anchors[(j + 1) % k]
            samples[in_transit] = _transit_path(plan.anchors[j], nxt, route, s)
    loop = BoundaryLoop.from_samples(samples, band_limit=band_limit)
    return loop.translated(plan.p - loop.mean())
