"""Monotone disc-averaging envelopes over obstacle fields on R^3 grids.

The driver iterates the one-step map

    u_new(x) = min( u_old(x),
                    min over frames and admissible radii of the
                    circle average of u_old around x )

starting from an obstacle field.  Each sweep is a pure map of the
previous field (Jacobi style), every update takes a minimum with the
old value, and circle averages use trilinear interpolation off-grid,
so two invariants hold exactly by construction: fields never increase
between sweeps, and the iterate stays below the obstacle.  The limit
field approximates the largest minorant satisfying the circle-mean
inequality over planes spanned by conformal frames, whose sublevel set
near the obstacle's minimum carries the hull estimate.

A circle of radius r centered at x is admissible when the closed flat
disc it bounds lies inside the convex working domain; since discs are
the convex hulls of their boundary circles, the conservative bound
r <= distance(x, boundary) is used, which is exact for balls up to
frame orientation.  Frames are resampled every sweep (canonical axis
planes always included), so direction coverage accumulates across the
iteration instead of being fixed per node.

Node updates are independent, which the compiled kernel exploits with
a parallel loop; a pure numpy fallback implements the identical
arithmetic for environments without numba and for cross-checking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .geometry import Ball, Box, ConformalFrame, ConvexSupport, spinor_to_null
from .psh import default_floor

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None
    HAVE_NUMBA = False

CANONICAL_FRAMES = np.array(
    [
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
        [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
    ]
)


@dataclass
class Grid3:
    """Regular grid of scalar values over a box, with a domain mask."""

    lo: np.ndarray
    hi: np.ndarray
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        self.lo = np.asarray(self.lo, dtype=float).reshape(3)
        self.hi = np.asarray(self.hi, dtype=float).reshape(3)
        self.values = np.asarray(self.values, dtype=float)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.values.ndim != 3 or self.values.shape != self.mask.shape:
            raise ValueError("values and mask must be matching 3-d arrays")
        if not (self.hi > self.lo).all():
            raise ValueError("grid box must have positive extent")

    @property
    def shape(self):
        return self.values.shape

    @property
    def spacing(self):
        return (self.hi - self.lo) / (np.array(self.shape) - 1)

    def axes(self):
        return tuple(
            np.linspace(self.lo[a], self.hi[a], self.shape[a]) for a in range(3)
        )

    def points(self):
        """All node coordinates, shape = grid shape + (3,)."""
        ax = self.axes()
        mesh = np.meshgrid(*ax, indexing="ij")
        return np.stack(mesh, axis=-1)

    def interpolate(self, pts):
        """Clamped trilinear interpolation at arbitrary points."""
        pts = np.asarray(pts, dtype=float)
        g = (pts - self.lo) / self.spacing
        out_shape = g.shape[:-1]
        g = g.reshape(-1, 3)
        n = np.array(self.shape)
        g = np.clip(g, 0.0, n - 1.000000001)
        i0 = np.floor(g).astype(np.int64)
        i0 = np.minimum(i0, n - 2)
        f = g - i0
        v = self.values
        out = np.zeros(len(g))
        for c0 in (0, 1):
            for c1 in (0, 1):
                for c2 in (0, 1):
                    w = (
                        (f[:, 0] if c0 else 1.0 - f[:, 0])
                        * (f[:, 1] if c1 else 1.0 - f[:, 1])
                        * (f[:, 2] if c2 else 1.0 - f[:, 2])
                    )
                    out += w * v[i0[:, 0] + c0, i0[:, 1] + c1, i0[:, 2] + c2]
        return out.reshape(out_shape)

    def copy_with(self, values):
        return Grid3(self.lo.copy(), self.hi.copy(), values, self.mask.copy())


@dataclass(frozen=True)
class EnvelopeConfig:
    """Tunable knobs of the envelope iteration.

    radii are in grid units (multiples of the largest node spacing);
    when omitted the schedule is geometric with ratio 2 starting at 2
    and capped by the largest admissible distance in the domain.
    """

    frames_per_node: int = 24
    radii: Optional[tuple] = None
    n_quad: int = 12
    max_sweeps: int = 200
    tol: float = 1e-3
    floor: float = field(default_factory=default_floor)
    seed: int = 0


@dataclass
class EnvelopeInfo:
    sweeps: int
    residuals: list
    converged: bool


@dataclass
class HullResult:
    """Converged field with its thresholded hull estimate and diagnostics."""

    grid: Grid3
    threshold: float
    delta: float
    member_mask: np.ndarray
    member_points: np.ndarray
    info: EnvelopeInfo
    diagnostics: dict


def sample_frames(n, seed):
    """n unit conformal frames: canonical axis planes, then seeded random.

    Random frames come from Gaussian spinors pushed through the null
    quadric, whose real and imaginary parts are orthogonal equal-norm
    pairs by construction.
    """
    frames = [CANONICAL_FRAMES[: min(n, 3)]]
    have = min(n, 3)
    if have < n:
        rng = np.random.default_rng(seed)
        need = n - have
        rows = []
        while len(rows) < need:
            g = rng.standard_normal((2 * need + 4, 4))
            theta = spinor_to_null(g[:, 0] + 1j * g[:, 1], g[:, 2] + 1j * g[:, 3])
            v1 = theta.real
            v2 = theta.imag
            norms = np.linalg.norm(v1, axis=1)
            keep = norms > 1e-8
            v1, v2, norms = v1[keep], v2[keep], norms[keep]
            for a, b, s in zip(v1, v2, norms):
                rows.append(np.stack([a / s, b / s]))
        frames.append(np.array(rows[:need]))
    return np.concatenate(frames, axis=0)[:n]


def radii_schedule(cfg: EnvelopeConfig, h, max_admissible):
    """Physical radii: grid-unit schedule times the largest spacing."""
    if cfg.radii is not None:
        radii = np.asarray(cfg.radii, dtype=float) * h
    else:
        units = []
        u = 2.0
        while u * h <= max_admissible and len(units) < 64:
            units.append(u)
            u *= 2.0
        if not units:
            units = [2.0]
        radii = np.asarray(units) * h
    return radii[radii <= max_admissible + 1e-12] if len(radii) else np.array([2.0 * h])


if HAVE_NUMBA:

    @numba.njit(parallel=True, cache=True, fastmath=True)
    def _sweep_kernel(values, mask, bdist, radii, goffs, out):
        # goffs[f, r, q, :] holds circle-point offsets premultiplied into
        # grid units, so the hot loop is pure gather plus lerp.
        n1, n2, n3 = values.shape
        nf = goffs.shape[0]
        nr = radii.shape[0]
        nq = goffs.shape[2]
        total = n1 * n2 * n3
        for idx in numba.prange(total):
            i = idx // (n2 * n3)
            rem = idx % (n2 * n3)
            j = rem // n3
            k = rem % n3
            old = values[i, j, k]
            if not mask[i, j, k]:
                out[i, j, k] = old
                continue
            best = old
            d = bdist[i, j, k]
            for fi in range(nf):
                for ri in range(nr):
                    if radii[ri] > d:
                        break
                    acc = 0.0
                    for qi in range(nq):
                        gx = i + goffs[fi, ri, qi, 0]
                        gy = j + goffs[fi, ri, qi, 1]
                        gz = k + goffs[fi, ri, qi, 2]
                        if gx < 0.0:
                            gx = 0.0
                        if gx > n1 - 1.000000001:
                            gx = n1 - 1.000000001
                        if gy < 0.0:
                            gy = 0.0
                        if gy > n2 - 1.000000001:
                            gy = n2 - 1.000000001
                        if gz < 0.0:
                            gz = 0.0
                        if gz > n3 - 1.000000001:
                            gz = n3 - 1.000000001
                        ix = int(gx)
                        iy = int(gy)
                        iz = int(gz)
                        fx = gx - ix
                        fy = gy - iy
                        fz = gz - iz
                        v000 = values[ix, iy, iz]
                        v100 = values[ix + 1, iy, iz]
                        v010 = values[ix, iy + 1, iz]
                        v110 = values[ix + 1, iy + 1, iz]
                        v001 = values[ix, iy, iz + 1]
                        v101 = values[ix + 1, iy, iz + 1]
                        v011 = values[ix, iy + 1, iz + 1]
                        v111 = values[ix + 1, iy + 1, iz + 1]
                        c00 = v000 * (1.0 - fx) + v100 * fx
                        c10 = v010 * (1.0 - fx) + v110 * fx
                        c01 = v001 * (1.0 - fx) + v101 * fx
                        c11 = v011 * (1.0 - fx) + v111 * fx
                        c0 = c00 * (1.0 - fy) + c10 * fy
                        c1 = c01 * (1.0 - fy) + c11 * fy
                        acc += c0 * (1.0 - fz) + c1 * fz
                    avg = acc / nq
                    if avg < best:
                        best = avg
            out[i, j, k] = best


def _sweep_numpy(grid: Grid3, bdist, frames, radii, n_quad):
    """Reference sweep, same arithmetic as the kernel, vectorized."""
    pts = grid.points()
    values = grid.values
    best = values.copy()
    t = 2.0 * np.pi * np.arange(n_quad) / n_quad
    cosq, sinq = np.cos(t), np.sin(t)
    for fr in frames:
        for r in radii:
            ok = grid.mask & (bdist >= r)
            if not ok.any():
                continue
            centers = pts[ok]
            acc = np.zeros(len(centers))
            for c, s in zip(cosq, sinq):
                offset = r * (c * fr[0] + s * fr[1])
                acc += grid.interpolate(centers + offset)
            avg = acc / n_quad
            sub = best[ok]
            best[ok] = np.minimum(sub, avg)
    return np.where(grid.mask, best, values)


def _run_sweep(grid: Grid3, bdist, frames, radii, n_quad, use_numba=True):
    if HAVE_NUMBA and use_numba:
        order = np.argsort(radii)
        radii = np.ascontiguousarray(np.asarray(radii, dtype=float)[order])
        t = 2.0 * np.pi * np.arange(n_quad) / n_quad
        circ = np.stack([np.cos(t), np.sin(t)], axis=-1)
        # offsets in grid units: r * (cos t * v1 + sin t * v2) / spacing
        offs = np.einsum("r,qa,fac->frqc", radii, circ, np.asarray(frames, dtype=float))
        goffs = np.ascontiguousarray(offs / grid.spacing)
        out = np.empty_like(grid.values)
        _sweep_kernel(grid.values, grid.mask, bdist, radii, goffs, out)
        return out
    return _sweep_numpy(grid, bdist, frames, radii, n_quad)


def _boundary_distance_grid(grid: Grid3, domain):
    return np.asarray(domain.boundary_distance(grid.points()), dtype=float)


def bs_step_minimal(grid: Grid3, domain, cfg: EnvelopeConfig, frames=None, use_numba=True):
    """One monotone sweep of the disc-averaging map.

    Nodes outside the mask, and nodes admitting no circle (closer to
    the boundary than the smallest radius), keep their value.  The
    output is a new grid; the input is never mutated.
    """
    bdist = _boundary_distance_grid(grid, domain)
    h = float(grid.spacing.max())
    radii = radii_schedule(cfg, h, float(bdist.max(initial=0.0)))
    if frames is None:
        frames = sample_frames(cfg.frames_per_node, cfg.seed)
    values = np.maximum(grid.values, cfg.floor)
    work = grid.copy_with(values)
    out = _run_sweep(work, bdist, frames, radii, cfg.n_quad, use_numba=use_numba)
    return grid.copy_with(out)


def bs_iterate(grid: Grid3, domain, cfg: EnvelopeConfig, check_monotone=False, use_numba=True):
    """Sweep until the sup-norm change drops below tol.

    Non-convergence within max_sweeps is reported through the returned
    EnvelopeInfo flag, never as an exception; the partial field is
    still meaningful (it is a monotone improvement of the obstacle).
    """
    bdist = _boundary_distance_grid(grid, domain)
    h = float(grid.spacing.max())
    radii = radii_schedule(cfg, h, float(bdist.max(initial=0.0)))
    current = grid.copy_with(np.maximum(grid.values, cfg.floor))
    obstacle = current.values.copy()
    residuals = []
    converged = False
    for sweep in range(cfg.max_sweeps):
        frames = sample_frames(cfg.frames_per_node, (cfg.seed * 1000003 + sweep) % 2**31)
        new_values = _run_sweep(current, bdist, frames, radii, cfg.n_quad, use_numba=use_numba)
        if check_monotone:
            if (new_values > current.values + 1e-12).any():
                raise AssertionError("sweep increased the field")
            if (new_values > obstacle + 1e-12).any():
                raise AssertionError("sweep rose above the obstacle")
        resid = float(np.abs(new_values - current.values)[grid.mask].max(initial=0.0))
        residuals.append(resid)
        current = current.copy_with(new_values)
        if resid <= cfg.tol:
            converged = True
            break
    return current, EnvelopeInfo(sweeps=len(residuals), residuals=residuals, converged=converged)


def extremal_hull_field(
    k_points,
    domain,
    resolution=64,
    delta=None,
    cfg: Optional[EnvelopeConfig] = None,
    threshold=0.1,
    check_monotone=False,
    use_numba=True,
):
    """Hull estimate for a compact point set from the extremal obstacle.

    The obstacle is -1 on the delta-thickening of the set (default
    delta = two node spacings) and 0 elsewhere in the domain; the node
    nearest each generating point is forced to -1 so the set itself is
    always carried by members.  Members are masked nodes whose
    converged value lies at or below -1 + threshold.
    """
    k_points = np.asarray(k_points, dtype=float).reshape(-1, 3)
    if len(k_points) == 0:
        raise ValueError("need at least one generating point")
    box = domain.bounding_box()
    if isinstance(resolution, int):
        shape = (resolution, resolution, resolution)
    else:
        shape = tuple(int(r) for r in resolution)
    grid = Grid3(
        lo=box.lo,
        hi=box.hi,
        values=np.zeros(shape),
        mask=np.ones(shape, dtype=bool),
    )
    pts = grid.points()
    grid.mask = np.asarray(domain.contains(pts), dtype=bool)
    if not np.asarray(domain.contains(k_points), dtype=bool).all():
        raise ValueError("generating set must lie inside the domain")
    h = float(grid.spacing.max())
    if delta is None:
        delta = 2.0 * h
    if cfg is None:
        cfg = EnvelopeConfig()
    tree = cKDTree(k_points)
    dist, _ = tree.query(pts.reshape(-1, 3), workers=-1)
    values = np.where(dist.reshape(shape) <= delta, -1.0, 0.0)
    # Force the node nearest each generating point, so coarse grids with
    # delta below the spacing still mark the set itself.
    nearest = np.round((k_points - grid.lo) / grid.spacing).astype(int)
    nearest = np.clip(nearest, 0, np.array(shape) - 1)
    k_node_index = tuple(nearest.T)
    values[k_node_index] = -1.0
    values = np.where(grid.mask, values, 0.0)
    grid.values = values
    converged_grid, info = bs_iterate(
        grid, domain, cfg, check_monotone=check_monotone, use_numba=use_numba
    )
    member_mask = converged_grid.mask & (converged_grid.values <= -1.0 + threshold)
    member_points = converged_grid.points()[member_mask]
    support = ConvexSupport.from_points(k_points)
    slack = 2.0 * h
    if member_points.size:
        gaps = support.gap(member_points)
        sandwich_ok = bool((gaps <= slack).all())
        max_gap = float(gaps.max())
    else:
        # no members: the sandwich holds vacuously and there is no gap
        sandwich_ok = True
        max_gap = None
    diagnostics = {
        "k_nodes_member": bool(member_mask[k_node_index].all()),
        "members_in_hull_slack": sandwich_ok,
        "max_support_gap": max_gap,
        "support_slack": slack,
        "n_members": int(member_mask.sum()),
    }
    return HullResult(
        grid=converged_grid,
        threshold=threshold,
        delta=delta,
        member_mask=member_mask,
        member_points=member_points,
        info=info,
        diagnostics=diagnostics,
    )


def hausdorff_distance(a, b):
    """Symmetric Hausdorff distance between two finite point sets."""
    a = np.asarray(a, dtype=float).reshape(-1, 3)
    b = np.asarray(b, dtype=float).reshape(-1, 3)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Hausdorff distance needs nonempty sets")
    d_ab = cKDTree(b).query(a, workers=-1)[0].max()
    d_ba = cKDTree(a).query(b, workers=-1)[0].max()
    return float(max(d_ab, d_ba))


def submean_residual(grid: Grid3, domain, n_discs=1024, n_quad=32, seed=11):
    """Largest positive circle-mean violation over a family of test discs.

    Draws a fixed family of circles (random centers, conformal frames,
    radii admissible in the domain), evaluates the interpolated field at
    the center against its trapezoidal circle average, and returns the
    maximum of (center - average, 0).  Under grid refinement at fixed
    physical discs this measures interpolation error, which shrinks
    linearly with the spacing near creases of the limit envelope.
    """
    rng = np.random.default_rng(seed)
    frames = sample_frames(max(n_discs, 4), seed + 1)
    worst = 0.0
    t = 2.0 * np.pi * np.arange(n_quad) / n_quad
    drawn = 0
    while drawn < n_discs:
        center = rng.uniform(grid.lo, grid.hi)
        if not domain.contains(center):
            continue
        margin = float(domain.boundary_distance(center))
        if margin <= 0.05 * float(grid.spacing.max()):
            continue
        r = rng.uniform(0.2, 1.0) * margin
        fr = frames[drawn % len(frames)]
        frame = ConformalFrame(fr[0], fr[1])
        pts = frame.circle_points(center, r, t)
        avg = float(np.mean(grid.interpolate(pts)))
        cval = float(grid.interpolate(center))
        worst = max(worst, cval - avg)
        drawn += 1
    return worst
