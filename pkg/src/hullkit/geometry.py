"""Geometry of the null quadric in C^3 and its associated real frames.

The null quadric is the cone of complex vectors theta with
theta_1^2 + theta_2^2 + theta_3^2 = 0.  Its punctured part parametrizes
directional data for conformal minimal discs in R^3: writing
theta = v1 + i*v2, the nullity condition is equivalent to v1, v2 being
orthogonal vectors of equal length.  Everything here is plain numpy;
complex directions are arrays of shape (3,) or (n, 3).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

# Relative tolerance used when validating nullity and frame invariants.
NULL_RTOL = 1e-12

# Canonical unit null directions: (1, +-i, 0) and its cyclic axis
# permutations, always present in sampled direction sets of size >= 6.
CANONICAL_NULL_DIRECTIONS = np.array(
    [
        [1.0, 1.0j, 0.0],
        [1.0, -1.0j, 0.0],
        [0.0, 1.0, 1.0j],
        [0.0, 1.0, -1.0j],
        [1.0j, 0.0, 1.0],
        [-1.0j, 0.0, 1.0],
    ],
    dtype=complex,
) / np.sqrt(2.0)


def spinor_to_null(a, b):
    """Map spinor components to a vector on the null quadric.

    The pair (a, b) in C^2 is sent to

        theta = (a^2 - b^2, i*(a^2 + b^2), 2*a*b),

    which satisfies theta_1^2 + theta_2^2 + theta_3^2 = 0 identically.
    The map is onto the null quadric and two-to-one off the origin.

    Parameters
    ----------
    a, b : complex scalars or arrays of matching shape.

    Returns
    -------
    ndarray, shape (..., 3), complex.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    a2 = a * a
    b2 = b * b
    return np.stack([a2 - b2, 1j * (a2 + b2), 2.0 * a * b], axis=-1)


def null_residual(theta):
    """Absolute residual |theta_1^2 + theta_2^2 + theta_3^2|.

    Zero exactly on the null quadric.  Callers checking membership should
    compare against NULL_RTOL * |theta|^2.
    """
    theta = np.asarray(theta, dtype=complex)
    return np.abs((theta * theta).sum(axis=-1))


def is_null(theta, rtol=NULL_RTOL):
    """True where theta lies on the null quadric up to relative tolerance."""
    theta = np.asarray(theta, dtype=complex)
    scale = (np.abs(theta) ** 2).sum(axis=-1)
    return null_residual(theta) <= rtol * np.maximum(scale, 1e-300)


@dataclass(frozen=True)
class ConformalFrame:
    """Ordered pair of orthogonal real 3-vectors of equal positive length.

    Such pairs are exactly the real/imaginary parts of vectors on the
    punctured null quadric and span the tangent planes of conformal
    parametrizations.  Validation enforces |v1| = |v2| and v1.v2 = 0 to
    relative tolerance NULL_RTOL.
    """

    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        v1 = np.asarray(self.v1, dtype=float).reshape(3)
        v2 = np.asarray(self.v2, dtype=float).reshape(3)
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)
        n1 = v1 @ v1
        n2 = v2 @ v2
        scale = max(n1, n2)
        if not np.isfinite(scale) or scale <= 0.0:
            raise ValueError("frame vectors must be finite and nonzero")
        if abs(n1 - n2) > 1e-10 * scale or abs(v1 @ v2) > 1e-10 * scale:
            raise ValueError("frame vectors must be orthogonal with equal norms")

    @property
    def scale(self):
        """Common length |v1| = |v2|."""
        return float(np.sqrt(self.v1 @ self.v1))

    def unit(self):
        """Frame rescaled to unit vectors."""
        s = self.scale
        return ConformalFrame(self.v1 / s, self.v2 / s)

    def circle_points(self, center, radius, t):
        """Points center + radius*(cos t * u1 + sin t * u2), u unit frame.

        t may be any array; the result has shape t.shape + (3,).
        """
        u = self.unit()
        t = np.asarray(t, dtype=float)
        return (
            np.asarray(center, dtype=float)
            + radius * np.cos(t)[..., None] * u.v1
            + radius * np.sin(t)[..., None] * u.v2
        )


def null_to_frame(theta):
    """Split a punctured-null-quadric vector into its conformal frame.

    Returns ConformalFrame(Re theta, Im theta).  Raises ValueError when
    theta is (numerically) purely imaginary, since then the real part
    cannot carry the frame; no nonzero null vector is purely imaginary,
    so this only triggers on invalid input.
    """
    theta = np.asarray(theta, dtype=complex).reshape(3)
    scale = float((np.abs(theta) ** 2).sum())
    if scale <= 0.0:
        raise ValueError("zero vector has no conformal frame")
    if not is_null(theta):
        raise ValueError("direction is not on the null quadric")
    v1 = theta.real.copy()
    if v1 @ v1 <= 1e-24 * scale:
        raise ValueError("purely imaginary direction has a degenerate frame")
    return ConformalFrame(v1, theta.imag.copy())


def frame_to_null(frame):
    """Inverse of null_to_frame: theta = v1 + i*v2."""
    return frame.v1 + 1j * frame.v2


def fibonacci_sphere(n):
    """Deterministic spherical Fibonacci lattice of n unit vectors in R^3."""
    if n < 1:
        raise ValueError("need at least one direction")
    i = np.arange(n, dtype=float) + 0.5
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    z = 1.0 - 2.0 * i / n
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([rho * np.cos(phi), rho * np.sin(phi), z], axis=-1)


def sample_null_directions(n, seed=0):
    """Sample n distinct unit vectors on the punctured null quadric.

    Deterministic for a fixed seed.  The first min(n, 6) entries are the
    canonical directions (1, +-i, 0) and their axis permutations; the
    remainder comes from a scrambled Halton sequence on the unit sphere
    of C^2 pushed through the spinor map.

    Returns
    -------
    ndarray, shape (n, 3), complex, rows of unit Hermitian norm.
    """
    if n < 1:
        raise ValueError("need at least one direction")
    out = [CANONICAL_NULL_DIRECTIONS[: min(n, 6)]]
    have = min(n, 6)
    if have < n:
        sampler = qmc.Halton(d=4, scramble=True, seed=seed)
        rows = []
        while have + len(rows) < n:
            u = sampler.random(2 * (n - have - len(rows)) + 8)
            # Halton points in (0,1)^4 -> Gaussian -> unit sphere of C^2.
            g = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
            norms = np.linalg.norm(g, axis=1)
            g = g[norms > 1e-8]
            g = g / np.linalg.norm(g, axis=1, keepdims=True)
            theta = spinor_to_null(g[:, 0] + 1j * g[:, 1], g[:, 2] + 1j * g[:, 3])
            tn = np.linalg.norm(theta, axis=1)
            theta = theta[tn > 1e-8]
            theta = theta / np.linalg.norm(theta, axis=1, keepdims=True)
            rows.extend(theta)
        out.append(np.array(rows[: n - have], dtype=complex))
    dirs = np.concatenate(out, axis=0)[:n]
    # Pairwise-distinct guard: collisions are measure zero under scrambling,
    # but nudge deterministically if the sampler ever repeats a point.
    key = np.round(dirs, 9)
    _, idx = np.unique(key.view(float).reshape(len(dirs), -1), axis=0, return_index=True)
    if len(idx) != len(dirs):
        raise ValueError("sampled directions collided; change the seed")
    return dirs


@dataclass(frozen=True)
class ConvexSupport:
    """Outer description of a convex hull by sampled support values.

    Stores h(d) = max over the generating points of <d, p> for a fixed
    direction set.  Membership testing is one-sided: a point passing
    contains() lies in the intersection of the sampled half-spaces, a
    superset of the hull that shrinks as directions are added.
    """

    directions: np.ndarray
    values: np.ndarray

    @classmethod
    def from_points(cls, points, n_directions=256):
        """Build support data for the convex hull of a point set.

        Directions come from a spherical Fibonacci lattice so the outer
        approximation is deterministic.
        """
        points = np.asarray(points, dtype=float).reshape(-1, 3)
        if len(points) == 0:
            raise ValueError("empty point set has no hull")
        if not np.isfinite(points).all():
            raise ValueError("points must be finite")
        dirs = fibonacci_sphere(n_directions)
        vals = (dirs @ points.T).max(axis=1)
        return cls(directions=dirs, values=vals)

    def gap(self, x):
        """Largest violation max_d (<d,x> - h(d)); <= 0 inside the outer hull."""
        x = np.asarray(x, dtype=float)
        proj = x @ self.directions.T
        return (proj - self.values).max(axis=-1)

    def contains(self, x, slack=0.0):
        """Half-space membership test with additive slack >= 0."""
        if slack < 0:
            raise ValueError("slack must be nonnegative")
        return self.gap(x) <= slack


def convex_membership(support, x, slack=0.0):
    """Functional form of ConvexSupport.contains."""
    return support.contains(x, slack=slack)


@dataclass(frozen=True)
class Ball:
    """Closed round ball in R^d, the default convex working domain."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0 or not np.isfinite(c).all():
            raise ValueError("ball needs finite center and positive radius")

    @property
    def dim(self):
        return len(self.center)

    @property
    def diameter(self):
        return 2.0 * self.radius

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        d = np.linalg.norm(pts - self.center, axis=-1)
        return d <= self.radius + 1e-12 * self.radius

    def boundary_distance(self, pts):
        """Signed distance to the boundary, positive inside."""
        pts = np.asarray(pts, dtype=float)
        return self.radius - np.linalg.norm(pts - self.center, axis=-1)

    def contains_disc(self, center, frame, radius):
        """Exact test that a flat 2-disc lies inside the ball."""
        u = frame.unit()
        d = np.asarray(center, dtype=float) - self.center
        proj = np.hypot(d @ u.v1, d @ u.v2)
        worst = d @ d + 2.0 * radius * proj + radius * radius
        return worst <= self.radius**2 * (1.0 + 1e-12)

    def bounding_box(self):
        return Box(self.center - self.radius, self.center + self.radius)


@dataclass(frozen=True)
class Box:
    """Axis-aligned closed box, usable both as domain and grid extent."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lo, dtype=float))
        hi = np.atleast_1d(np.asarray(self.hi, dtype=float))
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo.shape != hi.shape or not (hi > lo).all():
            raise ValueError("box needs lo < hi componentwise")

    @property
    def dim(self):
        return len(self.lo)

    @property
    def diameter(self):
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, pts):
        pts = np.asarray(pts, dtype=float)
        tol = 1e-12 * max(1.0, np.abs(self.hi - self.lo).max())
        return ((pts >= self.lo - tol) & (pts <= self.hi + tol)).all(axis=-1)

    def boundary_distance(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.minimum((pts - self.lo).min(axis=-1), (self.hi - pts).min(axis=-1))

    def contains_disc(self, center, frame, radius):
        u = frame.unit()
        # Per-axis reach of the circle: radius * sqrt(u1_i^2 + u2_i^2).
        reach = radius * np.hypot(u.v1, u.v2)
        center = np.asarray(center, dtype=float)
        tol = 1e-12 * max(1.0, np.abs(self.hi - self.lo).max())
        return bool(
            ((center - reach) >= self.lo - tol).all()
            and ((center + reach) <= self.hi + tol).all()
        )

    def bounding_box(self):
        return self
