"""Point-cloud variant of the disc-averaging sweep in C^3.

Scattered samples in C^3 (stored as R^6 rows) carry field values; one
sweep replaces each value by the minimum of itself and circle averages
z + r e^{it} theta over sampled null directions theta, restricted to
circles staying inside the working ball.  Off-sample evaluation uses a
local least-squares quadratic model per sample, queried at the nearest
sample: the models reproduce quadratics exactly, which keeps the sweep
stationary on null-plurisubharmonic quadratic fields up to conditioning
noise instead of the much larger nearest-value interpolation error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geometry import sample_null_directions

MAX_CLOUD_SAMPLES = 200_000

# Degree-2 monomial count in R^6: 1 constant + 6 linear + 21 quadratic.
N_MONOMIALS = 28

_PAIRS = [(i, j) for i in range(6) for j in range(i, 6)]


def quad_basis(dx):
    """Degree <= 2 monomial basis on centered R^6 offsets, shape (..., 28)."""
    dx = np.asarray(dx, dtype=float)
    cols = [np.ones(dx.shape[:-1])]
    for i in range(6):
        cols.append(dx[..., i])
    for i, j in _PAIRS:
        cols.append(dx[..., i] * dx[..., j])
    return np.stack(cols, axis=-1)


@dataclass
class LocalModels:
    """Per-sample quadratic models plus the spatial index used to pick one."""

    centers: np.ndarray
    coeffs: np.ndarray
    scale: np.ndarray
    tree: cKDTree
    fallback: np.ndarray  # True where the fit degenerated to nearest-value

    def __call__(self, queries):
        queries = np.asarray(queries, dtype=float)
        flat = queries.reshape(-1, 6)
        _, idx = self.tree.query(flat, workers=-1)
        dx = (flat - self.centers[idx]) / self.scale[idx, None]
        vals = np.einsum("nm,nm->n", quad_basis(dx), self.coeffs[idx])
        return vals.reshape(queries.shape[:-1])


def fit_local_models(points, values, k_neighbors=48, chunk=8192):
    """Fit one centered quadratic per sample to its k nearest neighbors.

    Normal equations with a tiny ridge keep the batched solve stable;
    samples whose neighborhoods are too degenerate fall back to the
    constant model (their own value) and are flagged.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 6)
    values = np.asarray(values, dtype=float).reshape(-1)
    n = len(points)
    if n > MAX_CLOUD_SAMPLES:
        raise ValueError(f"cloud exceeds the supported {MAX_CLOUD_SAMPLES} samples")
    if len(values) != n:
        raise ValueError("points and values must align")
    k = min(k_neighbors, n)
    tree = cKDTree(points)
    coeffs = np.zeros((n, N_MONOMIALS))
    scale = np.ones(n)
    fallback = np.zeros(n, dtype=bool)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        dist, idx = tree.query(points[start:stop], k=k, workers=-1)
        neigh = points[idx]  # (m, k, 6)
        dx = neigh - points[start:stop, None, :]
        s = np.maximum(dist[:, -1], 1e-12)
        dx = dx / s[:, None, None]
        A = quad_basis(dx)  # (m, k, 28)
        y = values[idx]
        AtA = np.einsum("mki,mkj->mij", A, A)
        Aty = np.einsum("mki,mk->mi", A, y)
        ridge = 1e-10 * np.trace(AtA, axis1=1, axis2=2) / N_MONOMIALS
        AtA = AtA + ridge[:, None, None] * np.eye(N_MONOMIALS)
        try:
            # solve treats a 2-d rhs as one matrix, so keep an explicit
            # trailing axis for the stacked vectors
            sol = np.linalg.solve(AtA, Aty[..., None])[..., 0]
        except np.linalg.LinAlgError:
            sol = np.zeros((stop - start, N_MONOMIALS))
            for row in range(stop - start):
                try:
                    sol[row] = np.linalg.solve(AtA[row], Aty[row])
                except np.linalg.LinAlgError:
                    sol[row, 0] = values[start + row]
                    fallback[start + row] = True
        bad = ~np.isfinite(sol).all(axis=1)
        if bad.any():
            sol[bad] = 0.0
            sol[bad, 0] = values[start:stop][bad]
            fallback[start:stop][bad] = True
        coeffs[start:stop] = sol
        scale[start:stop] = s
    return LocalModels(centers=points, coeffs=coeffs, scale=scale, tree=tree, fallback=fallback)


def circle_offsets(direction, radius, n_quad):
    """R^6 offsets of the circle r e^{it} theta, shape (n_quad, 6)."""
    t = 2.0 * np.pi * np.arange(n_quad) / n_quad
    phase = radius * np.exp(1j * t)
    pts = np.multiply.outer(phase, np.asarray(direction, dtype=complex))
    return np.concatenate([pts.real, pts.imag], axis=-1)


def bs_step_null(
    points,
    values,
    ball_radius=1.0,
    directions=None,
    radii=(0.1, 0.2),
    n_quad=8,
    k_neighbors=48,
    seed=0,
):
    """One monotone sweep of the null-disc averaging map on a cloud.

    Returns (new_values, info).  Values only decrease; samples without
    any admissible circle (too close to the sphere) and samples whose
    local interpolation degenerated keep their value and are flagged in
    info.  directions defaults to eight sampled null directions.
    """
    points = np.asarray(points, dtype=float).reshape(-1, 6)
    values = np.asarray(values, dtype=float).reshape(-1)
    if directions is None:
        directions = sample_null_directions(8, seed=seed)
    models = fit_local_models(points, values, k_neighbors=k_neighbors)
    norms = np.linalg.norm(points, axis=1)
    best = values.copy()
    interior = np.zeros(len(points), dtype=bool)
    for theta in np.atleast_2d(directions):
        for r in radii:
            ok = norms + r <= ball_radius + 1e-12
            if not ok.any():
                continue
            interior |= ok
            offs = circle_offsets(theta, r, n_quad)
            acc = np.zeros(int(ok.sum()))
            base = points[ok]
            for off in offs:
                acc += models(base + off)
            avg = acc / n_quad
            best[ok] = np.minimum(best[ok], avg)
    skipped = ~interior
    info = {
        "interior": interior,
        "skipped": skipped,
        "interp_fallback": models.fallback,
        "n_interior": int(interior.sum()),
    }
    return best, info


def sample_ball_c3(n, seed=0, radius=1.0):
    """Uniform samples from the ball |z| <= radius in C^3 = R^6."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, 6))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.uniform(size=n) ** (1.0 / 6.0)
    return g * r[:, None]
