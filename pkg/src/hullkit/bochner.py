"""Finite-stage tube demonstration: holomorphic discs through a point
with real boundary parts squeezing onto a compact connected base.

A tube over a base set K in R^3 is K x iR^3: only the real parts are
constrained.  For a target p in the convex hull of K the stage-j disc
is built from a loop that dwells at anchor points of K and transits
between them along the base (so the loop lives in the 1/j-thickening
of K), harmonically extended and completed to a holomorphic disc with
f(0) = p exactly.  As j grows the transits speed up; the boundary real
parts converge to K while the disc masses stay bounded because the
harmonic conjugate operator is bounded on L^2 of the circle.

Masses use the boundary L^2 form (quarter of the boundary mean of
|f|^2 minus |f(0)|^2), evaluated exactly from Fourier coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .currents import GreenQuadrature, ddc_identity_check
from .discs import BoundaryLoop, HolomorphicDisc, RealSurface, analytic_completion
from .loops import LoopPlan, build_loop, plan_loop
from .polynomials import Quadratic

DEFAULT_J_MAX = 8
DEFAULT_BAND_LIMIT = 64
MEAN_TOL = 1e-10


@dataclass(frozen=True)
class TubeSpec:
    """Tube over a real base, described by samples of the base only."""

    base_points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.base_points, dtype=float).reshape(-1, 3)
        if len(pts) == 0:
            raise ValueError("tube base needs at least one sample")
        object.__setattr__(self, "base_points", pts)
        object.__setattr__(self, "_tree", cKDTree(pts))

    def distance(self, pts):
        """Distance of real points to the sampled base."""
        pts = np.asarray(pts, dtype=float)
        d, _ = self._tree.query(pts.reshape(-1, 3))
        return d.reshape(pts.shape[:-1])


def tube_test_suite(dim=6, seed=11):
    """Probes on the realified ambient space for residual checks.

    Includes the signed tube height (sum of the first two squared
    moduli minus the third), the squared norm, a linear probe, and one
    seeded generic quadratic.
    """
    half = dim // 2
    sgn = np.ones(half)
    sgn[-1] = -1.0
    signs = np.concatenate([sgn, sgn])
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim))
    return [
        ("tube_height", Quadratic(A=np.diag(signs), b=np.zeros(dim), c=0.0)),
        ("abs_sq", Quadratic(A=np.eye(dim), b=np.zeros(dim), c=0.0)),
        ("linear", Quadratic(A=np.zeros((dim, dim)), b=np.eye(dim)[0], c=0.5)),
        ("generic", Quadratic(A=0.5 * (g + g.T) / dim, b=rng.standard_normal(dim) / dim, c=0.0)),
    ]


def _base_routes(plan: LoopPlan, base_points, k_neighbors=6):
    """Waypoint polylines between consecutive anchors along the base.

    Shortest paths on the k-nearest-neighbor graph of the base samples
    keep transits within a sample spacing of the base, so the loop
    stays inside every 1/j-thickening once j is moderate.
    """
    pts = np.asarray(base_points, dtype=float).reshape(-1, 3)
    n = len(pts)
    k = len(plan.anchors)
    if k == 1 or n < 2:
        return None
    kq = min(k_neighbors + 1, n)
    tree = cKDTree(pts)
    dist, nbr = tree.query(pts, k=kq)
    rows = np.repeat(np.arange(n), kq - 1)
    cols = nbr[:, 1:].reshape(-1)
    vals = dist[:, 1:].reshape(-1)
    graph = csr_matrix((vals, (rows, cols)), shape=(n, n))
    anchor_idx = tree.query(plan.anchors)[1]
    routes = []
    for j in range(k):
        src = int(anchor_idx[j])
        dst = int(anchor_idx[(j + 1) % k])
        _, pred = dijkstra(graph, directed=False, indices=src, return_predecessors=True)
        path = [dst]
        while path[-1] != src and pred[path[-1]] >= 0:
            path.append(int(pred[path[-1]]))
        path.reverse()
        if path[0] != src:
            routes.append(None)
        else:
            routes.append(pts[path])
    return routes


def disc_mass(loop: BoundaryLoop):
    """Boundary L^2 mass of the holomorphic completion of a real loop.

    Quarter of (boundary mean of |f|^2 minus |f(0)|^2).  The conjugate
    part contributes the same tail energy as the real part, so the
    total collapses to the summed squared moduli of the positive
    Fourier modes of the loop; evaluated exactly, no quadrature.
    """
    n = loop.band_limit
    pos = loop.coeffs[:, n + 1 :]
    return float((np.abs(pos) ** 2).sum())


@dataclass(frozen=True)
class StageRecord:
    """Per-stage quantities of the tube demonstration."""

    j: int
    loop: BoundaryLoop
    disc: HolomorphicDisc
    mean_error: float
    center_error: float
    containment: float
    thickening: float
    mass: float
    ddc_residuals: dict

    @property
    def contained(self):
        return self.containment <= self.thickening

    @property
    def max_residual(self):
        return max(self.ddc_residuals.values())


@dataclass(frozen=True)
class BochnerReport:
    """Stage records plus the across-stage mass bound."""

    p: np.ndarray
    plan: LoopPlan
    stages: tuple

    @property
    def masses(self):
        return np.array([s.mass for s in self.stages])

    @property
    def mass_ratio(self):
        """sup over stages of mass divided by the first-stage mass."""
        m = self.masses
        if m[0] <= 1e-15:
            return 1.0 if m.max() <= 1e-15 else np.inf
        return float(m.max() / m[0])

    @property
    def all_contained(self):
        return all(s.contained for s in self.stages)


def bochner_stage(
    p,
    omega_samples,
    tube: TubeSpec,
    j_max=DEFAULT_J_MAX,
    band_limit=DEFAULT_BAND_LIMIT,
    quadrature: Optional[GreenQuadrature] = None,
    test_suite: Optional[Sequence] = None,
    n_boundary=2048,
):
    """Run the finite tube stages and collect per-stage diagnostics.

    omega_samples supply the anchor candidates (normally the base
    samples themselves); the loop of stage j transits at fraction
    min(0.15, 1/(4j)) of the period and is checked against the 1/j
    thickening of the base.
    """
    p = np.asarray(p, dtype=float).reshape(3)
    plan = plan_loop(p, omega_samples)
    routes = _base_routes(plan, tube.base_points)
    if quadrature is None:
        quadrature = GreenQuadrature.build(64, 256)
    fine_quadrature = None
    if test_suite is None:
        test_suite = tube_test_suite()
    t = 2.0 * np.pi * np.arange(n_boundary) / n_boundary
    stages = []
    for j in range(1, j_max + 1):
        eta = min(0.15, 1.0 / (4.0 * j))
        plan_j = replace(plan, transit_fraction=eta)
        # Faster transits need more modes to keep the projection
        # overshoot well inside the 1/j containment margin; the cap
        # keeps products of modes below the fine angular rule.
        band_j = min(2 * band_limit, max(band_limit, int(np.ceil(band_limit * 0.06 / eta))))
        quad_j = quadrature
        if band_j > band_limit:
            if fine_quadrature is None:
                fine_quadrature = GreenQuadrature.build(2 * band_limit, 8 * band_limit)
            quad_j = fine_quadrature
        loop = build_loop(plan_j, band_limit=band_j, routes=routes)
        mean_error = float(np.linalg.norm(loop.mean() - p))
        disc = analytic_completion(loop)
        center = disc.center()
        center_error = float(
            np.linalg.norm(center.real - p) + np.linalg.norm(center.imag)
        )
        containment = float(tube.distance(loop(t)).max())
        surface = RealSurface(disc)
        residuals = {
            name: ddc_identity_check(surface, u, quad_j, method="chain").residual
            for name, u in test_suite
        }
        stages.append(
            StageRecord(
                j=j,
                loop=loop,
                disc=disc,
                mean_error=mean_error,
                center_error=center_error,
                containment=containment,
                thickening=1.0 / j,
                mass=disc_mass(loop),
                ddc_residuals=residuals,
            )
        )
    return BochnerReport(p=p, plan=plan, stages=tuple(stages))
