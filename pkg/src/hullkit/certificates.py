"""Constructive membership evidence: disc search, Jensen measures, Hessian tests.

Three kinds of certificate are produced here, all serializable records
with their seeds and budgets:

* disc certificates: a conformal minimal disc centered at the query
  point whose boundary concentrates near the generating set K; its
  obstacle boundary average (Poisson functional) upper-bounds the
  converged envelope at the center, so a value near -1 is membership
  evidence.  The search is a budgeted, seeded coordinate descent over
  spinor coefficients, with the center pinned at the query point by
  construction (the integration constant of the spinor disc).
* Jensen certificates: the boundary measure of such a disc, snapped
  onto K, together with sub-mean checks u(p) <= int u dnu <= max_K u
  over a test suite.
* Hessian-functional certificates: quadrature evaluation of the
  boundary-minus-center identity for the disc's Green current, with a
  positivity check on the minimal sub-mean test functions.

A failed search is reported as "no certificate found within budget";
exclusion evidence comes from explicit separating functions (the
quadratic minorant certificate), never from search failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .currents import GreenQuadrature, QuadForm, hessian_functional
from .discs import (
    BranchPointError,
    ConformalMinimalDisc,
    boundary_measure,
    check_immersed,
    spinor_disc,
)
from .polynomials import Poly3, Quadratic
from .psh import ScalarFunction, minimal_psh_defect

DEFAULT_NEAR_TOL = 0.05
DEFAULT_SEARCH_QUAD = 128
DEFAULT_REPORT_QUAD = 256

# Canonical unit spinors; their null directions span the axis planes
# and the diagonal ones, mirroring the canonical frame list.
_CANONICAL_SPINORS = np.array(
    [
        [1.0 + 0.0j, 0.0 + 0.0j],
        [0.0 + 0.0j, 1.0 + 0.0j],
        [1.0 + 0.0j, 1.0 + 0.0j],
        [1.0 + 0.0j, -1.0 + 0.0j],
        [1.0 + 0.0j, 0.0 + 1.0j],
        [1.0 + 0.0j, 0.0 - 1.0j],
    ]
)


class ObstacleIndicator:
    """-1 within delta of the generating cloud, 0 elsewhere."""

    def __init__(self, k_points, delta):
        self.k_points = np.asarray(k_points, dtype=float).reshape(-1, 3)
        if len(self.k_points) == 0:
            raise ValueError("indicator needs a nonempty cloud")
        self.delta = float(delta)
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        self.tree = cKDTree(self.k_points)

    def distance(self, pts):
        pts = np.asarray(pts, dtype=float)
        d, _ = self.tree.query(pts.reshape(-1, 3), workers=-1)
        return d.reshape(pts.shape[:-1])

    def __call__(self, pts):
        return np.where(self.distance(pts) <= self.delta, -1.0, 0.0)


def _boundary_points(surface, n_quad):
    t = 2.0 * np.pi * np.arange(n_quad) / n_quad
    return surface.boundary(t)


def poisson_functional(surface, phi, n_quad=DEFAULT_REPORT_QUAD):
    """Boundary average of the obstacle along the disc, an envelope upper bound.

    The average uses the uniform (trapezoidal) rule on the boundary
    circle; for any sub-mean minorant u <= phi this dominates u at the
    disc center, so small values certify small envelope values.
    """
    pts = _boundary_points(surface, n_quad)
    fn = phi.fn if isinstance(phi, ScalarFunction) else phi
    vals = np.asarray(fn(pts), dtype=float)
    if vals.shape != (n_quad,):
        vals = np.array([float(fn(p)) for p in pts])
    return float(vals.mean())


def near_fraction(surface, k_points, tol, n_quad=DEFAULT_REPORT_QUAD):
    """Fraction of boundary quadrature nodes within tol of the cloud."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    tree = k_points.tree if isinstance(k_points, ObstacleIndicator) else cKDTree(
        np.asarray(k_points, dtype=float).reshape(-1, 3)
    )
    pts = _boundary_points(surface, n_quad)
    d, _ = tree.query(pts, workers=-1)
    return float(np.mean(d <= tol))


def sup_norm_bound(surface, n_quad=DEFAULT_REPORT_QUAD):
    """max |x| over the closed disc, computed on the boundary.

    Components are harmonic, so |x| is subharmonic and attains its
    maximum on the boundary circle.
    """
    pts = _boundary_points(surface, n_quad)
    return float(np.linalg.norm(pts, axis=-1).max())


@dataclass
class DiscCertificateEntry:
    """One searched disc with the quantities the certificate reports."""

    disc: ConformalMinimalDisc
    poisson: float
    near_fraction: float
    near_tol: float
    sup_norm: float
    boundary_margin: float
    objective: float
    restarts: int
    evals_used: int
    seed: int

    def found(self, poisson_goal=-0.99, fraction_goal=0.99):
        return self.poisson <= poisson_goal and self.near_fraction >= fraction_goal


@dataclass
class DiscSequenceCertificate:
    """Per-stage disc certificates with tightening near tolerances."""

    p: np.ndarray
    entries: list = field(default_factory=list)


def _build_disc(params, degree, base):
    half = 2 * (degree + 1)
    rea = params[:half].reshape(degree + 1, 2)
    reb = params[half:].reshape(degree + 1, 2)
    a = rea[:, 0] + 1j * rea[:, 1]
    b = reb[:, 0] + 1j * reb[:, 1]
    lift = spinor_disc(a, b, base=base)
    return ConformalMinimalDisc(lift=lift)


def _initial_params(p, k_points, degree, restarts, rng, scale_base):
    """Deterministic restart schedule: canonical spinors at three scales,
    then random spinor polynomials with decaying coefficients."""
    inits = []
    scales = [0.5 * scale_base, scale_base, 1.5 * scale_base, 1e-2 * scale_base]
    for s in scales:
        root = np.sqrt(max(s, 1e-12))
        for a0, b0 in _CANONICAL_SPINORS:
            vec = np.zeros(4 * (degree + 1))
            vec[0] = (a0 * root).real
            vec[1] = (a0 * root).imag
            vec[2 * (degree + 1)] = (b0 * root).real
            vec[2 * (degree + 1) + 1] = (b0 * root).imag
            inits.append(vec)
    while len(inits) < restarts:
        decay = 1.0 / (1.0 + np.arange(degree + 1))
        root = np.sqrt(scale_base) * rng.lognormal(0.0, 0.5)
        a = rng.standard_normal((degree + 1, 2)) * decay[:, None]
        b = rng.standard_normal((degree + 1, 2)) * decay[:, None]
        vec = np.concatenate([a.ravel(), b.ravel()]) * root
        inits.append(vec)
    return inits[:restarts]


def _coordinate_descent(fun, x0, step0, budget):
    """Axis-aligned descent with shrinking steps; budget counts evaluations."""
    x = np.asarray(x0, dtype=float).copy()
    f = fun(x)
    evals = 1
    step = step0
    while evals < budget and step > 1e-4 * step0:
        improved = False
        for i in range(len(x)):
            if evals >= budget:
                break
            for s in (step, -step):
                trial = x.copy()
                trial[i] += s
                ft = fun(trial)
                evals += 1
                if ft < f - 1e-14:
                    x, f = trial, ft
                    improved = True
                    break
                if evals >= budget:
                    break
        if not improved:
            step *= 0.5
    return x, f, evals


def search_disc(
    p,
    k_points,
    omega,
    degree=2,
    restarts=64,
    seed=0,
    budget=25600,
    near_tol=DEFAULT_NEAR_TOL,
    penalty_weight=100.0,
    guide_weight=0.25,
    n_quad=DEFAULT_SEARCH_QUAD,
):
    """Seeded coordinate-descent search for a membership disc centered at p.

    The decision variables are the complex coefficients of the two
    spinor polynomials (degree <= given); the disc center is pinned to
    p exactly through the integration constant, and rotations are
    reachable because constant spinors parametrize every null
    direction.  The objective combines the obstacle boundary average
    with the miss fraction, a quadratic penalty on boundary points
    leaving the convex domain (for convex domains the boundary suffices:
    harmonic components put the whole image in the convex hull of its
    boundary), and a small quadratic distance-to-K guide that breaks
    ties on the indicator's flat plateaus.  Reported metrics never
    include the guide or penalty terms.
    """
    p = np.asarray(p, dtype=float).reshape(3)
    k_points = np.asarray(k_points, dtype=float).reshape(-1, 3)
    if not bool(np.asarray(omega.contains(p))):
        raise ValueError("query point must lie inside the domain")
    indicator = ObstacleIndicator(k_points, near_tol)
    rng = np.random.default_rng(seed)
    d_pk = float(indicator.distance(p))
    k_extent = float(np.linalg.norm(k_points - k_points.mean(axis=0), axis=1).max())
    scale_base = max(d_pk, 0.05 * max(k_extent, 1.0))
    base = p.astype(complex)
    t = 2.0 * np.pi * np.arange(n_quad) / n_quad
    guide_norm = max(scale_base, 1e-6) ** 2

    def objective(params):
        disc = _build_disc(params, degree, base)
        pts = disc.boundary(t)
        dist_k = indicator.distance(pts)
        pois = float(np.where(dist_k <= near_tol, -1.0, 0.0).mean())
        frac = float(np.mean(dist_k <= near_tol))
        outside = np.maximum(0.0, -np.asarray(omega.boundary_distance(pts), dtype=float))
        pen = penalty_weight * float((outside**2).mean())
        guide = guide_weight * float((dist_k**2).mean()) / guide_norm
        return pois + (1.0 - frac) + pen + guide

    per_restart = max(budget // max(restarts, 1), 8)
    inits = _initial_params(p, k_points, degree, restarts, rng, scale_base)
    best_x, best_f, used = None, np.inf, 0
    for x0 in inits:
        step0 = 0.25 * np.sqrt(scale_base)
        x, fval, evals = _coordinate_descent(objective, x0, step0, per_restart)
        used += evals
        if fval < best_f:
            best_x, best_f = x, fval
    disc = _build_disc(best_x, degree, base)
    bpts = _boundary_points(disc, DEFAULT_REPORT_QUAD)
    entry = DiscCertificateEntry(
        disc=disc,
        poisson=poisson_functional(disc, indicator, DEFAULT_REPORT_QUAD),
        near_fraction=near_fraction(disc, indicator, near_tol, DEFAULT_REPORT_QUAD),
        near_tol=near_tol,
        sup_norm=sup_norm_bound(disc),
        boundary_margin=float(np.min(omega.boundary_distance(bpts))),
        objective=float(best_f),
        restarts=restarts,
        evals_used=used,
        seed=seed,
    )
    return entry


def disc_sequence(p, k_points, omega, j_max=4, degree=2, restarts=64, seed=0, budget=25600):
    """Stage-j searches with near tolerance 1/j, collected in order."""
    cert = DiscSequenceCertificate(p=np.asarray(p, dtype=float).reshape(3))
    for j in range(1, j_max + 1):
        entry = search_disc(
            p,
            k_points,
            omega,
            degree=degree,
            restarts=restarts,
            seed=seed + j,
            budget=budget,
            near_tol=1.0 / j,
        )
        cert.entries.append(entry)
    return cert


def _suite_entries(test_suite):
    out = []
    for item in test_suite:
        if isinstance(item, tuple):
            name, fn = item[0], item[1]
            minimal = item[2] if len(item) > 2 else True
        else:
            fn = item
            name = getattr(item, "name", None) or getattr(item, "__name__", "test_fn")
            minimal = True
        out.append((name, fn, minimal))
    return out


def _eval_fn(fn, pts):
    call = fn.fn if isinstance(fn, ScalarFunction) else fn
    pts = np.asarray(pts, dtype=float)
    vals = np.asarray(call(pts), dtype=float)
    if vals.shape != pts.shape[:-1]:
        vals = np.array([float(call(q)) for q in pts.reshape(-1, 3)]).reshape(pts.shape[:-1])
    return vals


def default_test_suite():
    """Minimal sub-mean test functions used by the certificate checks.

    Linear functions (both signs), convex quadratics, and a rotational
    saddle whose smallest two Hessian eigenvalues sum to zero; every
    entry has nonnegative minimal defect, so the sub-mean inequality
    must hold along any conformal circle family.
    """
    e = np.eye(3)
    suite = []
    for i, nm in enumerate(["x1", "x2", "x3"]):
        suite.append((nm, Poly3.variable(i)))
        suite.append(("neg_" + nm, Poly3.constant(0.0) - Poly3.variable(i)))
    sq = lambda i: Poly3.variable(i) * Poly3.variable(i)
    suite.append(("abs_sq", sq(0) + sq(1) + sq(2)))
    suite.append(("rotational_saddle", sq(1) + sq(2) - sq(0) + Poly3.constant(1.0)))
    suite.append(("cyl_sq", sq(0) + sq(1)))
    return suite


@dataclass
class JensenCertificate:
    """Snapped boundary measure on K with its sub-mean check table."""

    p: np.ndarray
    atoms: np.ndarray
    weights: np.ndarray
    delta: float
    eps: float
    results: list
    max_snap_distance: float
    dropped_fraction: float
    all_ok: bool


def certify_jensen(p, discs, k_points, delta, test_suite=None, eps=1e-8, n_atoms=256):
    """Jensen measure on K from disc boundaries, checked against a suite.

    Boundary atoms within delta of K are snapped to their nearest cloud
    point (so the measure is supported exactly on K); farther atoms are
    dropped and the weights renormalized.  For each test function u the
    chain u(p) <= int u dnu <= max_K u is evaluated with tolerance eps.
    """
    p = np.asarray(p, dtype=float).reshape(3)
    k_points = np.asarray(k_points, dtype=float).reshape(-1, 3)
    if not isinstance(discs, (list, tuple)):
        discs = [discs]
    tree = cKDTree(k_points)
    atom_list, weight_list = [], []
    for d in discs:
        disc = d.disc if isinstance(d, DiscCertificateEntry) else d
        atoms, weights = boundary_measure(disc, n_atoms=n_atoms)
        atom_list.append(atoms)
        weight_list.append(weights / len(discs))
    atoms = np.concatenate(atom_list, axis=0)
    weights = np.concatenate(weight_list)
    dist, idx = tree.query(atoms, workers=-1)
    keep = dist <= delta
    if not keep.any():
        raise ValueError("no boundary atoms within delta of the cloud")
    snapped = k_points[idx[keep]]
    kept_w = weights[keep]
    kept_w = kept_w / kept_w.sum()
    suite = _suite_entries(test_suite if test_suite is not None else default_test_suite())
    results = []
    all_ok = True
    for name, fn, minimal in suite:
        up = float(_eval_fn(fn, p))
        integral = float(np.dot(kept_w, _eval_fn(fn, snapped)))
        kmax = float(_eval_fn(fn, k_points).max())
        ok = (up <= integral + eps) and (integral <= kmax + eps)
        all_ok &= ok
        results.append(
            {
                "name": name,
                "value_at_p": up,
                "integral": integral,
                "max_on_k": kmax,
                "minimal_psh": bool(minimal),
                "ok": bool(ok),
            }
        )
    return JensenCertificate(
        p=p,
        atoms=snapped,
        weights=kept_w,
        delta=float(delta),
        eps=float(eps),
        results=results,
        max_snap_distance=float(dist[keep].max()),
        dropped_fraction=float(1.0 - keep.mean()),
        all_ok=bool(all_ok),
    )


@dataclass
class HessianFunctionalCertificate:
    """Boundary-minus-center identity table for the disc's Green current."""

    p: np.ndarray
    rows: list
    max_residual: float
    all_ok: bool


def _hessian_quadform(fn):
    if isinstance(fn, Poly3):
        if fn.degree > 2:
            raise ValueError("hessian certificate test functions must be quadratic")
        return QuadForm.constant(fn.hessian_at(np.zeros(3)))
    if isinstance(fn, Quadratic):
        return QuadForm.constant(2.0 * fn.A)
    if isinstance(fn, ScalarFunction):
        return QuadForm.constant(np.asarray(fn.hessian_fn(np.zeros(3)), dtype=float))
    raise TypeError("need a polynomial, quadratic, or ScalarFunction with a Hessian")


def hessian_certificate(
    p,
    disc,
    k_points,
    test_suite=None,
    quadrature: Optional[GreenQuadrature] = None,
    n_boundary=1024,
    eps=1e-6,
    positivity_tol=1e-10,
):
    """Check T(Hess u) = boundary mean - center value on a suite of quadratics.

    T is the Green current of the disc paired with the constant Hessian
    form; the identity is exact for immersed conformal discs, so the
    recorded residuals measure only quadrature error.  Minimal sub-mean
    suite members additionally get a positivity check.
    """
    p = np.asarray(p, dtype=float).reshape(3)
    entry_disc = disc.disc if isinstance(disc, DiscCertificateEntry) else disc
    if np.linalg.norm(entry_disc.center() - p) > 1e-10:
        raise ValueError("disc must be centered at the query point")
    check_immersed(entry_disc)
    quadrature = quadrature or GreenQuadrature.build(64, 256)
    suite = _suite_entries(test_suite if test_suite is not None else default_test_suite())
    t = 2.0 * np.pi * np.arange(n_boundary) / n_boundary
    bpts = entry_disc.boundary(t)
    rows = []
    max_residual = 0.0
    all_ok = True
    for name, fn, minimal in suite:
        h = _hessian_quadform(fn)
        functional = hessian_functional(entry_disc, h, quadrature)
        measure_side = float(_eval_fn(fn, bpts).mean() - _eval_fn(fn, p))
        residual = abs(functional - measure_side)
        max_residual = max(max_residual, residual)
        positive_ok = (functional >= -positivity_tol) if minimal else True
        ok = residual <= eps and positive_ok
        all_ok &= ok
        rows.append(
            {
                "name": name,
                "functional": float(functional),
                "measure_side": measure_side,
                "residual": float(residual),
                "minimal_psh": bool(minimal),
                "positive_ok": bool(positive_ok),
                "ok": bool(ok),
            }
        )
    return HessianFunctionalCertificate(
        p=p, rows=rows, max_residual=float(max_residual), all_ok=bool(all_ok)
    )


@dataclass
class QuadraticMinorantCertificate:
    """Exclusion evidence: an explicit minimal sub-mean minorant of the obstacle."""

    v: Quadratic
    value_at_p: float
    defect: float
    obstacle_margin: float
    domain_margin: float
    lipschitz_bound: float
    ok: bool


def quadratic_minorant_certificate(
    v: Quadratic,
    p,
    k_points,
    delta,
    omega,
    n_sphere=2048,
    tol=1e-9,
):
    """Verify a quadratic v is a valid minorant and report its value at p.

    Checks, with explicit margins: the sum of the two smallest Hessian
    eigenvalues is nonnegative (so v satisfies the sub-mean inequality
    on every conformal circle); v <= -1 on the delta-thickening of K
    (evaluated on K and padded by a Lipschitz bound over the
    thickening); v <= 0 on the domain (evaluated on boundary samples
    and the interior critical point when it lies inside).  When all
    checks pass, every sub-mean envelope of the -1/0 obstacle dominates
    v, so v(p) lower-bounds the envelope at p.
    """
    p = np.asarray(p, dtype=float).reshape(3)
    k_points = np.asarray(k_points, dtype=float).reshape(-1, 3)
    w = np.linalg.eigvalsh(2.0 * v.A)
    defect = float(w[0] + w[1])
    # Local Lipschitz bound over the thickening: gradient at the cloud
    # plus curvature growth across the delta ball.  Rigorous because the
    # gradient of a quadratic is affine.
    grad_k = 2.0 * k_points @ v.A + v.b
    lip = float(np.linalg.norm(grad_k, axis=1).max() + np.abs(w).max() * delta)
    on_k = _eval_quadratic(v, k_points)
    obstacle_margin = float((-1.0 - (on_k + lip * delta)).min())
    # Domain check: boundary samples plus the interior stationary point.
    sphere = _fibonacci_sphere(n_sphere)
    if hasattr(omega, "center") and hasattr(omega, "radius"):
        bpts = omega.center + omega.radius * sphere
    else:
        box = omega.bounding_box()
        bpts = np.array(np.meshgrid(*zip(box.lo, box.hi), indexing="ij")).reshape(3, -1).T
    vals = [_eval_quadratic(v, bpts).max()]
    try:
        crit = np.linalg.solve(2.0 * v.A, -v.b)
        if bool(np.asarray(omega.contains(crit))):
            vals.append(float(_eval_quadratic(v, crit)))
    except np.linalg.LinAlgError:
        pass
    domain_margin = float(-max(vals))
    ok = defect >= -tol and obstacle_margin >= -tol and domain_margin >= -tol
    return QuadraticMinorantCertificate(
        v=v,
        value_at_p=float(_eval_quadratic(v, p)),
        defect=defect,
        obstacle_margin=obstacle_margin,
        domain_margin=domain_margin,
        lipschitz_bound=lip,
        ok=bool(ok),
    )


def _eval_quadratic(v: Quadratic, pts):
    pts = np.asarray(pts, dtype=float)
    flat = pts.reshape(-1, 3)
    vals = np.einsum("ni,ij,nj->n", flat, v.A, flat) + flat @ v.b + v.c
    return vals.reshape(pts.shape[:-1])


def _fibonacci_sphere(n):
    i = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * i / n)
    golden = np.pi * (1.0 + np.sqrt(5.0))
    theta = golden * i
    return np.stack(
        [np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)], axis=-1
    )


def two_point_certificate(epsilon=0.05, alpha=0.2):
    """The explicit separating quadratic for the two-point obstacle.

    For K = {(-1,0,0),(+1,0,0)} thickened by epsilon, the function
    v(x) = alpha (x2^2 + x3^2 - x1^2 + 1 - delta') - 1 with
    delta' = 3 epsilon + 2 epsilon^2 lies below the obstacle, is a
    sub-mean minorant, and stays nonpositive on the radius-2 ball, so
    the envelope at the origin is at least v(0).
    """
    dprime = 3.0 * epsilon + 2.0 * epsilon * epsilon
    a = np.diag([-alpha, alpha, alpha])
    b = np.zeros(3)
    c = alpha * (1.0 - dprime) - 1.0
    return Quadratic(A=a, b=b, c=c)
