"""Membership and exclusion certificates: discs, measures, minorants."""

import numpy as np
import pytest

from hullkit import fixtures
from hullkit.certificates import (
    certify_jensen,
    hessian_certificate,
    near_fraction,
    poisson_functional,
    quadratic_minorant_certificate,
    search_disc,
    sup_norm_bound,
    two_point_certificate,
)
from hullkit.discs import catalog
from hullkit.polynomials import Quadratic

JENSEN_EPS = 1e-8
HESS_EPS = 1e-6
SEARCH_RESTARTS = 8
SEARCH_BUDGET = 6400


def _obstacle(pts, k_points, tol=0.05):
    from scipy.spatial import cKDTree

    d, _ = cKDTree(k_points).query(np.atleast_2d(pts), workers=-1)
    return np.where(d <= tol, -1.0, 0.0)


def test_flat_disc_reports_on_circle_obstacle(circle_k):
    flat = catalog("flat")
    pois = poisson_functional(flat, lambda x: _obstacle(x, circle_k))
    frac = near_fraction(flat, circle_k, tol=0.05)
    print(f"flat disc poisson {pois:.6f} near fraction {frac:.4f}")
    assert pois == -1.0
    assert frac == 1.0
    assert abs(sup_norm_bound(flat) - 1.0) <= 1e-12


def test_near_fraction_rejects_bad_tol(circle_k):
    with pytest.raises(ValueError):
        near_fraction(catalog("flat"), circle_k, tol=0.0)


def test_search_disc_recovers_circle_membership(circle_k, omega):
    entry = search_disc(
        np.zeros(3),
        circle_k,
        omega,
        degree=1,
        restarts=SEARCH_RESTARTS,
        seed=0,
        budget=SEARCH_BUDGET,
    )
    print(
        f"searched disc poisson {entry.poisson:.6f} "
        f"near fraction {entry.near_fraction:.4f} evals {entry.evals_used}"
    )
    assert entry.found()
    assert entry.boundary_margin >= -1e-9


def test_search_disc_deterministic(circle_k, omega):
    kw = dict(degree=1, restarts=4, seed=3, budget=3200)
    e1 = search_disc(np.zeros(3), circle_k, omega, **kw)
    e2 = search_disc(np.zeros(3), circle_k, omega, **kw)
    assert e1.objective == e2.objective
    assert np.array_equal(e1.disc.lift.coeffs, e2.disc.lift.coeffs)


def test_search_disc_rejects_outside_query(circle_k, omega):
    with pytest.raises(ValueError):
        search_disc(np.array([5.0, 0.0, 0.0]), circle_k, omega)


def test_jensen_certificate_on_exact_flat_disc(circle_k):
    cert = certify_jensen(np.zeros(3), catalog("flat"), circle_k, delta=0.1, eps=JENSEN_EPS)
    assert cert.all_ok
    assert cert.max_snap_distance <= 1e-12
    assert cert.dropped_fraction == 0.0
    assert abs(cert.weights.sum() - 1.0) <= 1e-12
    by_name = {row["name"]: row for row in cert.results}
    # the rotational saddle integrates to exactly 1 over the circle measure
    saddle = by_name["rotational_saddle"]
    print(f"saddle integral {saddle['integral']:.12f} value at p {saddle['value_at_p']}")
    assert abs(saddle["integral"] - 1.0) <= JENSEN_EPS
    assert saddle["value_at_p"] <= saddle["integral"] + JENSEN_EPS


def test_jensen_rejects_far_disc(two_point_k):
    # a flat disc far from the two-point cloud leaves no atoms to snap
    far = catalog("flat", center=(0.0, 0.0, 10.0))
    with pytest.raises(ValueError):
        certify_jensen(np.array([0.0, 0.0, 10.0]), far, two_point_k, delta=0.1)


def test_hessian_certificate_exact_identity(circle_k, quad64):
    cert = hessian_certificate(np.zeros(3), catalog("flat"), circle_k, quadrature=quad64)
    print(f"hessian certificate max residual {cert.max_residual:.3e}")
    assert cert.all_ok
    assert cert.max_residual <= HESS_EPS
    for row in cert.rows:
        if row["minimal_psh"]:
            assert row["positive_ok"]


def test_hessian_certificate_requires_centered_disc(circle_k):
    with pytest.raises(ValueError):
        hessian_certificate(np.array([0.5, 0.0, 0.0]), catalog("flat"), circle_k)


def test_two_point_minorant_certificate(two_point_k):
    v = two_point_certificate(epsilon=0.05, alpha=0.2)
    cert = quadratic_minorant_certificate(
        v, np.zeros(3), two_point_k, delta=0.05, omega=fixtures.standard_ball()
    )
    print(
        f"minorant v(0) = {cert.value_at_p:.6f} obstacle margin {cert.obstacle_margin:.6f} "
        f"domain margin {cert.domain_margin:.6f} defect {cert.defect:.3e}"
    )
    assert cert.ok
    assert abs(cert.value_at_p - (-0.831)) <= 1e-12
    assert abs(cert.obstacle_margin - 0.010) <= 1e-6
    assert abs(cert.domain_margin - 0.031) <= 1e-3
    assert abs(cert.defect) <= 1e-12


def test_minorant_rejects_positive_quadratic(two_point_k):
    bad = Quadratic(A=np.eye(3), b=np.zeros(3), c=0.0)
    cert = quadratic_minorant_certificate(
        bad, np.zeros(3), two_point_k, delta=0.05, omega=fixtures.standard_ball()
    )
    assert not cert.ok
    assert cert.domain_margin < 0.0


def test_minorant_rejects_concave_quadratic(two_point_k):
    # sum of two smallest Hessian eigenvalues is negative: not sub-mean
    bad = Quadratic(A=np.diag([-1.0, -1.0, 0.0]), b=np.zeros(3), c=-2.0)
    cert = quadratic_minorant_certificate(
        bad, np.zeros(3), two_point_k, delta=0.05, omega=fixtures.standard_ball()
    )
    assert not cert.ok
    assert cert.defect < 0.0
