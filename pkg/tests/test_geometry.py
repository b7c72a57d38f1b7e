"""Null directions, conformal frames, and convex support machinery."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hullkit.geometry import (
    Ball,
    Box,
    ConvexSupport,
    fibonacci_sphere,
    null_residual,
    null_to_frame,
    sample_null_directions,
    spinor_to_null,
)

NULL_TOL = 1e-12
FRAME_TOL = 1e-10

finite = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(finite, finite, finite, finite)
def test_spinor_map_lands_on_quadric(ar, ai, br, bi):
    theta = spinor_to_null(complex(ar, ai), complex(br, bi))
    assert null_residual(theta) <= NULL_TOL * max(1.0, np.abs(theta).max() ** 2)


def test_spinor_map_example():
    # a=1, b=0 maps to (1, i, 0)
    theta = spinor_to_null(1.0, 0.0)
    assert np.allclose(theta, [1.0, 1.0j, 0.0])


def test_sampled_directions_are_null_and_deterministic():
    d1 = sample_null_directions(128, seed=7)
    d2 = sample_null_directions(128, seed=7)
    assert np.array_equal(d1, d2)
    sq = (d1 * d1).sum(axis=1)
    assert np.abs(sq).max() <= 1e-10


def test_null_to_frame_orthogonal_equal_norm():
    thetas = sample_null_directions(32, seed=3)
    for theta in thetas:
        frame = null_to_frame(theta)
        v1, v2 = frame.v1, frame.v2
        scale = max(v1 @ v1, v2 @ v2)
        assert abs(v1 @ v1 - v2 @ v2) <= FRAME_TOL * scale
        assert abs(v1 @ v2) <= FRAME_TOL * scale
        u = frame.unit()
        assert abs(u.v1 @ u.v1 - 1.0) <= FRAME_TOL


def test_fibonacci_sphere_unit_norm():
    pts = fibonacci_sphere(500)
    assert pts.shape == (500, 3)
    assert np.abs(np.linalg.norm(pts, axis=1) - 1.0).max() <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_convex_support_contains_convex_combinations(seed):
    gen = np.random.default_rng(seed)
    pts = gen.standard_normal((12, 3))
    support = ConvexSupport.from_points(pts)
    w = gen.uniform(size=12)
    w /= w.sum()
    combo = w @ pts
    assert support.gap(combo[None, :])[0] <= 1e-9


def test_convex_support_gap_positive_outside():
    pts = np.eye(3)
    support = ConvexSupport.from_points(pts)
    outside = np.array([[2.0, 0.0, 0.0]])
    assert support.gap(outside)[0] >= 0.99


def test_ball_membership_and_boundary_distance():
    ball = Ball(center=np.zeros(3), radius=2.0)
    assert ball.contains(np.array([1.9, 0.0, 0.0]))
    assert not ball.contains(np.array([2.1, 0.0, 0.0]))
    d = ball.boundary_distance(np.array([[1.0, 0.0, 0.0]]))
    assert abs(d[0] - 1.0) <= 1e-12


def test_box_bounding_and_membership():
    box = Box(lo=-np.ones(3), hi=np.ones(3))
    assert box.contains(np.zeros(3))
    assert not box.contains(np.array([0.0, 0.0, 1.5]))
    bb = box.bounding_box()
    assert np.allclose(bb.lo, -1.0) and np.allclose(bb.hi, 1.0)


def test_equality_direction_is_null():
    s = np.sqrt(2.0) / 2.0
    theta = np.array([1j * s, 1j * s, 1.0])
    assert null_residual(theta) <= 1e-15
