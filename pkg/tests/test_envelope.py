"""Grid machinery and the monotone disc-averaging envelope iteration."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hullkit import fixtures
from hullkit.envelope import (
    EnvelopeConfig,
    Grid3,
    bs_iterate,
    bs_step_minimal,
    extremal_hull_field,
    hausdorff_distance,
    radii_schedule,
    sample_frames,
)
from hullkit.geometry import Ball

INTERP_TOL = 1e-12
AFFINE_TOL = 1e-10

SMALL_CFG = EnvelopeConfig(frames_per_node=8, n_quad=8, max_sweeps=30, tol=1e-3, seed=0)


def _grid_from_fn(fn, n=9, lo=-2.0, hi=2.0):
    grid = Grid3(
        lo=np.full(3, lo),
        hi=np.full(3, hi),
        values=np.zeros((n, n, n)),
        mask=np.ones((n, n, n), dtype=bool),
    )
    pts = grid.points()
    grid.values = fn(pts[..., 0], pts[..., 1], pts[..., 2])
    return grid


def test_trilinear_interpolation_exact_on_multilinear():
    grid = _grid_from_fn(lambda x, y, z: 2.0 + x - 3.0 * y + 0.5 * x * y * z)
    gen = np.random.default_rng(3)
    pts = gen.uniform(-2.0, 2.0, (200, 3))
    want = 2.0 + pts[:, 0] - 3.0 * pts[:, 1] + 0.5 * pts.prod(axis=1)
    got = grid.interpolate(pts)
    assert np.abs(got - want).max() <= INTERP_TOL


def test_interpolation_clamps_outside_box():
    grid = _grid_from_fn(lambda x, y, z: x)
    got = grid.interpolate(np.array([[5.0, 0.0, 0.0], [-5.0, 0.0, 0.0]]))
    assert np.allclose(got, [2.0, -2.0])


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid3(lo=np.zeros(3), hi=np.ones(3), values=np.zeros((3, 3)), mask=np.ones((3, 3), dtype=bool))
    with pytest.raises(ValueError):
        Grid3(lo=np.ones(3), hi=np.zeros(3), values=np.zeros((3, 3, 3)), mask=np.ones((3, 3, 3), dtype=bool))


def test_radii_schedule_geometric_and_capped():
    cfg = EnvelopeConfig()
    radii = radii_schedule(cfg, h=0.1, max_admissible=1.0)
    assert np.allclose(radii, [0.2, 0.4, 0.8])
    explicit = radii_schedule(EnvelopeConfig(radii=(2.0, 3.0)), h=0.1, max_admissible=1.0)
    assert np.allclose(explicit, [0.2, 0.3])


def test_sample_frames_unit_and_deterministic():
    f1 = sample_frames(12, seed=4)
    f2 = sample_frames(12, seed=4)
    assert f1.shape == (12, 2, 3)
    assert np.array_equal(f1, f2)
    norms = np.linalg.norm(f1, axis=2)
    dots = (f1[:, 0] * f1[:, 1]).sum(axis=1)
    assert np.abs(norms - 1.0).max() <= 1e-12
    assert np.abs(dots).max() <= 1e-12


def test_sweep_is_monotone_decreasing():
    ball = Ball(np.zeros(3), 2.0)
    grid = _grid_from_fn(lambda x, y, z: np.hypot(x, y) - 1.0, n=13)
    out = bs_step_minimal(grid, ball, SMALL_CFG)
    floored = np.maximum(grid.values, SMALL_CFG.floor)
    assert (out.values <= floored + 1e-12).all()


def test_affine_fields_are_fixed_points():
    # circle means of affine functions equal center values, and the
    # trilinear interpolant of an affine field is exact
    ball = Ball(np.zeros(3), 2.0)
    grid = _grid_from_fn(lambda x, y, z: 0.3 * x - 0.7 * y + 0.1 * z - 0.5, n=13)
    out = bs_step_minimal(grid, ball, SMALL_CFG)
    moved = np.abs(out.values - grid.values)[grid.mask].max()
    print(f"affine sweep movement {moved:.3e}")
    assert moved <= AFFINE_TOL


def test_iterate_reports_monotone_residuals():
    ball = Ball(np.zeros(3), 2.0)
    grid = _grid_from_fn(lambda x, y, z: np.where(np.hypot(x, y) < 0.5, -1.0, 0.0), n=13)
    field, info = bs_iterate(grid, ball, SMALL_CFG, check_monotone=True)
    assert info.sweeps == len(info.residuals)
    assert (field.values <= np.maximum(grid.values, SMALL_CFG.floor) + 1e-12).all()
    assert (field.values >= -1.0 - 1e-12).all()


def test_hull_result_structure_two_points():
    res = extremal_hull_field(
        fixtures.two_point_set(),
        fixtures.standard_ball(),
        resolution=17,
        delta=0.2,
        cfg=EnvelopeConfig(frames_per_node=8, n_quad=8, max_sweeps=25, tol=5e-3, seed=0),
        threshold=0.1,
    )
    assert res.diagnostics["k_nodes_member"]
    assert res.diagnostics["members_in_hull_slack"]
    assert res.diagnostics["n_members"] == len(res.member_points)
    assert res.member_points.shape[1] == 3
    assert (res.grid.values >= -1.0 - 1e-12).all()
    # members carry the generating set and stay near the segment axis
    d_axis = np.linalg.norm(res.member_points[:, 1:], axis=1)
    assert d_axis.max() <= res.diagnostics["support_slack"] + res.delta + 1e-12


def test_hull_field_rejects_bad_inputs():
    ball = fixtures.standard_ball()
    with pytest.raises(ValueError):
        extremal_hull_field(np.zeros((0, 3)), ball, resolution=9)
    with pytest.raises(ValueError):
        extremal_hull_field(np.array([[10.0, 0.0, 0.0]]), ball, resolution=9)


def test_hausdorff_distance_oracle():
    a = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
    b = np.array([[0.0, 0.5, 0.0]])
    # sup over a of dist to b: max(0.5, sqrt(1.25)); sup over b: 0.5
    assert abs(hausdorff_distance(a, b) - np.sqrt(1.25)) <= 1e-15
    assert hausdorff_distance(a, a) == 0.0
    with pytest.raises(ValueError):
        hausdorff_distance(a, np.zeros((0, 3)))


@settings(max_examples=10, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_sweep_preserves_ordering(seed):
    # comparison principle: pointwise-ordered inputs stay ordered
    ball = Ball(np.zeros(3), 2.0)
    gen = np.random.default_rng(seed)
    base = _grid_from_fn(lambda x, y, z: np.hypot(x, y) - 1.0, n=9)
    lower = base.copy_with(base.values - gen.uniform(0.0, 0.5, base.shape))
    out_hi = bs_step_minimal(base, ball, SMALL_CFG)
    out_lo = bs_step_minimal(lower, ball, SMALL_CFG)
    assert (out_lo.values <= out_hi.values + 1e-12).all()
