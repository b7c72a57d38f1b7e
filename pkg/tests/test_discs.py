"""Loops, harmonic conjugates, spinor discs, and the disc catalog."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hullkit.discs import (
    BoundaryLoop,
    BranchPointError,
    ConformalMinimalDisc,
    analytic_completion,
    boundary_measure,
    catalog,
    check_immersed,
    conformality_residual,
    harmonic_conjugate,
    harmonic_extension,
    nullity_residual,
    rescale_domain,
    spinor_disc,
)

CONJ_TOL = 1e-12
NULL_TOL = 1e-12
CONF_TOL = 1e-10


def _loop_from_fn(fn, m=256, band=32):
    t = 2.0 * np.pi * np.arange(m) / m
    return BoundaryLoop.from_samples(fn(t)[:, None], band_limit=band)


def test_harmonic_conjugate_of_cosine_is_sine():
    loop = _loop_from_fn(np.cos)
    conj = harmonic_conjugate(loop)
    t = np.linspace(0.0, 2.0 * np.pi, 97)
    assert np.abs(conj(t)[:, 0] - np.sin(t)).max() <= CONJ_TOL


def test_harmonic_conjugate_kills_mean():
    loop = _loop_from_fn(lambda t: 2.0 + np.cos(3 * t) - 0.5 * np.sin(t))
    conj = harmonic_conjugate(loop)
    assert np.abs(conj.mean()).max() <= CONJ_TOL


def test_analytic_completion_center_and_boundary():
    loop = _loop_from_fn(lambda t: 1.5 + np.cos(t) + 0.25 * np.sin(2 * t))
    disc = analytic_completion(loop)
    assert np.abs(disc.center() - 1.5).max() <= CONJ_TOL
    t = np.linspace(0.0, 2.0 * np.pi, 64)
    assert np.abs(disc.boundary(t).real[:, 0] - loop(t)[:, 0]).max() <= 1e-10


def test_harmonic_extension_interpolates_poisson():
    # harmonic extension of cos(2t) is Re zeta^2
    loop = _loop_from_fn(lambda t: np.cos(2 * t))
    ext = harmonic_extension(loop)
    zeta = np.array([0.3 + 0.2j, -0.5j, 0.1 + 0.0j])
    expect = (zeta**2).real
    assert np.abs(ext(zeta)[:, 0].real - expect).max() <= 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_loop_translation_moves_mean_exactly(seed):
    gen = np.random.default_rng(seed)
    coeffs = np.zeros((3, 9), dtype=complex)
    pos = gen.standard_normal((3, 4)) + 1j * gen.standard_normal((3, 4))
    coeffs[:, 5:] = pos
    coeffs[:, :4] = np.conj(pos[:, ::-1])
    coeffs[:, 4] = gen.standard_normal(3)
    loop = BoundaryLoop(coeffs)
    target = gen.standard_normal(3)
    moved = loop.translated(target - loop.mean())
    assert np.abs(moved.mean() - target).max() <= 1e-12


def test_spinor_disc_is_null_at_coefficient_level():
    disc = spinor_disc([1.0, 0.2j], [0.1, 1.0, -0.3])
    assert disc.coefficient_nullity() <= NULL_TOL
    assert nullity_residual(disc) <= NULL_TOL


def test_spinor_disc_base_point():
    base = np.array([0.5, -1.0, 2.0])
    disc = spinor_disc([1.0], [0.0, 1.0], base=base)
    assert np.allclose(ConformalMinimalDisc(disc).center(), base)


def test_catalog_flat_unit_circle_boundary():
    disc = catalog("flat")
    t = np.linspace(0.0, 2.0 * np.pi, 32)
    b = disc.boundary(t)
    assert np.abs(np.linalg.norm(b[:, :2], axis=1) - 1.0).max() <= 1e-12
    assert np.abs(b[:, 2]).max() <= 1e-12


def test_catalog_discs_conformal_and_immersed():
    for name in ("flat", "enneper"):
        disc = catalog(name)
        assert conformality_residual(disc) <= CONF_TOL
        check_immersed(disc)
    rnd = catalog("random-spinor", degree=3, seed=5)
    assert conformality_residual(rnd) <= CONF_TOL


def test_conformality_residual_oracle_for_stretched_plane():
    # X(u, v) = (u, 2v, 0): defect |1 - 4| / 4 = 3/4
    class Stretched:
        def partials(self, zeta):
            zeta = np.asarray(zeta, dtype=complex)
            xu = np.broadcast_to(np.array([1.0, 0.0, 0.0]), zeta.shape + (3,))
            xv = np.broadcast_to(np.array([0.0, 2.0, 0.0]), zeta.shape + (3,))
            return xu, xv

    assert abs(conformality_residual(Stretched()) - 0.75) <= 1e-12


def test_enneper_rescale_shrinks_derivative():
    full = spinor_disc([1.0], [0.0, 1.0])
    half = rescale_domain(full, 0.5)
    # derivative at zeta of rescaled = rho * f'(rho zeta)
    z = 0.4 + 0.2j
    d_full = full.derivative()(np.array([0.5 * z]))
    d_half = half.derivative()(np.array([z]))
    assert np.abs(d_half - 0.5 * d_full).max() <= 1e-12


def test_branch_point_detected():
    # a = zeta, b = zeta shares the interior zero at 0: derivative vanishes
    with pytest.warns(UserWarning):
        disc = spinor_disc([0.0, 1.0], [0.0, 1.0])
    with pytest.raises(BranchPointError):
        check_immersed(ConformalMinimalDisc(disc))


def test_boundary_measure_uniform_weights():
    disc = catalog("flat")
    atoms, weights = boundary_measure(disc, n_atoms=64)
    assert atoms.shape == (64, 3)
    assert np.allclose(weights, 1.0 / 64)
    assert abs(weights.sum() - 1.0) <= 1e-14
