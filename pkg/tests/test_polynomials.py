"""Exact polynomial calculus: derivatives, composition, bivariate ops."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hullkit.discs import catalog
from hullkit.polynomials import (
    Poly3,
    Quadratic,
    bivariate_eval,
    bivariate_laplacian,
)

DERIV_TOL = 1e-12
SPECTRAL_TOL = 1e-10


def test_hand_derived_gradient_and_hessian():
    # u = x1^2 x2 + 3 x2 x3
    x1, x2, x3 = (Poly3.variable(a) for a in range(3))
    u = x1 * x1 * x2 + 3.0 * x2 * x3
    p = np.array([1.5, -2.0, 0.5])
    grad = u.gradient_at(p)
    expect_grad = np.array([2 * 1.5 * -2.0, 1.5**2 + 3 * 0.5, 3 * -2.0])
    assert np.abs(grad - expect_grad).max() <= DERIV_TOL
    hess = u.hessian_at(p)
    expect_hess = np.array([[2 * -2.0, 2 * 1.5, 0.0], [2 * 1.5, 0.0, 3.0], [0.0, 3.0, 0.0]])
    assert np.abs(hess - expect_hess).max() <= DERIV_TOL


def test_polynomial_arithmetic_canonicalizes():
    x1 = Poly3.variable(0)
    p = x1 + x1 - 2.0 * x1
    assert p.terms == ()
    assert p.degree == 0
    assert p(np.array([3.0, 1.0, 1.0])) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_gradient_matches_finite_differences(seed):
    gen = np.random.default_rng(seed)
    terms = {}
    for _ in range(5):
        key = tuple(int(v) for v in gen.integers(0, 3, size=3))
        terms[key] = terms.get(key, 0.0) + float(gen.standard_normal())
    u = Poly3.from_dict(terms)
    p = gen.uniform(-1.0, 1.0, size=3)
    h = 1e-6
    for axis in range(3):
        e = np.zeros(3)
        e[axis] = h
        fd = (u(p + e) - u(p - e)) / (2 * h)
        assert abs(u.gradient_at(p)[axis] - fd) <= 1e-5 * max(1.0, abs(fd))


def test_quadratic_symmetrizes_and_validates():
    a = np.array([[1.0, 0.2, 0.0], [0.2, 2.0, 0.0], [0.0, 0.0, 3.0]])
    q = Quadratic(A=a, b=np.zeros(3), c=1.0)
    assert np.allclose(q.A, q.A.T)
    with pytest.raises(ValueError):
        Quadratic(A=np.array([[0.0, 1.0], [0.0, 0.0]]), b=np.zeros(2), c=0.0)


def test_quadratic_hessian_is_twice_matrix():
    q = Quadratic(A=np.diag([1.0, -2.0, 0.5]), b=np.ones(3), c=0.0)
    h = q.hessian_at(np.zeros(3))
    assert np.allclose(h, 2.0 * q.A)


def test_composition_reproduces_values_on_disc():
    # spectral composition of u with a disc lift agrees with direct eval
    disc = catalog("enneper")
    u = Poly3.from_dict({(2, 0, 0): 1.0, (0, 1, 1): -2.0, (1, 0, 0): 0.5})
    coeffs = u.compose_with_coeffs(disc.lift.coeffs)
    gen = np.random.default_rng(2)
    zeta = gen.uniform(-0.7, 0.7, 12) + 1j * gen.uniform(-0.7, 0.7, 12)
    direct = u(disc(zeta))
    spectral = bivariate_eval(coeffs, zeta).real
    assert np.abs(direct - spectral).max() <= SPECTRAL_TOL


def test_bivariate_laplacian_of_zeta_conj_zeta():
    # h = zeta * conj(zeta) = |zeta|^2 has Laplacian 4
    c = np.zeros((2, 2), dtype=complex)
    c[1, 1] = 1.0
    lap = bivariate_laplacian(c)
    assert lap.shape == (1, 1)
    assert abs(lap[0, 0] - 4.0) <= 1e-15


def test_spectral_laplacian_matches_fd_on_disc():
    disc = catalog("enneper")
    u = Poly3.from_dict({(2, 0, 0): 1.0, (0, 2, 0): 1.0, (0, 0, 2): 1.0})
    comp = u.compose_with_coeffs(disc.lift.coeffs)
    lap_coeffs = bivariate_laplacian(comp)
    zeta = np.array([0.3 + 0.1j, -0.2 + 0.4j])
    lap_spec = bivariate_eval(lap_coeffs, zeta).real
    h = 1e-4
    for i, z in enumerate(zeta):
        fd = (
            u(disc(z + h)) + u(disc(z - h)) + u(disc(z + 1j * h)) + u(disc(z - 1j * h)) - 4 * u(disc(z))
        ) / h**2
        assert abs(lap_spec[i] - fd) <= 1e-5 * max(1.0, abs(fd))
