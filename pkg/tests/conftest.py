"""Shared fixtures: quadratures, canonical point sets, disc suites."""

import numpy as np
import pytest

from hullkit import fixtures
from hullkit.currents import GreenQuadrature


@pytest.fixture(scope="session")
def quad64():
    return GreenQuadrature.build(64, 256)


@pytest.fixture(scope="session")
def circle_k():
    return fixtures.circle_points()


@pytest.fixture(scope="session")
def two_point_k():
    return fixtures.two_point_set()


@pytest.fixture(scope="session")
def omega():
    return fixtures.standard_ball()


@pytest.fixture(scope="session")
def disc_suite():
    return fixtures.disc_suite()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
