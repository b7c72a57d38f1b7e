"""Canonical point sets, domains, discs, and probe suites.

Every experiment and test in the package draws its inputs from here so
the circle and two-point configurations, the ambient ball, the disc
catalog selection, and the polynomial probes are identical everywhere.
"""

from __future__ import annotations

import numpy as np

from .discs import catalog
from .geometry import Ball
from .polynomials import Poly3, Quadratic
from .psh import ScalarFunction

CIRCLE_SAMPLES = 256
DOMAIN_RADIUS = 2.0


def circle_points(n=CIRCLE_SAMPLES):
    """Unit circle in the x1 x2 plane, n equispaced samples."""
    t = 2.0 * np.pi * np.arange(n) / n
    return np.stack([np.cos(t), np.sin(t), np.zeros_like(t)], axis=1)


def two_point_set():
    """The pair (1, 0, 0), (-1, 0, 0)."""
    return np.array([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])


def standard_ball():
    """Ambient convex domain shared by the grid experiments."""
    return Ball(center=np.zeros(3), radius=DOMAIN_RADIUS)


def unit_ball():
    return Ball(center=np.zeros(3), radius=1.0)


def null_psh_example():
    """|z1|^2 + |z2|^2 - |z3|^2 as a probe on C^3.

    The model function that is null-psh without being psh; its Levi
    form along a null direction theta is |t1|^2 + |t2|^2 - |t3|^2,
    which the null condition pins at >= 0 with equality on a cone.
    """
    q = Quadratic(A=np.diag([1.0, 1.0, -1.0, 1.0, 1.0, -1.0]), b=np.zeros(6), c=0.0)
    return ScalarFunction.from_quadratic(q, space="C3", name="signed_height")


def negative_height_example():
    """-|z3|^2 on C^3; strictly decreased by null-disc averaging."""
    q = Quadratic(A=np.diag([0.0, 0.0, -1.0, 0.0, 0.0, -1.0]), b=np.zeros(6), c=0.0)
    return ScalarFunction.from_quadratic(q, space="C3", name="neg_height")


def equality_direction():
    """Null direction where the model probe's Levi form vanishes."""
    s = np.sqrt(2.0) / 2.0
    return np.array([1j * s, 1j * s, 1.0])


def disc_suite():
    """The four-disc catalog selection used by the current identities."""
    spinor = np.sqrt(0.5) * np.array([1.0, 0.5])
    theta_spinor = (
        spinor[0] ** 2 - spinor[1] ** 2,
        1j * (spinor[0] ** 2 + spinor[1] ** 2),
        2.0 * spinor[0] * spinor[1],
    )
    return [
        ("flat", catalog("flat")),
        ("affine_null", catalog("affine-null", theta=theta_spinor)),
        ("enneper_half", catalog("enneper", rho=0.5)),
        ("random_spinor_3", catalog("random-spinor", degree=3, seed=5)),
    ]


def _axes():
    return Poly3.variable(0), Poly3.variable(1), Poly3.variable(2)


def polynomial_probes(max_degree=4, n_random=3, seed=17):
    """Named trivariate probes of degree <= max_degree.

    The fixed heads cover the named identities (linear, squared norm,
    the rotational saddle whose Hessian has frame trace zero over the
    x1 x2 plane); seeded random polynomials fill in generic behavior up
    to the requested degree.
    """
    x1, x2, x3 = _axes()
    probes = [
        ("const", Poly3.constant(1.0)),
        ("linear", 1.0 * x1 - 2.0 * x2 + 0.5 * x3),
        ("abs_sq", x1 * x1 + x2 * x2 + x3 * x3),
        ("rotational_saddle", x2 * x2 + x3 * x3 - x1 * x1 + 1.0),
        ("cyl_sq", x2 * x2 + x3 * x3),
        ("cubic_mix", x1 * x2 * x3 + 0.5 * x1 * x1 * x2),
    ]
    rng = np.random.default_rng(seed)
    degrees = [min(max_degree, d) for d in (3, 4, 4)][:n_random]
    for i, deg in enumerate(degrees):
        terms = {}
        for _ in range(8):
            e = tuple(int(v) for v in rng.integers(0, deg + 1, size=3))
            if sum(e) <= deg:
                terms[e] = terms.get(e, 0.0) + float(rng.standard_normal())
        # Pin one full-degree monomial so the draw hits the target degree.
        lead = [deg, 0, 0]
        rng.shuffle(lead)
        terms[tuple(lead)] = terms.get(tuple(lead), 0.0) + 1.0
        probes.append((f"random_deg{deg}_{i}", Poly3.from_dict(terms)))
    return [(name, p) for name, p in probes if p.degree <= max_degree]


def minimal_psh_probes():
    """Sub-suite of probes that are minimal-psh on R^3.

    A quadratic is minimal-psh exactly when the two smallest Hessian
    eigenvalues have nonnegative sum; the rotational saddle sits on the
    boundary of that cone.
    """
    all_probes = dict(polynomial_probes())
    keep = ["const", "linear", "abs_sq", "rotational_saddle", "cyl_sq"]
    return [(name, all_probes[name]) for name in keep]
