"""Second-order positivity criteria for scalar functions on R^3 and C^3.

Two cones of functions drive the hull computations downstream.  A C^2
function on a domain in C^3 is null-plurisubharmonic when its Levi form
is nonnegative along every direction of the null quadric; a C^2 function
on R^3 is minimal-plurisubharmonic when the sum of the two smallest
Hessian eigenvalues is nonnegative.  Both criteria reduce to pointwise
linear algebra on (real) Hessians, which this module evaluates either
analytically, for polynomial and quadratic probes, or by symmetric
central differences.

Complex points z = x + i*y are flattened to R^6 in the layout
[x1, x2, x3, y1, y2, y3]; the complex rotation J acts by
(x, y) |-> (-y, x) in that layout.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import Ball, Box, ConformalFrame
from .polynomials import Poly3, Quadratic

DEFAULT_FLOOR = -1.0e6


def default_floor():
    """Floor constant standing in for -infinity, overridable by env var."""
    raw = os.environ.get("HULLKIT_FLOOR")
    if raw is None:
        return DEFAULT_FLOOR
    try:
        return float(raw)
    except ValueError as exc:
        raise ValueError(f"HULLKIT_FLOOR must parse as float, got {raw!r}") from exc


def complex_to_real(z):
    """C^3 points (..., 3) complex -> R^6 points (..., 6)."""
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag], axis=-1)


def real_to_complex(x):
    """Inverse of complex_to_real."""
    x = np.asarray(x, dtype=float)
    return x[..., :3] + 1j * x[..., 3:]


def rotate_j(xi):
    """Complex-structure action on R^6 vectors: (x, y) -> (-y, x)."""
    xi = np.asarray(xi, dtype=float)
    return np.concatenate([-xi[..., 3:], xi[..., :3]], axis=-1)


class DomainError(ValueError):
    """Raised when an evaluation would leave the declared domain."""


@dataclass
class ScalarFunction:
    """Scalar probe on R^3 or C^3 with optional analytic derivatives.

    fn maps real-coordinate arrays of shape (..., d) to values (...,),
    where d = 3 for space "R3" and d = 6 for space "C3".  When gradient
    or hessian callables are present they are trusted (catalog probes
    supply exact ones); otherwise central differences with step h_fd are
    used.  Values at or below floor stand for -infinity.
    """

    fn: Callable
    space: str = "R3"
    gradient_fn: Optional[Callable] = None
    hessian_fn: Optional[Callable] = None
    h_fd: Optional[float] = None
    domain: Optional[object] = None
    floor: float = field(default_factory=default_floor)
    name: str = ""

    def __post_init__(self):
        if self.space not in ("R3", "C3"):
            raise ValueError("space must be 'R3' or 'C3'")

    @property
    def real_dim(self):
        return 3 if self.space == "R3" else 6

    @property
    def step(self):
        if self.h_fd is not None:
            return self.h_fd
        diam = self.domain.diameter if self.domain is not None else 2.0
        return 1e-4 * diam

    def __call__(self, pts):
        return self.fn(np.asarray(pts, dtype=float))

    @classmethod
    def from_poly(cls, poly: Poly3, **kw):
        kw.setdefault("name", "poly3")
        return cls(
            fn=poly,
            space="R3",
            gradient_fn=poly.gradient_at,
            hessian_fn=poly.hessian_at,
            **kw,
        )

    @classmethod
    def from_quadratic(cls, q: Quadratic, space=None, **kw):
        if space is None:
            space = "R3" if q.dim == 3 else "C3"
        kw.setdefault("name", "quadratic")
        return cls(
            fn=q,
            space=space,
            gradient_fn=q.gradient_at,
            hessian_fn=q.hessian_at,
            **kw,
        )

    @classmethod
    def from_callable(cls, fn, space="R3", **kw):
        return cls(fn=fn, space=space, **kw)


def _require_margin(u: ScalarFunction, x, margin):
    if u.domain is None:
        return
    x = np.asarray(x, dtype=float)
    if not np.all(u.domain.boundary_distance(x) >= margin):
        raise DomainError("finite-difference stencil leaves the declared domain")


def fd_gradient(fn, x, h):
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    g = np.zeros(d)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        g[i] = (fn(x + e) - fn(x - e)) / (2.0 * h)
    return g


def fd_hessian(fn, x, h):
    """Symmetrized central-difference Hessian."""
    x = np.asarray(x, dtype=float)
    d = x.shape[-1]
    H = np.zeros((d, d))
    f0 = fn(x)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h
        H[i, i] = (fn(x + ei) - 2.0 * f0 + fn(x - ei)) / (h * h)
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = h
            H[i, j] = H[j, i] = (
                fn(x + ei + ej) - fn(x + ei - ej) - fn(x - ei + ej) + fn(x - ei - ej)
            ) / (4.0 * h * h)
    return 0.5 * (H + H.T)


def gradient(u: ScalarFunction, x):
    x = np.asarray(x, dtype=float)
    if u.gradient_fn is not None:
        return np.asarray(u.gradient_fn(x), dtype=float)
    _require_margin(u, x, u.step)
    return fd_gradient(u.fn, x, u.step)


def hessian(u: ScalarFunction, x):
    """Hessian of u at a single real-coordinate point, shape (d, d)."""
    x = np.asarray(x, dtype=float)
    if u.hessian_fn is not None:
        return np.asarray(u.hessian_fn(x), dtype=float)
    _require_margin(u, x, 2.0 * u.step)
    return fd_hessian(u.fn, x, u.step)


def hessian_mismatch(u: ScalarFunction, x):
    """Relative gap between analytic and finite-difference Hessians."""
    if u.hessian_fn is None:
        return 0.0
    Ha = hessian(u, x)
    Hf = fd_hessian(u.fn, np.asarray(x, dtype=float), u.step)
    scale = max(1.0, np.abs(Ha).max())
    return float(np.abs(Ha - Hf).max() / scale)


@dataclass(frozen=True)
class LeviReport:
    """Minimum sampled Levi value at a point with its minimizing direction."""

    point: np.ndarray
    minimum: float
    argmin: np.ndarray
    n_directions: int

    def is_nonnegative(self, tol=1e-10):
        return self.minimum >= -tol


def levi_forms(u: ScalarFunction, z, thetas):
    """Levi form of u at z along many null directions at once.

    Computed from the real 6x6 Hessian H as (1/4) * (H(xi, xi) +
    H(J xi, J xi)) with xi = (Re theta, Im theta), which equals the
    Laplacian at 0 of zeta |-> u(z + zeta * theta) divided by 4.
    """
    if u.space != "C3":
        raise ValueError("Levi forms need a C3 function")
    thetas = np.atleast_2d(np.asarray(thetas, dtype=complex))
    H = hessian(u, complex_to_real(np.asarray(z, dtype=complex)))
    xi = np.concatenate([thetas.real, thetas.imag], axis=-1)
    jxi = rotate_j(xi)
    vals = 0.25 * (
        np.einsum("ni,ij,nj->n", xi, H, xi) + np.einsum("ni,ij,nj->n", jxi, H, jxi)
    )
    return vals


def levi_form(u: ScalarFunction, z, theta):
    """Levi form of u at z along a single null direction."""
    return float(levi_forms(u, z, np.asarray(theta, dtype=complex).reshape(1, 3))[0])


def is_null_psh_at(u: ScalarFunction, z, directions):
    """Sampled null-plurisubharmonicity check at one point.

    Returns a LeviReport carrying the minimum Levi value over the given
    null directions and the direction achieving it.  A nonnegative
    minimum certifies the sampled criterion only; negativity at any
    sampled direction disproves null-plurisubharmonicity outright.
    """
    directions = np.atleast_2d(np.asarray(directions, dtype=complex))
    vals = levi_forms(u, z, directions)
    k = int(np.argmin(vals))
    return LeviReport(
        point=np.asarray(z, dtype=complex),
        minimum=float(vals[k]),
        argmin=directions[k],
        n_directions=len(directions),
    )


def minimal_psh_defect(u: ScalarFunction, x):
    """Sum of the two smallest Hessian eigenvalues of u at x in R^3.

    Nonnegative exactly when u passes the pointwise minimal-
    plurisubharmonicity criterion; the value is a quantitative defect.
    """
    if u.space != "R3":
        raise ValueError("minimal-psh defect needs an R3 function")
    H = hessian(u, x)
    w = np.linalg.eigvalsh(H)
    return float(w[0] + w[1])


def circle_average(u: ScalarFunction, x, frame: ConformalFrame, r, n_quad=64):
    """Trapezoidal average of u over a circle in a conformal frame's plane.

    The circle is x + r*(cos t * u1 + sin t * u2) with the frame
    normalized to unit vectors.  Equally spaced nodes make the rule
    exact for trigonometric polynomials of degree < n_quad / 2.  Any
    node at or below the floor poisons the average to the floor value.
    """
    if r < 0:
        raise ValueError("radius must be nonnegative")
    x = np.asarray(x, dtype=float)
    if u.domain is not None and not u.domain.contains_disc(x, frame, r):
        raise DomainError("circle's disc leaves the declared domain")
    t = 2.0 * np.pi * np.arange(n_quad) / n_quad
    pts = frame.circle_points(x, r, t)
    vals = u(pts)
    if np.any(vals <= u.floor):
        return u.floor
    return float(np.mean(vals))


def tube_lift(u: ScalarFunction):
    """Lift an R^3 function to the C^3 tube over it, u(x + i y) = u(x).

    Minimal-plurisubharmonicity of the base function is equivalent to
    null-plurisubharmonicity of the lift, which makes the two sampled
    criteria cross-checkable on quadratic probes.
    """
    if u.space != "R3":
        raise ValueError("tube lift starts from an R3 function")

    def fn(pts):
        return u.fn(np.asarray(pts, dtype=float)[..., :3])

    grad = None
    hess = None
    if u.gradient_fn is not None:

        def grad(pts):  # noqa: F811
            pts = np.asarray(pts, dtype=float)
            g = np.zeros(pts.shape)
            g[..., :3] = u.gradient_fn(pts[..., :3])
            return g

    if u.hessian_fn is not None:

        def hess(pts):  # noqa: F811
            pts = np.asarray(pts, dtype=float)
            H = np.zeros(pts.shape[:-1] + (6, 6))
            H[..., :3, :3] = u.hessian_fn(pts[..., :3])
            return H

    return ScalarFunction(
        fn=fn,
        space="C3",
        gradient_fn=grad,
        hessian_fn=hess,
        h_fd=u.h_fd,
        floor=u.floor,
        name=f"tube({u.name})" if u.name else "tube",
    )
