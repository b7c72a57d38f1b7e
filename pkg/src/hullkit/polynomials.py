"""Polynomial probe functions with exact derivatives.

Two small families cover every certified test function in the package:
sparse trivariate polynomials on R^3 (arbitrary degree, exact gradient
and Hessian, exact composition with disc parametrizations) and quadratic
forms x^T A x + b^T x + c on R^d.  Both avoid finite differencing, which
keeps the second-order criteria downstream free of step-size error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _canon(terms):
    acc = {}
    for key, coef in terms:
        key = tuple(int(e) for e in key)
        if len(key) != 3 or min(key) < 0:
            raise ValueError(f"bad monomial exponent triple {key!r}")
        acc[key] = acc.get(key, 0.0) + float(coef)
    return tuple(sorted((k, c) for k, c in acc.items() if c != 0.0))


@dataclass(frozen=True)
class Poly3:
    """Sparse polynomial in three real variables.

    terms is a canonical sorted tuple of ((i, j, k), coefficient) pairs
    for monomials x1^i x2^j x3^k.  Instances are immutable and hashable.
    """

    terms: tuple

    @classmethod
    def from_dict(cls, d):
        return cls(_canon(d.items()))

    @classmethod
    def monomial(cls, i, j, k, coef=1.0):
        return cls(_canon([((i, j, k), coef)]))

    @classmethod
    def constant(cls, c):
        return cls(_canon([((0, 0, 0), c)]))

    @classmethod
    def variable(cls, axis):
        e = [0, 0, 0]
        e[axis] = 1
        return cls.monomial(*e)

    def __add__(self, other):
        if np.isscalar(other):
            other = Poly3.constant(other)
        return Poly3(_canon(list(self.terms) + list(other.terms)))

    __radd__ = __add__

    def __neg__(self):
        return Poly3(tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other):
        if np.isscalar(other):
            other = Poly3.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return Poly3(_canon([(k, c * other) for k, c in self.terms]))
        prod = []
        for ka, ca in self.terms:
            for kb, cb in other.terms:
                prod.append((tuple(a + b for a, b in zip(ka, kb)), ca * cb))
        return Poly3(_canon(prod))

    __rmul__ = __mul__

    @property
    def degree(self):
        return max((sum(k) for k, _ in self.terms), default=0)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        p = pts.reshape(-1, 3)
        out = np.zeros(len(p))
        for (i, j, k), c in self.terms:
            out += c * p[:, 0] ** i * p[:, 1] ** j * p[:, 2] ** k
        return float(out[0]) if single else out.reshape(pts.shape[:-1])

    def diff(self, axis):
        out = []
        for key, c in self.terms:
            e = key[axis]
            if e > 0:
                new = list(key)
                new[axis] = e - 1
                out.append((tuple(new), c * e))
        return Poly3(_canon(out))

    def grad(self):
        return tuple(self.diff(a) for a in range(3))

    def hessian_polys(self):
        g = self.grad()
        return tuple(tuple(g[a].diff(b) for b in range(3)) for a in range(3))

    def gradient_at(self, pts):
        pts = np.asarray(pts, dtype=float)
        g = self.grad()
        cols = [g[a](pts) for a in range(3)]
        return np.stack(cols, axis=-1)

    def hessian_at(self, pts):
        pts = np.asarray(pts, dtype=float)
        hp = self.hessian_polys()
        rows = [[hp[a][b](pts) for b in range(3)] for a in range(3)]
        out = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)
        return out

    def compose_with_coeffs(self, fcoeffs):
        """Bivariate coefficients of zeta |-> self(Re f(zeta)).

        fcoeffs holds ascending Taylor coefficients, shape (3, N+1).  The
        result C satisfies self(Re f(zeta)) = sum C[j, k] zeta^j conj(zeta)^k
        exactly, enabling spectral (coefficient-level) Laplacians.
        """
        fcoeffs = np.asarray(fcoeffs, dtype=complex)
        ncomp, deg1 = fcoeffs.shape
        if ncomp != 3:
            raise ValueError("expected three components")
        # x_i = (f_i + conj f_i)/2 as a bivariate coefficient matrix.
        base = []
        for i in range(3):
            m = np.zeros((deg1, deg1), dtype=complex)
            m[:, 0] += 0.5 * fcoeffs[i]
            m[0, :] += 0.5 * np.conj(fcoeffs[i])
            base.append(m)
        deg = self.degree
        size = deg * (deg1 - 1) + 1
        out = np.zeros((size, size), dtype=complex)
        for (i, j, k), c in self.terms:
            term = np.zeros((1, 1), dtype=complex)
            term[0, 0] = c
            for axis, e in enumerate((i, j, k)):
                for _ in range(e):
                    term = _biconv(term, base[axis])
            out[: term.shape[0], : term.shape[1]] += term
        return out


def _biconv(a, b):
    """Full 2-D polynomial product of bivariate coefficient matrices."""
    sa0, sa1 = a.shape
    sb0, sb1 = b.shape
    out = np.zeros((sa0 + sb0 - 1, sa1 + sb1 - 1), dtype=complex)
    for i in range(sa0):
        for j in range(sa1):
            if a[i, j] != 0:
                out[i : i + sb0, j : j + sb1] += a[i, j] * b
    return out


def bivariate_laplacian(c):
    """Coefficient matrix of Laplacian given bivariate coefficients.

    For h = sum c[j,k] zeta^j conj(zeta)^k the Laplacian is
    4 * d^2 h / (d zeta d conj zeta), realized as an index shift.
    """
    c = np.asarray(c, dtype=complex)
    if c.shape[0] < 2 or c.shape[1] < 2:
        return np.zeros((1, 1), dtype=complex)
    j = np.arange(1, c.shape[0])[:, None]
    k = np.arange(1, c.shape[1])[None, :]
    return 4.0 * j * k * c[1:, 1:]


def bivariate_eval(c, zeta):
    """Evaluate sum c[j,k] zeta^j conj(zeta)^k on an array of points."""
    c = np.asarray(c, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    flat = zeta.reshape(-1)
    nj, nk = c.shape
    zj = np.vander(flat, N=nj, increasing=True).T  # (nj, M)
    wk = np.vander(np.conj(flat), N=nk, increasing=True).T  # (nk, M)
    vals = np.einsum("jk,jm,km->m", c, zj, wk, optimize=True)
    return vals.reshape(zeta.shape)


@dataclass(frozen=True)
class Quadratic:
    """Quadratic form x^T A x + b^T x + c on R^d with exact calculus."""

    A: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.shape != (len(b), len(b)):
            raise ValueError("matrix and linear part sizes disagree")
        if not np.allclose(A, A.T, atol=1e-12 * max(1.0, np.abs(A).max())):
            raise ValueError("quadratic matrix must be symmetric")
        object.__setattr__(self, "A", 0.5 * (A + A.T))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self):
        return len(self.b)

    def __call__(self, pts):
        pts = np.asarray(pts, dtype=float)
        single = pts.ndim == 1
        p = pts.reshape(-1, self.dim)
        vals = np.einsum("ni,ij,nj->n", p, self.A, p) + p @ self.b + self.c
        return float(vals[0]) if single else vals.reshape(pts.shape[:-1])

    def gradient_at(self, pts):
        pts = np.asarray(pts, dtype=float)
        return 2.0 * pts @ self.A + self.b

    def hessian_at(self, pts):
        pts = np.asarray(pts, dtype=float)
        H = 2.0 * self.A
        if pts.ndim == 1:
            return H.copy()
        return np.broadcast_to(H, pts.shape[:-1] + H.shape).copy()
