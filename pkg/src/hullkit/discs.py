"""Discs: Fourier boundary loops, holomorphic discs, and minimal-surface discs.

The objects here live on the closed unit disc.  Boundary loops carry a
finite Fourier series per component; holomorphic discs carry ascending
Taylor coefficients; null discs are holomorphic discs whose derivative
lies on the null quadric, generated by a spinor pair of polynomials
(a(zeta), b(zeta)) through theta = (a^2 - b^2, i(a^2 + b^2), 2ab); and
conformal minimal discs are real parts of null discs.  All evaluators
are vectorized over arrays of parameters.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .geometry import is_null, spinor_to_null

# Default band limit for loops projected from samples.
DEFAULT_BAND_LIMIT = 64

# Derivative min/max modulus ratio below which a disc counts as branched.
IMMERSION_RTOL = 1e-8


class BranchPointError(ValueError):
    """Raised by operations that require an immersed disc."""


def _polyval_components(zeta, coeffs):
    """Evaluate a (ncomp, deg+1) ascending-coefficient bundle at zeta."""
    vals = npoly.polyval(np.asarray(zeta, dtype=complex), np.asarray(coeffs).T)
    return np.moveaxis(vals, 0, -1)


@dataclass(frozen=True)
class BoundaryLoop:
    """Finite Fourier series on the circle, one row per component.

    coeffs has shape (ncomp, 2N+1) with column N + k holding the
    coefficient of exp(i k t), k = -N..N.  The loop is real-valued
    exactly when c_{-k} = conj(c_k) for all k.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        if c.shape[1] % 2 != 1:
            raise ValueError("coefficient rows must have odd length 2N+1")
        object.__setattr__(self, "coeffs", c)

    @property
    def band_limit(self):
        return (self.coeffs.shape[1] - 1) // 2

    @property
    def ncomp(self):
        return self.coeffs.shape[0]

    def frequencies(self):
        n = self.band_limit
        return np.arange(-n, n + 1)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        phase = np.exp(1j * np.multiply.outer(t, self.frequencies()))
        vals = phase @ self.coeffs.T
        if self.is_real():
            vals = vals.real
        return vals

    def mean(self):
        """Zeroth Fourier coefficient per component."""
        m = self.coeffs[:, self.band_limit]
        return m.real if self.is_real() else m

    def real_defect(self):
        """Max deviation from the reality condition c_{-k} = conj(c_k)."""
        flipped = np.conj(self.coeffs[:, ::-1])
        scale = max(1.0, float(np.abs(self.coeffs).max()))
        return float(np.abs(self.coeffs - flipped).max() / scale)

    def is_real(self, rtol=1e-10):
        return self.real_defect() <= rtol

    def translated(self, shift):
        """Loop plus a constant vector (adjusts only the k = 0 column)."""
        c = self.coeffs.copy()
        c[:, self.band_limit] += np.asarray(shift, dtype=complex)
        return BoundaryLoop(c)

    @classmethod
    def from_samples(cls, values, band_limit=DEFAULT_BAND_LIMIT):
        """Least-aliasing Fourier projection of equispaced samples.

        values has shape (m, ncomp) sampled at t_j = 2 pi j / m.  Modes
        beyond the band limit are discarded; the k = 0 mode (the mean)
        is always kept exactly.
        """
        values = np.atleast_2d(np.asarray(values))
        m = values.shape[0]
        if m < 2 * band_limit + 1:
            raise ValueError("need more samples than Fourier modes")
        fc = np.fft.fft(values, axis=0) / m
        cols = []
        for k in range(-band_limit, band_limit + 1):
            cols.append(fc[k % m])
        return cls(np.stack(cols, axis=1))


def harmonic_extension(loop: BoundaryLoop):
    """Harmonic extension of a loop to the closed unit disc.

    Returns a callable sending complex zeta (|zeta| <= 1) to
    sum_k c_k r^{|k|} e^{i k t}; real loops extend to real values.
    """
    freqs = loop.frequencies()
    coeffs = loop.coeffs
    real = loop.is_real()

    def extend(zeta):
        zeta = np.asarray(zeta, dtype=complex)
        r = np.abs(zeta)
        t = np.angle(zeta)
        radial = np.power.outer(r, np.abs(freqs))
        phase = np.exp(1j * np.multiply.outer(t, freqs))
        vals = (radial * phase) @ coeffs.T
        return vals.real if real else vals

    return extend


def harmonic_conjugate(loop: BoundaryLoop):
    """Boundary values of the conjugate harmonic function, mean zero.

    Acts on Fourier coefficients as the multiplier -i * sign(k); for
    real loops cos(kt) maps to sin(kt) and sin(kt) to -cos(kt).
    """
    mult = -1j * np.sign(loop.frequencies())
    return BoundaryLoop(loop.coeffs * mult)


def analytic_completion(loop: BoundaryLoop):
    """Holomorphic disc g + i*h from a real loop g, normalized Im f(0) = 0."""
    if not loop.is_real():
        raise ValueError("analytic completion starts from a real loop")
    n = loop.band_limit
    coeffs = np.zeros((loop.ncomp, n + 1), dtype=complex)
    coeffs[:, 0] = loop.coeffs[:, n]
    coeffs[:, 1:] = 2.0 * loop.coeffs[:, n + 1 :]
    return HolomorphicDisc(coeffs)


@dataclass(frozen=True)
class HolomorphicDisc:
    """Componentwise polynomial holomorphic map of the closed unit disc.

    coeffs holds ascending Taylor coefficients, shape (ncomp, N+1).
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_2d(np.asarray(self.coeffs, dtype=complex))
        object.__setattr__(self, "coeffs", c)

    @property
    def ncomp(self):
        return self.coeffs.shape[0]

    @property
    def degree(self):
        return self.coeffs.shape[1] - 1

    def __call__(self, zeta):
        return _polyval_components(zeta, self.coeffs)

    def center(self):
        return self.coeffs[:, 0].copy()

    def derivative(self):
        if self.degree == 0:
            return HolomorphicDisc(np.zeros((self.ncomp, 1), dtype=complex))
        k = np.arange(1, self.degree + 1)
        return HolomorphicDisc(self.coeffs[:, 1:] * k)

    def boundary(self, t):
        return self(np.exp(1j * np.asarray(t, dtype=float)))

    def boundary_loop(self, band_limit=None):
        """Exact Fourier series of the boundary values (Taylor modes)."""
        n = self.degree if band_limit is None else band_limit
        coeffs = np.zeros((self.ncomp, 2 * n + 1), dtype=complex)
        keep = min(n, self.degree) + 1
        coeffs[:, n : n + keep] = self.coeffs[:, :keep]
        return BoundaryLoop(coeffs)

    def nullity_residual(self, n_samples=512):
        """Max of |sum_i f_i'(zeta)^2| over the closed disc, relative.

        Normalized by the max of sum_i |f_i'|^2; zero identifies discs
        whose derivative stays on the null quadric.
        """
        zeta = unit_disc_samples(n_samples)
        d = self.derivative()(zeta)
        num = np.abs((d * d).sum(axis=-1)).max()
        den = (np.abs(d) ** 2).sum(axis=-1).max()
        return float(num / max(den, 1e-300))

    def derivative_modulus_range(self, n_samples=512):
        zeta = unit_disc_samples(n_samples)
        d = np.linalg.norm(self.derivative()(zeta), axis=-1)
        return float(d.min()), float(d.max())


@dataclass(frozen=True)
class NullDisc(HolomorphicDisc):
    """Holomorphic disc whose derivative lies on the null quadric.

    Carries the generating spinor polynomials; coeffs are derived from
    them by termwise integration and are exact at coefficient level.
    """

    spinor_a: np.ndarray = None
    spinor_b: np.ndarray = None

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "spinor_a", np.asarray(self.spinor_a, dtype=complex))
        object.__setattr__(self, "spinor_b", np.asarray(self.spinor_b, dtype=complex))

    def coefficient_nullity(self):
        """Max |coefficient| of sum_i (f_i')^2 relative to its largest term."""
        d = self.derivative().coeffs
        total = None
        scale = 0.0
        for i in range(3):
            sq = np.convolve(d[i], d[i])
            scale = max(scale, np.abs(sq).max(initial=0.0))
            total = sq if total is None else total + sq
        if total is None or scale == 0.0:
            return 0.0
        return float(np.abs(total).max() / scale)


def spinor_disc(a_coeffs, b_coeffs, base=None):
    """Null disc from spinor polynomials by termwise integration.

    a_coeffs and b_coeffs are ascending coefficient arrays of a(zeta)
    and b(zeta).  The disc is f(zeta) = base + int_0^zeta theta(a, b),
    so f(0) = base.  A shared zero of a and b inside the closed disc is
    a branch point of the resulting minimal surface; it is reported as
    a warning, not an error.
    """
    a = np.atleast_1d(np.asarray(a_coeffs, dtype=complex))
    b = np.atleast_1d(np.asarray(b_coeffs, dtype=complex))
    if np.abs(a).max(initial=0.0) == 0.0 and np.abs(b).max(initial=0.0) == 0.0:
        raise ValueError("spinor polynomials must not both vanish identically")
    aa = np.convolve(a, a)
    bb = np.convolve(b, b)
    ab = np.convolve(a, b)
    m = max(len(aa), len(bb), len(ab))
    aa = np.pad(aa, (0, m - len(aa)))
    bb = np.pad(bb, (0, m - len(bb)))
    ab = np.pad(ab, (0, m - len(ab)))
    deriv = np.stack([aa - bb, 1j * (aa + bb), 2.0 * ab])
    k = np.arange(1, deriv.shape[1] + 1)
    coeffs = np.zeros((3, deriv.shape[1] + 1), dtype=complex)
    coeffs[:, 1:] = deriv / k
    if base is not None:
        coeffs[:, 0] = np.asarray(base, dtype=complex).reshape(3)
    _warn_on_shared_zero(a, b)
    return NullDisc(coeffs, spinor_a=a, spinor_b=b)


def _warn_on_shared_zero(a, b, tol=1e-8):
    """Warn when a and b share a zero on the closed unit disc."""
    for p, q in ((a, b), (b, a)):
        trimmed = np.trim_zeros(p, "b")
        if len(trimmed) < 2:
            continue
        roots = npoly.polyroots(trimmed)
        qmax = max(np.abs(q).sum(), 1e-300)
        for root in roots:
            if np.abs(root) <= 1.0 + tol and np.abs(npoly.polyval(root, q)) <= tol * qmax:
                warnings.warn(
                    f"spinor polynomials share a zero near {root:.6g}; "
                    "the minimal surface has a branch point there",
                    stacklevel=3,
                )
                return


@dataclass(frozen=True)
class ConformalMinimalDisc:
    """Real part of a holomorphic (normally null) disc into C^3.

    When the lift is null, the map is a conformal harmonic immersion
    away from branch points, hence a parametrized minimal surface.
    """

    lift: HolomorphicDisc

    @property
    def dim(self):
        return self.lift.ncomp

    def __call__(self, zeta):
        return self.lift(zeta).real

    def center(self):
        return self.lift.center().real

    def boundary(self, t):
        return self.lift.boundary(t).real

    def partials(self, zeta):
        """(d/du, d/dv) of the real map at zeta = u + i v."""
        d = self.lift.derivative()(zeta)
        return d.real, -d.imag


@dataclass(frozen=True)
class RealSurface:
    """Holomorphic disc in C^3 viewed as a conformal map into R^6."""

    disc: HolomorphicDisc

    @property
    def dim(self):
        return 2 * self.disc.ncomp

    def __call__(self, zeta):
        vals = self.disc(zeta)
        return np.concatenate([vals.real, vals.imag], axis=-1)

    def center(self):
        c = self.disc.center()
        return np.concatenate([c.real, c.imag])

    def boundary(self, t):
        return self(np.exp(1j * np.asarray(t, dtype=float)))

    def partials(self, zeta):
        d = self.disc.derivative()(zeta)
        xu = np.concatenate([d.real, d.imag], axis=-1)
        xv = np.concatenate([-d.imag, d.real], axis=-1)
        return xu, xv


def unit_disc_samples(n):
    """Deterministic polar sampling of the closed unit disc, boundary included."""
    n_r = max(2, int(np.sqrt(n / 4)))
    n_t = max(8, int(np.ceil(n / n_r)))
    r = np.linspace(0.0, 1.0, n_r)
    t = 2.0 * np.pi * np.arange(n_t) / n_t
    zeta = np.multiply.outer(r, np.exp(1j * t)).reshape(-1)
    return np.concatenate([zeta, [0.0 + 0.0j]])


def check_immersed(surface, n_samples=512, rtol=IMMERSION_RTOL):
    """Raise BranchPointError when the derivative modulus collapses."""
    if isinstance(surface, ConformalMinimalDisc):
        disc = surface.lift
    elif isinstance(surface, RealSurface):
        disc = surface.disc
    else:
        disc = surface
    lo, hi = disc.derivative_modulus_range(n_samples)
    if lo < rtol * max(hi, 1e-300):
        raise BranchPointError(
            f"derivative modulus ratio {lo / max(hi, 1e-300):.3e} below {rtol:.1e}"
        )
    return lo, hi


def nullity_residual(disc, n_samples=512):
    """Relative nullity residual of a disc or of a minimal disc's lift."""
    if isinstance(disc, ConformalMinimalDisc):
        disc = disc.lift
    return disc.nullity_residual(n_samples)


def conformality_residual(surface, n_samples=512, eps=1e-12):
    """Max conformality defect of the real map over the closed disc.

    At each sample the defect is (| |x_u|^2 - |x_v|^2 | + 2 |x_u . x_v|)
    divided by max(|x_u|^2, |x_v|^2, eps * global max); zero for
    conformal maps, and scale-free for linear ones.
    """
    zeta = unit_disc_samples(n_samples)
    xu, xv = surface.partials(zeta)
    nu = (xu * xu).sum(axis=-1)
    nv = (xv * xv).sum(axis=-1)
    dot = (xu * xv).sum(axis=-1)
    gmax = max(float(np.maximum(nu, nv).max()), 1e-300)
    den = np.maximum(np.maximum(nu, nv), eps * gmax)
    return float(((np.abs(nu - nv) + 2.0 * np.abs(dot)) / den).max())


def rescale_domain(disc: NullDisc, rho):
    """Restrict a null disc to the subdisc |zeta| <= rho, reparametrized.

    Coefficients scale as c_k -> c_k rho^k; the spinor polynomials pick
    up sqrt(rho) * (coeff scaling) so their squares match the derivative.
    """
    if not (0 < rho <= 1):
        raise ValueError("rho must lie in (0, 1]")
    k = np.arange(disc.coeffs.shape[1])
    coeffs = disc.coeffs * rho**k
    sr = np.sqrt(rho)
    ka = np.arange(len(disc.spinor_a))
    kb = np.arange(len(disc.spinor_b))
    return NullDisc(
        coeffs,
        spinor_a=disc.spinor_a * sr * rho**ka,
        spinor_b=disc.spinor_b * sr * rho**kb,
    )


def affine_null_disc(theta, center=(0.0, 0.0, 0.0)):
    """Minimal disc with lift f(zeta) = center + zeta * theta."""
    theta = np.asarray(theta, dtype=complex).reshape(3)
    if not is_null(theta, rtol=1e-10):
        raise ValueError("affine disc direction must be null")
    coeffs = np.zeros((3, 2), dtype=complex)
    coeffs[:, 0] = np.asarray(center, dtype=complex)
    coeffs[:, 1] = theta
    # Recover a spinor square root of theta for provenance.
    a, b = _spinor_sqrt(theta)
    return ConformalMinimalDisc(NullDisc(coeffs, spinor_a=[a], spinor_b=[b]))


def _spinor_sqrt(theta):
    """One spinor preimage of a null vector under the quadric map."""
    t1, t2, t3 = theta
    a2 = 0.5 * (t1 - 1j * t2)
    b2 = 0.5 * (-t1 - 1j * t2)
    a = np.sqrt(a2)
    if np.abs(a) > 1e-150:
        return a, t3 / (2.0 * a)
    b = np.sqrt(b2)
    return (t3 / (2.0 * b), b) if np.abs(b) > 1e-150 else (0.0, 0.0)


def catalog(name, **params):
    """Named family of conformal minimal discs used across the test rig.

    flat:           disc of given radius and center; boundary is a round
                    circle, default the unit circle in the x1 x2 plane.
    enneper:        classical first-order spinor disc (a = 1, b = zeta),
                    restricted to |zeta| <= rho.
    affine-null:    straight disc center + Re(zeta * theta).
    random-spinor:  seeded random spinor polynomials of given degree.
    """
    if name == "flat":
        center = np.asarray(params.pop("center", (0.0, 0.0, 0.0)), dtype=float)
        radius = float(params.pop("radius", 1.0))
        theta = np.asarray(params.pop("theta", (1.0, -1.0j, 0.0)), dtype=complex)
        _reject_unknown(params)
        theta = radius * theta / np.linalg.norm(theta.real)
        return affine_null_disc(theta, center=center)
    if name == "enneper":
        rho = float(params.pop("rho", 1.0))
        center = np.asarray(params.pop("center", (0.0, 0.0, 0.0)), dtype=float)
        _reject_unknown(params)
        disc = spinor_disc([1.0], [0.0, 1.0], base=center)
        return ConformalMinimalDisc(rescale_domain(disc, rho) if rho < 1.0 else disc)
    if name == "affine-null":
        theta = np.asarray(params.pop("theta"), dtype=complex)
        center = np.asarray(params.pop("center", (0.0, 0.0, 0.0)), dtype=float)
        _reject_unknown(params)
        return affine_null_disc(theta, center=center)
    if name == "random-spinor":
        degree = int(params.pop("degree"))
        seed = int(params.pop("seed", 0))
        scale = float(params.pop("scale", 1.0))
        _reject_unknown(params)
        rng = np.random.default_rng(seed)
        decay = 1.0 / (1.0 + np.arange(degree + 1))
        for attempt in range(32):
            a = (rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)) * decay
            b = (rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)) * decay
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                try:
                    disc = spinor_disc(scale * a, scale * b)
                except Warning:
                    continue
            lo, hi = disc.derivative_modulus_range()
            if lo > 1e-6 * hi:
                return ConformalMinimalDisc(disc)
        raise ValueError("could not draw an immersed random spinor disc")
    raise ValueError(f"unknown catalog name {name!r}")


def _reject_unknown(params):
    if params:
        raise ValueError(f"unknown catalog parameters {sorted(params)}")


def boundary_measure(surface, n_atoms=256):
    """Equal-weight atoms pushing the boundary circle measure forward.

    Returns (atoms, weights) with atoms = surface values at the n-th
    roots of unity and uniform weights 1/n.
    """
    t = 2.0 * np.pi * np.arange(n_atoms) / n_atoms
    atoms = surface.boundary(t)
    weights = np.full(n_atoms, 1.0 / n_atoms)
    return atoms, weights
