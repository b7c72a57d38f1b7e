"""Minimal hulls of compact sets in R^3 and null-psh envelopes in C^3.

The toolkit computes disc-averaging envelopes on grids and point
clouds, generates conformal minimal and null holomorphic discs from
spinor data, evaluates the Green currents those discs carry, and
assembles verifiable hull certificates (disc sequences, Jensen
measures, Hessian functionals, tube stages).
"""

from .bochner import BochnerReport, TubeSpec, bochner_stage, disc_mass, tube_test_suite
from .certificates import (
    DiscCertificateEntry,
    DiscSequenceCertificate,
    JensenCertificate,
    ObstacleIndicator,
    QuadraticMinorantCertificate,
    certify_jensen,
    disc_sequence,
    default_test_suite,
    hessian_certificate,
    near_fraction,
    poisson_functional,
    quadratic_minorant_certificate,
    search_disc,
    two_point_certificate,
)
from .cloud import bs_step_null, sample_ball_c3
from .currents import (
    DdcReport,
    GreenQuadrature,
    QuadForm,
    TwoForm,
    ddc_identity_check,
    ddcuf_pointwise_check,
    green_scalar,
    hessian_functional,
    mass,
    pushforward_on_twoform,
)
from .discs import (
    BoundaryLoop,
    BranchPointError,
    ConformalMinimalDisc,
    HolomorphicDisc,
    NullDisc,
    RealSurface,
    affine_null_disc,
    analytic_completion,
    boundary_measure,
    catalog,
    check_immersed,
    conformality_residual,
    harmonic_conjugate,
    harmonic_extension,
    nullity_residual,
    spinor_disc,
)
from .envelope import (
    EnvelopeConfig,
    EnvelopeInfo,
    Grid3,
    HullResult,
    bs_iterate,
    bs_step_minimal,
    extremal_hull_field,
    hausdorff_distance,
    submean_residual,
)
from .geometry import Ball, Box, ConvexSupport, fibonacci_sphere, sample_null_directions, spinor_to_null
from .loops import LoopPlan, build_loop, plan_loop
from .polynomials import Poly3, Quadratic
from .psh import (
    DomainError,
    LeviReport,
    ScalarFunction,
    default_floor,
    is_null_psh_at,
    levi_form,
    levi_forms,
    minimal_psh_defect,
    tube_lift,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "BochnerReport",
    "BoundaryLoop",
    "Box",
    "BranchPointError",
    "ConformalMinimalDisc",
    "ConvexSupport",
    "DdcReport",
    "DiscCertificateEntry",
    "DiscSequenceCertificate",
    "DomainError",
    "EnvelopeConfig",
    "EnvelopeInfo",
    "HullResult",
    "GreenQuadrature",
    "Grid3",
    "HolomorphicDisc",
    "JensenCertificate",
    "LeviReport",
    "LoopPlan",
    "NullDisc",
    "ObstacleIndicator",
    "Poly3",
    "QuadForm",
    "Quadratic",
    "QuadraticMinorantCertificate",
    "RealSurface",
    "ScalarFunction",
    "TubeSpec",
    "TwoForm",
    "affine_null_disc",
    "analytic_completion",
    "bochner_stage",
    "boundary_measure",
    "bs_iterate",
    "bs_step_minimal",
    "bs_step_null",
    "build_loop",
    "catalog",
    "conformality_residual",
    "certify_jensen",
    "check_immersed",
    "ddc_identity_check",
    "ddcuf_pointwise_check",
    "default_floor",
    "default_test_suite",
    "disc_mass",
    "disc_sequence",
    "extremal_hull_field",
    "fibonacci_sphere",
    "green_scalar",
    "harmonic_conjugate",
    "harmonic_extension",
    "hausdorff_distance",
    "hessian_certificate",
    "hessian_functional",
    "is_null_psh_at",
    "levi_form",
    "levi_forms",
    "mass",
    "minimal_psh_defect",
    "near_fraction",
    "nullity_residual",
    "plan_loop",
    "poisson_functional",
    "pushforward_on_twoform",
    "quadratic_minorant_certificate",
    "sample_ball_c3",
    "sample_null_directions",
    "search_disc",
    "spinor_disc",
    "spinor_to_null",
    "submean_residual",
    "tube_lift",
    "tube_test_suite",
    "two_point_certificate",
]
