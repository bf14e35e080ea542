"""Explicit inverses, norm bounds and O(n) solvers for seven-diagonal
(near) Toeplitz matrices, plus the clamped-beam fixed-point iteration."""

__version__ = "0.1.0"

from .inverse import (
    SchurMatrix,
    a_inv_entry,
    assemble_inverse,
    b_inv_entry,
    c_inv_entry,
    d_inv_entry,
    inverse_rows,
    schur_m,
)
from .matrices import (
    BandedMatrix,
    RankTwoFactors,
    SystemSpec,
    Variant,
    build_a,
    build_b,
    build_c,
    multiply,
    rank_two_factors,
)
from .norm_bounds import (
    BoundBreakdown,
    bound_breakdown,
    bound_value,
    c_inverse_norm,
    exact_inverse_norm,
    norm_sweep,
)
from .oracle import VerificationReport, dense_invert, full_suite, leading_minors, stencil_constants_check
from .sequences import GammaTable, alpha, gamma, gamma_moment_sum, gamma_ratio
from .solver import (
    BeamProblem,
    FixedPointTrace,
    StructuredSolver,
    beam_fixed_point,
    contraction_predictor,
    exact_contraction_rate,
    solve,
)

__all__ = [
    "__version__",
    "GammaTable",
    "gamma",
    "alpha",
    "gamma_ratio",
    "gamma_moment_sum",
    "Variant",
    "SystemSpec",
    "BandedMatrix",
    "RankTwoFactors",
    "build_a",
    "build_b",
    "build_c",
    "rank_two_factors",
    "multiply",
    "SchurMatrix",
    "c_inv_entry",
    "b_inv_entry",
    "d_inv_entry",
    "schur_m",
    "a_inv_entry",
    "inverse_rows",
    "assemble_inverse",
    "BoundBreakdown",
    "exact_inverse_norm",
    "bound_value",
    "bound_breakdown",
    "c_inverse_norm",
    "norm_sweep",
    "StructuredSolver",
    "solve",
    "BeamProblem",
    "FixedPointTrace",
    "beam_fixed_point",
    "contraction_predictor",
    "exact_contraction_rate",
    "VerificationReport",
    "dense_invert",
    "leading_minors",
    "stencil_constants_check",
    "full_suite",
]
