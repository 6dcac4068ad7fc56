"""Numerical verification toolkit for bell-shaped one-sided stable densities.

Evaluates the stable density and its derivatives, counts derivative zeros
against the bell-shape prediction, decomposes the stable exponent into its
mixture and exponential-sum factors, builds exact exponential convolution
chains, and runs total-positivity and Monte Carlo cross-checks.
"""

from ._kernels import backend_name
from .errors import (
    AmbiguousZero,
    BellshapeError,
    DegeneratePoles,
    NonConvergence,
    OrderTooLarge,
    QuadratureFailure,
)
from .stable import (
    Alpha,
    DensityEval,
    QuadratureConfig,
    SeriesConfig,
    closed_form_half,
    density,
    density_derivative,
    laplace_transform_numeric,
    log_density_inflection_probe,
    sample_stable,
)
from .signs import (
    BellShapeReport,
    Grid,
    Sign,
    SignPattern,
    ZeroSet,
    count_sign_changes_closed,
    count_sign_changes_open,
    locate_zeros,
    log_grid,
    match_pattern,
    pattern_a,
    pattern_b,
    sign_of,
    verify_bell_shape,
)
from .factorization import (
    ExponentIdentityReport,
    RateSequence,
    SpectralL,
    complete_monotonicity_probe,
    expsum_exponent,
    factorization_residual,
    kappa,
    me_exponent,
    spectral_l,
)
from .chains import (
    ChainSpec,
    ExpMixture,
    RationalLT,
    WbsReport,
    boundary_signs,
    chain_density,
    chain_laplace,
    default_chain,
    exponential_sum_chain,
    verify_wbs,
)
from .totalpos import (
    KernelMatrix,
    MinorReport,
    build_kernel,
    find_negative_minor_2x2,
    scan_minors,
    vd_bound_check,
)
from .selfdecomp import (
    InvGammaPower,
    LogBetaExample,
    SpectralFunction,
    conjecture2_probe,
    integer_alpha_factorization_mc,
    inv_gamma_power_derivative,
    ks_distance,
    log_beta_density,
    spectral_k,
    verify_invgamma_bellshape,
)

__version__ = "0.1.0"

__all__ = [
    "Alpha",
    "AmbiguousZero",
    "BellShapeReport",
    "BellshapeError",
    "ChainSpec",
    "DegeneratePoles",
    "DensityEval",
    "ExpMixture",
    "ExponentIdentityReport",
    "Grid",
    "InvGammaPower",
    "KernelMatrix",
    "LogBetaExample",
    "MinorReport",
    "NonConvergence",
    "OrderTooLarge",
    "QuadratureConfig",
    "QuadratureFailure",
    "RateSequence",
    "RationalLT",
    "SeriesConfig",
    "Sign",
    "SignPattern",
    "SpectralFunction",
    "SpectralL",
    "WbsReport",
    "ZeroSet",
    "backend_name",
    "boundary_signs",
    "build_kernel",
    "chain_density",
    "chain_laplace",
    "closed_form_half",
    "complete_monotonicity_probe",
    "conjecture2_probe",
    "count_sign_changes_closed",
    "count_sign_changes_open",
    "default_chain",
    "density",
    "density_derivative",
    "exponential_sum_chain",
    "expsum_exponent",
    "factorization_residual",
    "find_negative_minor_2x2",
    "integer_alpha_factorization_mc",
    "inv_gamma_power_derivative",
    "kappa",
    "ks_distance",
    "laplace_transform_numeric",
    "locate_zeros",
    "log_beta_density",
    "log_density_inflection_probe",
    "log_grid",
    "match_pattern",
    "me_exponent",
    "pattern_a",
    "pattern_b",
    "sample_stable",
    "scan_minors",
    "sign_of",
    "spectral_k",
    "spectral_l",
    "vd_bound_check",
    "verify_bell_shape",
    "verify_invgamma_bellshape",
    "verify_wbs",
]
