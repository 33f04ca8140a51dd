"""Positivity tests and identity audits for isotropic kernels on spheres and R^d."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DomainError,
    HypothesisViolationError,
    RegimeError,
    UnsupportedParameterError,
)
from .quadrature import (
    QuadratureResult,
    SingularWeight,
    endpoint_asymptotic,
    integrate_adaptive,
    integrate_endpoint_singular,
    integrate_oscillatory,
)
from .specfun import (
    AsymptoticApprox,
    PolyIndex,
    bessel,
    cosine_expansion,
    gegenbauer_eval,
    jacobi_bessel_approx,
    jacobi_eval,
    legendre_eval,
)
from .kernels import (
    Dimension,
    Kernel,
    Scaled,
    SincPower,
    Tabulated,
    TruncatedPower,
    fractional_lift_check,
    kernel_eval,
    scale_kernel,
    sinc_power_transform,
)
from .positivity import (
    Euclidean,
    GegenbauerSeries,
    PDVerdict,
    PointSet,
    Sphere,
    bochner_test,
    converse_check,
    gegenbauer_coefficients,
    gram_matrix,
    gram_oracle,
    hankel_transform,
    inheritance_check,
    min_eigenvalue,
    sample_points,
    schoenberg_test,
)
from .decomposition import (
    FEllTable,
    HalfAngleCoeffs,
    f_ell_coeffs,
    lemma23_coeffs,
    refinement_check,
    verify_f_ell,
    verify_half_angle,
)
from .conjecture import (
    BoundAuditReport,
    D2Decomposition,
    SweepConfig,
    SweepReport,
    bounds_audit,
    case3_lower_bound,
    d2_decomposition,
    d2_integral,
    default_grid,
    sweep,
    theta_threshold,
)
