"""Optimal-weight quadrature on [0, 1] for a Sobolev-type class.

Rules minimise the worst-case integration error over the unit ball of the
space normed by ||f^(m) + f^(m-1)||_L2 (m = 1, 2, 3) at fixed uniform nodes,
and are exact for exp(-x) and for polynomials of degree up to m - 2.
Closed forms exist for m = 1 and m = 2; a dense constrained solve covers all
supported orders and doubles as the independent oracle for the closed forms.
"""

from .analysis import (
    ConvergenceRow,
    ConvergenceTable,
    ErrorReport,
    ReportEntry,
    SobolevNormEstimate,
    cauchy_schwarz_check,
    classical_rule,
    convergence_study,
    error_norm_squared,
    error_report,
    kernel_double_integral,
    sobolev_norm,
    stationarity_margin,
)
from .coefficients import (
    BoundaryConstants,
    boundary_constants,
    build_rule,
    closed_form_m1,
    closed_form_m2,
    coefficients_via_convolution,
    lambda1,
)
from .core import (
    BUILTIN_INTEGRANDS,
    ConstructionError,
    GridSpec,
    Integrand,
    QuadratureError,
    QuadratureRule,
    RuleMethod,
    SolveError,
    ToleranceError,
    apply_rule,
    builtin_integrand,
    constraint_residuals,
    moment_f,
    moment_integral,
    psi,
)
from .operator import (
    CharacteristicPolynomial,
    IdentityReport,
    OperatorSpec,
    build_operator,
    characteristic_polynomial,
    convolve,
    identity_residuals,
    operator_value,
    stable_roots,
    tail_bound,
    window_for,
)
from .solver import SystemLayout, WienerHopfSystem, assemble_system, solve

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_INTEGRANDS",
    "BoundaryConstants",
    "CharacteristicPolynomial",
    "ConstructionError",
    "ConvergenceRow",
    "ConvergenceTable",
    "ErrorReport",
    "GridSpec",
    "IdentityReport",
    "Integrand",
    "OperatorSpec",
    "QuadratureError",
    "QuadratureRule",
    "ReportEntry",
    "RuleMethod",
    "SobolevNormEstimate",
    "SolveError",
    "SystemLayout",
    "ToleranceError",
    "WienerHopfSystem",
    "apply_rule",
    "assemble_system",
    "boundary_constants",
    "build_operator",
    "build_rule",
    "builtin_integrand",
    "cauchy_schwarz_check",
    "characteristic_polynomial",
    "classical_rule",
    "closed_form_m1",
    "closed_form_m2",
    "coefficients_via_convolution",
    "constraint_residuals",
    "convergence_study",
    "convolve",
    "error_norm_squared",
    "error_report",
    "identity_residuals",
    "kernel_double_integral",
    "lambda1",
    "moment_f",
    "moment_integral",
    "operator_value",
    "psi",
    "sobolev_norm",
    "solve",
    "stable_roots",
    "stationarity_margin",
    "tail_bound",
    "window_for",
    "__version__",
]
