"""Truncated-Euler-product approximations to completed L-functions of
Hecke cusp eigenforms: high-precision evaluation, error formulas, and
critical-line zero location."""

__version__ = "0.1.0"

from .approximation import (
    ApproxConfig,
    derivative,
    error_series,
    first_term_bound,
    lambda_N,
    lambda_full,
    lambda_term,
    tail_bound,
    z_function,
)
from .eigenform import (
    CoefficientTable,
    EigenformSpec,
    complement_series,
    delta_coefficients,
    delta_spec,
    hecke_consistency_check,
    load_coefficients,
    smooth_subseries,
)
from .errors import LfapproxError
from .euler import (
    LocalFactor,
    PoleLattice,
    detect_coincident_poles,
    enumerate_poles,
    gamma_factor_eval,
    local_factor_eval,
    local_roots,
    make_local_factor,
    truncated_euler_eval,
)
from .numerics import (
    PrecisionContext,
    cauchy_derivative,
    decay_threshold,
    gamma,
    upper_incomplete_gamma,
)
from .regularization import (
    EquidistReport,
    PrincipalPart,
    equidist_probe,
    error_integral,
    lambda_N_regularized,
    laurent_principal_part,
    principal_part_sum,
    sparse_contour,
)
from .zerofinder import ZeroRecord, classify_order, compare_zero_lists, refine_zero, scan_sign_changes
