"""Hypothesis checkers and sampled verdicts for each quotient construction."""

from tsmono.monotonicity.parametric import (
    Factor,
    Kernel2,
    c1_margin,
    check_case2,
    check_parametric_quotient,
    check_power_kernel,
    check_product_quotient,
    kernel_logds_monotone_margin,
)
from tsmono.monotonicity.series import check_generalized_series, series_value
from tsmono.monotonicity.upper_limit import (
    check_thm_damped,
    check_thm_diamond,
    check_thm_two_dampers,
    check_thm_variable_upper,
    quotient_damped,
    quotient_variable_upper,
)
from tsmono.monotonicity.verdict import (
    HYPOTHESIS_FAILED,
    TOL_MONO,
    VERIFIED,
    VIOLATED,
    HypothesisMargin,
    MonotoneVerdict,
    Outcome,
    verify_monotone,
)

__all__ = [
    "Factor", "Kernel2", "c1_margin", "check_case2", "check_parametric_quotient",
    "check_power_kernel", "check_product_quotient", "kernel_logds_monotone_margin",
    "check_generalized_series", "series_value",
    "check_thm_damped", "check_thm_diamond", "check_thm_two_dampers",
    "check_thm_variable_upper", "quotient_damped", "quotient_variable_upper",
    "HYPOTHESIS_FAILED", "TOL_MONO", "VERIFIED", "VIOLATED",
    "HypothesisMargin", "MonotoneVerdict", "Outcome", "verify_monotone",
]
