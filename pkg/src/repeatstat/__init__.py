"""Statistically sound per-instance evaluation of stochastic optimizers."""

from .binomial_ci import (
    CiMethod,
    SuccessEstimate,
    TrialTally,
    confidence_interval,
    error_margin,
    exact_coverage,
    interval_width,
    point_estimate,
    relative_width,
)
from .metrics import (
    CetsEstimate,
    MetricEstimate,
    NoSuccessError,
    RunRecord,
    SuccessCurve,
    cets,
    classify_mode,
    optimize_cets,
    r_c_from_bounds,
    r_c_interval,
    repeats_to_confidence,
    success_curve,
)
from .planner import (
    PlanConfig,
    PlanResult,
    adaptive_repeats,
    exact_n_root_find,
    n_for_target,
    relative_error_bound,
    scaling_function,
    worst_case_n,
    worst_case_n_simplified,
)
from .rng import RngSpec

__version__ = "0.1.0"
