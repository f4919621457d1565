from .harness import (
    ExperimentRecord,
    ExperimentSpec,
    ExperimentTable,
    run_convergence,
    run_limit_window_law,
    run_rooted_marginal,
    run_separating_line,
    run_shift_family,
    run_shift_invariance,
    run_variance_decay,
    run_window_set_uniformity,
)

__all__ = [
    "ExperimentRecord",
    "ExperimentSpec",
    "ExperimentTable",
    "run_convergence",
    "run_limit_window_law",
    "run_rooted_marginal",
    "run_separating_line",
    "run_shift_family",
    "run_shift_invariance",
    "run_variance_decay",
    "run_window_set_uniformity",
]
