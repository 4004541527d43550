"""Tabular non-stationary RL: exact oracles, RestartQ-UCB learners and the experiment harness."""

from ._core import (
    ConfigError,
    ContractViolation,
    __version__,
    candidate_grid,
    epochs_freedman,
    epochs_hoeffding,
    exp3p_params,
    freedman_bonus,
    hoeffding_bonus,
    optimal_values,
    policy_value,
    run_experiment,
    stage_ends,
    variation_budgets,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "__version__",
    "candidate_grid",
    "epochs_freedman",
    "epochs_hoeffding",
    "exp3p_params",
    "freedman_bonus",
    "hoeffding_bonus",
    "optimal_values",
    "policy_value",
    "run_experiment",
    "stage_ends",
    "variation_budgets",
]
