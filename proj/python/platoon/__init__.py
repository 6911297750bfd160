"""Python bindings for the platoon resource-management library."""

from ._platoon import (  # noqa: F401
    DomainError,
    InfeasibleBudget,
    SaturatedLink,
    ScenarioError,
    admm_solve,
    aggregate,
    backoff_window_sum,
    ca_run,
    delay_bound,
    normalized_gap,
    perception_reaction_delay,
    required_bandwidth,
    run_experiment,
    run_policy,
    safety_distance,
    soft_threshold,
    validate_scenario,
)

__version__ = "0.1.0"
