"""Artificial-currency market toolkit.

Solve per-agent ideal request rates, simulate first-price auction runs with
budgets and multi-round reserves, and compare against analytic bounds.
"""

from ._pseudomarket import (
    __version__,
    guarantee_lower_bound,
    hardness_profile,
    ideal_report,
    impossibility_upper_bound,
    run_experiment,
    run_experiment_file,
    run_preset,
    simulate_no_competition,
)

__all__ = [
    "__version__",
    "guarantee_lower_bound",
    "hardness_profile",
    "ideal_report",
    "impossibility_upper_bound",
    "run_experiment",
    "run_experiment_file",
    "run_preset",
    "simulate_no_competition",
]
