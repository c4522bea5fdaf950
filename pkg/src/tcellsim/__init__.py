"""Dual-paradigm simulator of age-related naive T cell depletion.

One deterministic stock-flow engine and one stochastic agent-based engine
share a single population model; rank-sum machinery compares their
outputs, and bundled TREC datasets support validation of the simulated
thymic-naive decay.
"""

__version__ = "0.1.0"

from .abm import (
    AbmConfig,
    AgentPopulation,
    ReplicateSet,
    hazard_to_prob,
    run_replicates,
    step_population,
)
from .errors import DataError, NumericalError
from .model import (
    ActiveCellTable,
    ModelParams,
    Scenario,
    StateVector,
    death_modifier,
    default_initial_state,
    derivatives,
    dilution,
    export_modifier,
    lookup_active,
    peripheral_proliferation_rate,
    scenario_params,
    thymic_output,
)
from .ode import IntegrationConfig, integrate, total_naive
from .stats import RankSumResult, TrajectoryComparison, compare_trajectories, wilcoxon_rank_sum
from .trajectory import Trajectory, annual_samples

__all__ = [
    "AbmConfig",
    "ActiveCellTable",
    "AgentPopulation",
    "DataError",
    "IntegrationConfig",
    "ModelParams",
    "NumericalError",
    "RankSumResult",
    "ReplicateSet",
    "Scenario",
    "StateVector",
    "Trajectory",
    "TrajectoryComparison",
    "annual_samples",
    "compare_trajectories",
    "death_modifier",
    "default_initial_state",
    "derivatives",
    "dilution",
    "export_modifier",
    "hazard_to_prob",
    "integrate",
    "lookup_active",
    "peripheral_proliferation_rate",
    "run_replicates",
    "scenario_params",
    "step_population",
    "thymic_output",
    "total_naive",
    "wilcoxon_rank_sum",
]
