"""Weighted common subgraph matching with a graduated continuation solver."""

from .direction import (
    DirectionMethod,
    best_assignment,
    discretize,
    exact_cardinality_assignment,
    linear_minimizer,
    truncated_assignment,
)
from .objective import (
    RelaxationKind,
    graduated_gradient,
    graduated_value,
    objective_gradient,
    objective_value,
    reference_objective,
    reference_value,
    structural_gradient,
    structural_value,
)
from .oracle import (
    ENUMERATION_CAP,
    OracleResult,
    brute_force_min,
    count_assignments,
    enumerate_partial_permutations,
)
from .solver import (
    FwOutcome,
    LineSearch,
    MatchResult,
    SolverConfig,
    TraceRecord,
    fw_minimize,
    match,
    match_piw,
)
from .synthbench import (
    GeneratorParams,
    MatchMode,
    PerturbMode,
    ScenarioKind,
    ScenarioSpec,
    TrialRecord,
    accuracy,
    aggregate_records,
    fit_time_slope,
    generate_instance,
    log_log_slope,
    run_scenario,
)
from .types import (
    BINARITY_TOL,
    FEASIBILITY_TOL,
    CostMatrix,
    PartialPermutation,
    ProblemInstance,
    RelaxedAssignment,
    WeightedGraph,
    selection_mask,
    validate_partial_permutation,
)

__version__ = "0.1.0"

__all__ = [
    "BINARITY_TOL",
    "ENUMERATION_CAP",
    "FEASIBILITY_TOL",
    "CostMatrix",
    "DirectionMethod",
    "FwOutcome",
    "GeneratorParams",
    "LineSearch",
    "MatchMode",
    "MatchResult",
    "OracleResult",
    "PartialPermutation",
    "PerturbMode",
    "ProblemInstance",
    "RelaxationKind",
    "RelaxedAssignment",
    "ScenarioKind",
    "ScenarioSpec",
    "SolverConfig",
    "TraceRecord",
    "TrialRecord",
    "WeightedGraph",
    "accuracy",
    "aggregate_records",
    "best_assignment",
    "brute_force_min",
    "count_assignments",
    "discretize",
    "enumerate_partial_permutations",
    "exact_cardinality_assignment",
    "fit_time_slope",
    "fw_minimize",
    "generate_instance",
    "graduated_gradient",
    "graduated_value",
    "linear_minimizer",
    "log_log_slope",
    "match",
    "match_piw",
    "objective_gradient",
    "objective_value",
    "reference_objective",
    "reference_value",
    "run_scenario",
    "selection_mask",
    "structural_gradient",
    "structural_value",
    "truncated_assignment",
    "validate_partial_permutation",
]
