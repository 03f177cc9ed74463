"""Mesh-router placement on gridded regions with a constant-temperature
Metropolis search and router-count reduction."""

from meshplace.coverage import (
    CoverageMetrics,
    CoverState,
    DiscOffsets,
    Placement,
    connectivity_components,
    disc_offsets,
    fitness_full,
    metrics,
)
from meshplace.oracle import OracleResult, exhaustive_best
from meshplace.reduction import (
    ReductionReport,
    RemovalStrategy,
    optimize_router_count,
    router_scores,
    select_removal,
)
from meshplace.region import (
    CellClass,
    Region,
    RegionGenParams,
    cell_class,
    generate_region,
    parse_region,
    serialize_region,
)
from meshplace.solver import (
    MoveConfig,
    SearchTrace,
    SolverParams,
    accept,
    init_placement,
    nr_init,
    nr_min,
    propose_move,
    run_hillclimb,
    run_metropolis,
)

__version__ = "0.1.0"

__all__ = [
    "OracleResult",
    "exhaustive_best",
    "CellClass",
    "CoverState",
    "CoverageMetrics",
    "DiscOffsets",
    "MoveConfig",
    "Placement",
    "ReductionReport",
    "Region",
    "RegionGenParams",
    "RemovalStrategy",
    "SearchTrace",
    "SolverParams",
    "accept",
    "cell_class",
    "connectivity_components",
    "disc_offsets",
    "fitness_full",
    "generate_region",
    "init_placement",
    "metrics",
    "nr_init",
    "nr_min",
    "optimize_router_count",
    "parse_region",
    "propose_move",
    "router_scores",
    "run_hillclimb",
    "run_metropolis",
    "select_removal",
    "serialize_region",
]
