"""MPLS overlay synthesis on a transport network via a multilayer graph model."""

from mlsynth.builder import BuilderParams, build_redundant_mlg, candidate_logical_links
from mlsynth.exact import ExactLimits, solve_exact
from mlsynth.harness import (
    ComparisonRow,
    ComparisonTable,
    SuiteConfig,
    emit_report,
    run_comparison,
    summarize_savings,
)
from mlsynth.instance import (
    CostModel,
    Demand,
    Instance,
    TransportEdge,
    VariantParams,
    generate_instance,
    read_instance,
    write_instance,
)
from mlsynth.mlg import MultilayerGraph, layer_subgraph, physical_load, validate
from mlsynth.optimizer import (
    SearchParams,
    Solution,
    evaluate_cost,
    solve_full_lsr_baseline,
    solve_multilayer,
)
from mlsynth.routing import assign_capacities, route_flows

__all__ = [
    "BuilderParams", "ComparisonRow", "ComparisonTable", "CostModel", "Demand", "ExactLimits",
    "Instance", "MultilayerGraph", "SearchParams", "Solution", "SuiteConfig", "TransportEdge",
    "VariantParams", "assign_capacities", "build_redundant_mlg", "candidate_logical_links",
    "emit_report", "evaluate_cost", "generate_instance", "layer_subgraph", "physical_load",
    "read_instance", "route_flows", "run_comparison", "solve_exact", "solve_full_lsr_baseline",
    "solve_multilayer", "summarize_savings", "validate", "write_instance",
]
