"""Eroded 3x3 jigsaw reassembly toolkit."""

from .core import (
    Assignment,
    GraphStats,
    PredictionMatrix,
    PuzzleInstance,
    dump_assignment,
    dump_prediction_matrix,
    load_assignment,
    load_instance,
    load_prediction_matrix,
    log_weight,
    make_matrix,
)
from .counting import GraphSizeQuery, edge_count, node_count, reassembly_lower_bound
from .errors import (
    BudgetError,
    ConfigError,
    DomainError,
    FormatError,
    InfeasibleError,
    MetricError,
    PuzzleError,
)
from .graph import (
    CutPolicy,
    ReassemblyGraph,
    build_graph,
    enumerate_paths,
    plan_layers,
    predict_graph_size,
)
from .metrics import MetricReport, evaluate, pixel_distance
from .fragmenter import FragmentationSpec, fragment_image, write_outputs
from .solver import Solution, solve, solve_matrix, solve_unknown_center
from .synthetic import ScorerModel, random_truth, synthesize, synthesize_unknown_center
from .bench import BenchConfig, run_grid, run_theta_sweep

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BenchConfig",
    "BudgetError",
    "ConfigError",
    "CutPolicy",
    "DomainError",
    "FormatError",
    "FragmentationSpec",
    "GraphSizeQuery",
    "GraphStats",
    "InfeasibleError",
    "MetricError",
    "MetricReport",
    "PredictionMatrix",
    "PuzzleError",
    "PuzzleInstance",
    "ReassemblyGraph",
    "ScorerModel",
    "Solution",
    "build_graph",
    "dump_assignment",
    "dump_prediction_matrix",
    "edge_count",
    "enumerate_paths",
    "evaluate",
    "fragment_image",
    "load_assignment",
    "load_instance",
    "load_prediction_matrix",
    "log_weight",
    "make_matrix",
    "node_count",
    "pixel_distance",
    "plan_layers",
    "predict_graph_size",
    "random_truth",
    "reassembly_lower_bound",
    "run_grid",
    "run_theta_sweep",
    "solve",
    "solve_matrix",
    "solve_unknown_center",
    "synthesize",
    "synthesize_unknown_center",
    "write_outputs",
]
