"""Automatic contour deformation for Riemann-Hilbert problems."""

from .collocation import assemble, condition_number, painleve2_eval, solve
from .deform import DeformConfig, check_condition_ii, map_to_rhp, select_dominant, simple_deformation
from .errors import (
    AssemblyFailure,
    ConditionTwoViolated,
    CrossingPaths,
    IllConditioned,
    InvalidParameter,
    NoDecay,
    NoEnclosingWalk,
    NotSplittable,
    OnWalk,
    RecursionLimit,
    RHDeformError,
    SingularMatrix,
    SingularStokesData,
    SolverError,
    Unreachable,
)
from .graph import (
    GraphPath,
    PlanarGraph,
    Rectangle,
    WeightedPlanarGraph,
    bounding_rectangle,
    build_grid_graph,
    edge_weight,
    homological_interior,
    nearest_vertex,
    shortest_path,
    split_graph,
    weight_graph,
    winding_number,
)
from .lensing import constrained_shortest_path, enclosing_shortest_walk, factorizations_2x2, lensing_deformation
from .pipeline import PipelineConfig, painleve2_pipeline, painleve2_value, run_pipeline, sweep
from .rhp import Arc, RHProblem, painleve2_rhp, relative_strength, stokes_complete, theta
from .simplify import simplify_contour

__all__ = [
    "Arc",
    "AssemblyFailure",
    "ConditionTwoViolated",
    "CrossingPaths",
    "DeformConfig",
    "GraphPath",
    "IllConditioned",
    "InvalidParameter",
    "NoDecay",
    "NoEnclosingWalk",
    "NotSplittable",
    "OnWalk",
    "PipelineConfig",
    "PlanarGraph",
    "RHDeformError",
    "RHProblem",
    "RecursionLimit",
    "Rectangle",
    "SingularMatrix",
    "SingularStokesData",
    "SolverError",
    "Unreachable",
    "WeightedPlanarGraph",
    "assemble",
    "bounding_rectangle",
    "build_grid_graph",
    "check_condition_ii",
    "condition_number",
    "constrained_shortest_path",
    "edge_weight",
    "enclosing_shortest_walk",
    "factorizations_2x2",
    "homological_interior",
    "lensing_deformation",
    "map_to_rhp",
    "nearest_vertex",
    "painleve2_eval",
    "painleve2_pipeline",
    "painleve2_rhp",
    "painleve2_value",
    "relative_strength",
    "run_pipeline",
    "select_dominant",
    "shortest_path",
    "simple_deformation",
    "simplify_contour",
    "solve",
    "split_graph",
    "stokes_complete",
    "sweep",
    "theta",
    "weight_graph",
    "winding_number",
]
