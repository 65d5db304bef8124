"""Fredholm pairs of projections: Calkin norms, graph perturbations, homotopies.

Exact computations on eventually-periodic block-diagonal operators, the
Calkin-sum and graph-product Fredholmness criteria, and a mode-decomposed
toy model of perturbed APS boundary conditions.
"""

from .blocks import (
    BlockOp,
    PairDecision,
    Status,
    align,
    bop_norm,
    calkin_norm,
    index_by_trace,
    is_finite_rank,
    pair_fredholm,
    pair_index_oracle,
    tail_norm,
    truncate,
)
from .criteria import (
    CriterionReport,
    cnorm_criterion,
    graph_criterion,
    graph_sharpness_example,
    lower_bound_check,
    sharpness_example,
)
from .errors import (
    ConfigError,
    FredpairsError,
    HypothesisViolationError,
    InputError,
    NotFredholmError,
    NumericalInstabilityError,
    PreconditionError,
)
from .geometry import GraphBC, diff_norm_2d, graph_projection, graphest_bound, principal_angle_sines, proj_line2
from .homotopy import involution, p_path, split_extreme, w_path
from .linalg import (
    DEFAULT_TOL,
    Tolerance,
    eigenspace_at,
    is_projection,
    op_norm,
    orth_projector,
    pair_index_finite,
    rank_of,
    restricted_map,
)
from .lorentz import ModeSpec, ModelBVP, aps_compactness_check, build_model, bvp_fredholm, final_cnorm, final_graph

__all__ = [
    "BlockOp",
    "PairDecision",
    "Status",
    "align",
    "bop_norm",
    "calkin_norm",
    "index_by_trace",
    "is_finite_rank",
    "pair_fredholm",
    "pair_index_oracle",
    "tail_norm",
    "truncate",
    "CriterionReport",
    "cnorm_criterion",
    "graph_criterion",
    "graph_sharpness_example",
    "lower_bound_check",
    "sharpness_example",
    "ConfigError",
    "FredpairsError",
    "HypothesisViolationError",
    "InputError",
    "NotFredholmError",
    "NumericalInstabilityError",
    "PreconditionError",
    "GraphBC",
    "diff_norm_2d",
    "graph_projection",
    "graphest_bound",
    "principal_angle_sines",
    "proj_line2",
    "involution",
    "p_path",
    "split_extreme",
    "w_path",
    "DEFAULT_TOL",
    "Tolerance",
    "eigenspace_at",
    "is_projection",
    "op_norm",
    "orth_projector",
    "pair_index_finite",
    "rank_of",
    "restricted_map",
    "ModeSpec",
    "ModelBVP",
    "aps_compactness_check",
    "build_model",
    "bvp_fredholm",
    "final_cnorm",
    "final_graph",
]

__version__ = "0.1.0"
