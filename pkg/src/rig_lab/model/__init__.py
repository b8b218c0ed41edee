"""The bipartite actor-item process and its intersection graph."""

from .core import (
    TAU_KINDS,
    ModelParams,
    Tau,
    WindowTable,
    actor_window,
    edge_prob,
    item_window,
    t_minus,
    t_plus,
    tau_eval,
    tau_floor_inverse,
)
from .graph import (
    BACKENDS,
    BipartiteGraph,
    LocalSample,
    are_adjacent,
    check_windows,
    generate_bipartite,
    intersection_degree,
    is_triangle,
    local_subgraph,
    read_edge_list,
    sample_local,
    write_edge_list,
)
from .sequences import SparseTableMax, WeightSequence, as_weights

__all__ = [
    "TAU_KINDS", "ModelParams", "Tau", "WindowTable", "actor_window", "edge_prob", "item_window",
    "t_minus", "t_plus", "tau_eval", "tau_floor_inverse", "BACKENDS", "BipartiteGraph", "LocalSample",
    "are_adjacent", "check_windows", "generate_bipartite", "intersection_degree", "is_triangle",
    "local_subgraph", "read_edge_list", "sample_local", "write_edge_list", "SparseTableMax",
    "WeightSequence", "as_weights",
]
