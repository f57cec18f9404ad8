"""Fast multipole evaluation of pairwise 1/r repulsion in the plane."""

from .evaluate import (
    RepulsionResult,
    brute_force_repulsion,
    evaluate_repulsion,
    pair_interaction_counts,
    repulsion_from_tree,
)
from .expansions import (
    Expansion,
    direct_force_at,
    force_at,
    incoming_from_points,
    outgoing_from_points,
    outgoing_to_incoming,
    translate_incoming,
    translate_outgoing,
)
from .params import FmmParams
from .quadtree import QuadTree, build_quadtree, interaction_list, neighbor_cells

__all__ = [
    "Expansion",
    "FmmParams",
    "QuadTree",
    "RepulsionResult",
    "brute_force_repulsion",
    "build_quadtree",
    "direct_force_at",
    "evaluate_repulsion",
    "force_at",
    "incoming_from_points",
    "interaction_list",
    "neighbor_cells",
    "outgoing_from_points",
    "outgoing_to_incoming",
    "pair_interaction_counts",
    "repulsion_from_tree",
    "translate_incoming",
    "translate_outgoing",
]
