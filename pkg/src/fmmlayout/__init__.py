"""fmmlayout: layout engine for very large graphs.

Splits a graph into connected components, lays out small ones with the
Kamada-Kawai stress method and big ones with a ForceAtlas2-style force
simulation whose pairwise repulsion is evaluated in O(n) by a 2D fast
multipole method, then assembles the pieces along a spanning tree of
component centers.
"""

from ._backend import BACKEND
from .assembler import (
    AssemblyParams,
    LayoutParams,
    LayoutResult,
    MetaGraph,
    build_meta_graph,
    choose_layout_method,
    default_fa2_params,
    layout_component,
    layout_diameter,
    layout_graph,
    layout_meta,
    rescale_to_density,
)
from .forceatlas2 import (
    Fa2Params,
    Fa2State,
    attraction_forces,
    fa2_layout,
    fa2_step,
    gravity_forces,
    swing_traction,
)
from .fmm import (
    FmmParams,
    brute_force_repulsion,
    build_quadtree,
    evaluate_repulsion,
    interaction_list,
    neighbor_cells,
)
from .graph import (
    Component,
    Graph,
    GraphInputError,
    Transaction,
    build_transaction_graph,
    connected_components,
    generate_synthetic_transactions,
    parse_edge_list,
    parse_transactions,
    write_edge_list,
    write_transactions,
)
from .io import (
    LayoutDocument,
    LayoutDocumentError,
    SvgStyle,
    document_from_layout,
    read_layout,
    render_svg,
    write_layout,
)
from .kamada_kawai import (
    KKParams,
    contract_degree_one,
    contract_degree_two,
    kk_energy,
    kk_layout,
    restore_degree_one,
    restore_degree_two,
)
from .shortest_paths import floyd_warshall, johnson, shortest_path_matrix

__version__ = "0.1.0"
