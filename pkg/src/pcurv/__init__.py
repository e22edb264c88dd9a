"""p-Bakry-Emery curvature toolkit for finite weighted graphs."""

from .graph import (
    GraphError,
    LocalBall,
    MissingValueError,
    ProductGraph,
    ProductVertex,
    UnknownVertexError,
    WeightedGraph,
    cartesian_product,
    extract_ball2_inc,
    load_graph,
    make_complete,
    make_cycle,
    make_hypercube,
    make_path,
    make_star,
    parse_graph,
    save_graph,
    serialize_graph,
)
from .operators import (
    DegenerateFunctionError,
    cd_gap,
    cd_ratio,
    delta_p,
    gamma2_p,
    gamma_p,
    gamma_p_bilinear,
)
from .solver import CurvatureEstimate, SolverConfig, Status, check_cd, estimate_curvature, probe_divergence

__version__ = "0.1.0"
