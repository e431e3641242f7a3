"""Exact limit-set computations for piecewise-linear maps on finite graphs."""

from .errors import (
    ContractError,
    DomainError,
    GraphDynError,
    InvariantError,
    NotMarkovError,
    ResourceError,
    StructuralError,
    ValidationError,
)
from .topograph import (
    Arc,
    Edge,
    GraphPoint,
    GraphSpace,
    Region,
    circle_graph,
    degree,
    hausdorff_distance,
    interval_graph,
    normalize,
    path_distance,
    star_graph,
)
from .plmap import (
    MapSpec,
    Piece,
    PLGraphMap,
    builtin,
    evaluate,
    image_of_arcs,
    iterate,
    load_map,
    preimages,
    preimages_with_arcs,
)
from .orbits import (
    CoveringChain,
    LimitSetEstimate,
    PeriodicOrbit,
    bowen_ball_component,
    certify_covering,
    expansion_constant,
    omega_estimate,
    periodic_points,
)
from .backward import (
    BackwardBranch,
    PreimageTree,
    SteeringPlan,
    alpha_estimate,
    backward_tree,
    chain_transitive,
    isolated_periodic_violation,
    recurrent_branch,
    steer_branch,
)
from .structure import (
    MarkovPartition,
    entropy,
    inaccessible_estimate,
    is_mixing,
    is_transitive,
    markov_partition,
)

__version__ = "0.1.0"
