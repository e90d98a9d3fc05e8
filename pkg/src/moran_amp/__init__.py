"""Birth-death dynamics on weighted directed graphs: exact and Monte Carlo
fixation probabilities, structural upper bounds, and a weight construction
that turns low-diameter undirected graphs into strong selection amplifiers."""

__version__ = "0.1.0"

from .graph_core import (  # noqa: F401
    ClassificationFlags,
    GraphError,
    WeightedGraph,
    classify,
    induced_subgraph,
    is_isothermal,
    restricted_temperature,
    temperature,
    temperatures,
)
from .dynamics import (  # noqa: F401
    TrajectoryOutcome,
    jump_step,
    sample_initial,
    simulate,
    step,
    total_fitness,
)
from .exact import (  # noqa: F401
    CapacityError,
    biased_walk_absorption,
    fixation_under_scheme,
    fixation_vector,
    mj_absorption,
    three_state_bound,
    well_mixed_closed_form,
)
from .bounds import (  # noqa: F401
    BoundsReport,
    bounds_report,
    hot_vertices,
    t_prime,
    temp_bound_selfloopfree,
    temp_bound_unweighted,
    uniform_bound_selfloopfree,
    uniform_bound_unweighted,
    vertex_upper_bound,
)
from .amplifier import (  # noqa: F401
    AmplifierLayout,
    SpanningTree,
    bfs_spanning_tree,
    build_hub,
    check_diameter,
    compute_layout,
    construct_amplifier,
    partition_separator,
)
from .estimator import FixationEstimate, estimate_fixation, sweep  # noqa: F401
from .generators import FamilySpec, generate, load_graph, save_graph  # noqa: F401
