"""Long cycles in Bernoulli random subgraphs of graphs with large minimum degree.

DFS exploration of G_p with lazily revealed edges, forest classifications,
vertical-path search and chord-chain cycle assembly, plus a seeded
experiment harness.
"""

from .brute import GraphTooLarge, cycle_exists_of_length_at_least, longest_cycle_brute_force
from .cycles import (
    Branch,
    Chord,
    ChordChain,
    Cycle,
    CycleSearchOutcome,
    Failure,
    FailureKind,
    assemble_cycle,
    candidate_set_U,
    chain_chords,
    find_long_cycle,
    is_valid_cycle,
    long_condition_candidates,
    try_long_condition,
)
from .dfs import ExplorationResult, RootedForest, explore, verify_vertical_property
from .forest import (
    ClassificationTable,
    PathSearch,
    PathStatus,
    Thresholds,
    VerticalPath,
    compute_classifications,
    find_vertical_path,
    height_histogram,
    trunc_desc_count,
    vertical_distance,
)
from .graph import (
    EdgeKey,
    HostGraph,
    build_from_edges,
    gen_circulant,
    gen_complete,
    gen_hypercube,
    gen_random_regular,
    parse_edge_list,
    serialize_edge_list,
)
from .percolation import EdgeStatus, PercolationOracle, mix_seed

__version__ = "0.1.0"
