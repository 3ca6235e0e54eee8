"""Dynamic programming on generalized d-graphs."""

from .core import *  # noqa: F401,F403
from .oracle import OracleResult, brute_force_optimum, evaluate_tree
from .problems import ChainDims, Digraph, matrix_chain_adapter, shortest_path_adapter, triangle_examples
from .solvers import (
    CyclicInput,
    GreedyNotApplicable,
    NonConvergence,
    Solution,
    UpdateTrace,
    solve_auto,
    solve_bellman_ford,
    solve_dijkstra,
    solve_topological,
)
from .textformat import FormatError, load_dgraph, parse_dgraph, serialize_dgraph
from .weights import (
    Color,
    Combinator,
    ProblemSpec,
    Sense,
    UpdateEvent,
    WeightState,
    cstar_certificate,
    extract_tree,
    init_state,
)

__version__ = "0.1.0"
