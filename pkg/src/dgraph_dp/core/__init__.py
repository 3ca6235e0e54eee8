from .graph import (
    DGraph,
    InvalidDGraph,
    PArc,
    RawDGraph,
    ValidationReport,
    Violation,
    build_dgraph,
    from_arcs,
    validate_dgraph,
)
from .traversal import CycleDetected, d_dfs_order, d_subgraph, p_sinks, p_sources, reachable
from .trees import (
    CyclicSubgraph,
    DSpanningTree,
    TreeEnumeration,
    check_tree,
    count_solutions,
    enumerate_solution_trees,
    iter_solution_trees,
)
