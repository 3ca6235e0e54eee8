"""Brute-force reference: evaluate every solution tree and keep the best ones.

Deliberately shares nothing with the solvers beyond the graph and problem
description, so agreement between the two is meaningful.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import islice

from .core.graph import DGraph
from .core.trees import DSpanningTree, iter_solution_trees
from .weights import ProblemSpec, Sense

DEFAULT_LIMIT = 10**6
LIMIT_ENV = "DGRAPH_ORACLE_LIMIT"


class OracleLimitExceeded(RuntimeError):
    pass


def oracle_limit() -> int:
    return int(os.environ.get(LIMIT_ENV, DEFAULT_LIMIT))


@dataclass(frozen=True)
class OracleResult:
    optimum: float
    argmin_trees: tuple[DSpanningTree, ...]
    total_trees: int


def evaluate_tree(graph: DGraph, problem: ProblemSpec, tree: DSpanningTree) -> float:
    unsolved = math.inf if problem.sense is Sense.MIN else -math.inf

    def value(node: DSpanningTree) -> float:
        if not graph.is_p(node.root):
            raise KeyError(f"unknown p-vertex {node.root!r}")
        if node.dson is None:
            return problem.sink_values[node.root]
        if node.dson not in problem.combinators:
            raise KeyError(f"unknown d-vertex {node.dson!r}")
        comb = problem.combinators[node.dson]
        parts = [value(c) for c in node.children]
        if unsolved in parts:
            return unsolved
        if comb.fold == "sum":
            folded = sum(parts)
        elif comb.fold == "max":
            folded = max(parts)
        else:
            folded = min(parts)
        return folded + comb.offset

    return value(tree)


def brute_force_optimum(
    graph: DGraph,
    problem: ProblemSpec,
    root: str,
    limit: int | None = None,
) -> OracleResult:
    """Refuses (raises) rather than answering from a partial enumeration."""
    limit = oracle_limit() if limit is None else limit
    trees = list(islice(iter_solution_trees(graph, root), limit + 1))
    if len(trees) > limit:
        raise OracleLimitExceeded(f"more than {limit} solution trees at {root}")
    pick = min if problem.sense is Sense.MIN else max
    values = [evaluate_tree(graph, problem, t) for t in trees]
    if not values:
        empty = math.inf if problem.sense is Sense.MIN else -math.inf
        return OracleResult(empty, (), 0)
    best = pick(values)
    return OracleResult(best, tuple(t for t, v in zip(trees, values) if v == best), len(trees))
