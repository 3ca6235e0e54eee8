from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .graph import DGraph, RawDGraph, build_dgraph


@dataclass(frozen=True)
class CycleDetected:
    """Witness of a directed cycle: alternating p/d ids, the first id closes the loop."""

    cycle: tuple[str, ...]

    def __str__(self) -> str:
        return " -> ".join(self.cycle + self.cycle[:1])


def p_sinks(graph: DGraph) -> list[str]:
    return [p for p in graph.p_vertices if graph.is_sink(p)]


def p_sources(graph: DGraph) -> list[str]:
    """p-vertices that nothing outside their own strongly connected component depends on.

    On acyclic graphs this is exactly the set of p-vertices without an incoming
    d-arc.  Inside a cycle every p-vertex has a d-father, so the roots of the
    original problem-set are taken from the top components of the condensation.
    """
    g = graph.to_networkx()
    cond = nx.condensation(g)
    member = cond.graph["mapping"]
    top = {c for c in cond.nodes if cond.in_degree(c) == 0}
    return [p for p in graph.p_vertices if member[p] in top]


def d_dfs_order(graph: DGraph) -> list[str] | CycleDetected:
    """Depth-first post-order over all vertices, or a cycle witness.

    In the returned order every arc points from a later to an earlier
    position, so walking it front to back visits sons before fathers.
    """
    WHITE, GREY, BLACK = 0, 1, 2
    color = dict.fromkeys(graph.vertices, WHITE)
    order: list[str] = []
    for start in graph.vertices:
        if color[start] != WHITE:
            continue
        color[start] = GREY
        path = [start]
        stack = [iter(graph.successors(start))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                v = path.pop()
                stack.pop()
                color[v] = BLACK
                order.append(v)
            elif color[nxt] == GREY:
                return CycleDetected(tuple(path[path.index(nxt):]))
            elif color[nxt] == WHITE:
                color[nxt] = GREY
                path.append(nxt)
                stack.append(iter(graph.successors(nxt)))
    return order


def reachable(graph: DGraph, root: str) -> set[str]:
    if not graph.has_vertex(root):
        raise KeyError(f"unknown vertex {root!r}")
    seen = {root}
    todo = [root]
    while todo:
        for w in graph.successors(todo.pop()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def d_subgraph(graph: DGraph, root: str) -> DGraph:
    """The sub-d-graph of everything ``root`` depends on (``root`` must be a p-vertex)."""
    if not graph.is_p(root):
        raise KeyError(f"unknown p-vertex {root!r}")
    keep = reachable(graph, root)
    return build_dgraph(
        RawDGraph(
            [p for p in graph.p_vertices if p in keep],
            [d for d in graph.d_vertices if d in keep],
            [a for a in graph.p_arcs if a[0] in keep],
            [a for a in graph.d_arcs if a[0] in keep],
            {k: v for k, v in graph.labels.items() if k in keep},
        )
    )
