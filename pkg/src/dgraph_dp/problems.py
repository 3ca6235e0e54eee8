"""Adapters that compile concrete optimisation problems into d-graphs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .core.graph import DGraph, RawDGraph, build_dgraph
from .reals import parse_real
from .textformat import FormatError, iter_lines
from .weights import Combinator, ProblemSpec, Sense


@dataclass(frozen=True)
class Digraph:
    vertices: tuple[str, ...]
    arcs: tuple[tuple[str, str, float], ...]
    source: str

    def __post_init__(self) -> None:
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise ValueError("duplicate vertex")
        if self.source not in known:
            raise ValueError(f"source {self.source!r} is not a vertex")
        for u, v, _ in self.arcs:
            if u not in known or v not in known:
                raise ValueError(f"arc {u}->{v} uses an unknown vertex")
            if u == v:
                raise ValueError(f"self-loop at {u}")


@dataclass(frozen=True)
class ChainDims:
    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.dims) < 2:
            raise ValueError("need at least two dimensions (one matrix)")
        if any(int(x) != x or x < 1 for x in self.dims):
            raise ValueError("dimensions must be positive integers")

    @property
    def n(self) -> int:
        return len(self.dims) - 1


def shortest_path_adapter(g: Digraph) -> tuple[DGraph, ProblemSpec]:
    """p-vertex v = "shortest path from the source to v"; arc (u, v, c) becomes a
    d-vertex ``v-via-u`` with the single p-son u and weight w(u) + c.

    Arcs into the source are dropped: the source is the trivial sub-problem
    (value 0).  Other vertices without in-arcs are sinks with value +inf.
    """
    raw = RawDGraph()
    for v in g.vertices:
        raw.add_p(v)
    combinators: dict[str, Combinator] = {}
    taken: set[str] = set(g.vertices)
    for u, v, c in g.arcs:
        if v == g.source:
            continue
        d = base = f"{v}-via-{u}"
        k = 2
        while d in taken:
            d = f"{base}~{k}"
            k += 1
        taken.add(d)
        raw.add_d(d)
        raw.add_parc(v, d)
        raw.add_darc(d, u)
        combinators[d] = Combinator("sum", float(c))
    graph = build_dgraph(raw)
    sinks = {p: (0.0 if p == g.source else math.inf) for p in g.vertices if graph.is_sink(p)}
    greedy = all(c >= 0 for _, _, c in g.arcs)
    return graph, ProblemSpec(Sense.MIN, sinks, combinators, greedy)


def matrix_chain_adapter(dims: ChainDims) -> tuple[DGraph, ProblemSpec]:
    """Optimal parenthesisation: interval (i,j) splits at k into (i,k) and (k+1,j)."""
    n = dims.n
    p = dims.dims
    raw = RawDGraph()
    combinators: dict[str, Combinator] = {}
    for length in range(n, 0, -1):
        for i in range(1, n - length + 2):
            raw.add_p(f"({i},{i + length - 1})")
    for length in range(n, 1, -1):
        for i in range(1, n - length + 2):
            j = i + length - 1
            for k in range(i, j):
                d = f"({i},{j})@{k}"
                raw.add_d(d)
                raw.add_parc(f"({i},{j})", d)
                raw.add_darc(d, f"({i},{k})")
                raw.add_darc(d, f"({k + 1},{j})")
                combinators[d] = Combinator("sum", float(p[i - 1] * p[k] * p[j]))
    sinks = {f"({i},{i})": 0.0 for i in range(1, n + 1)}
    return build_dgraph(raw), ProblemSpec(Sense.MIN, sinks, combinators, greedy_applicable=True)


def undirected(edges: Iterable[tuple[str, str, float]]) -> list[tuple[str, str, float]]:
    out = []
    for u, v, c in edges:
        out += [(u, v, c), (v, u, c)]
    return out


def triangle_examples() -> dict[str, tuple[DGraph, ProblemSpec]]:
    """The OAB triangle in three flavours: all paths, longest paths, shortest paths."""

    def tri(oa: float, ob: float, ab: float) -> Digraph:
        return Digraph(("O", "A", "B"), tuple(undirected([("O", "A", oa), ("O", "B", ob), ("A", "B", ab)])), "O")

    g_all, p_all = shortest_path_adapter(tri(0, 0, 0))
    g_max, p_max = shortest_path_adapter(tri(10, 10, 100))
    p_max = ProblemSpec(Sense.MAX, {"O": 0.0}, p_max.combinators, greedy_applicable=False)
    g_min, p_min = shortest_path_adapter(tri(100, 10, 10))
    return {"all-paths": (g_all, p_all), "max": (g_max, p_max), "min": (g_min, p_min)}


def parse_digraph(text: str) -> Digraph:
    vertices: list[str] = []
    arcs: list[tuple[str, str, float]] = []
    source = None
    for lineno, words in iter_lines(text):
        kind, args = words[0], words[1:]
        try:
            if kind == "vertex" and len(args) == 1:
                vertices.append(args[0])
            elif kind == "arc" and len(args) == 3:
                arcs.append((args[0], args[1], parse_real(args[2])))
            elif kind == "source" and len(args) == 1:
                if source is not None:
                    raise ValueError("source given twice")
                source = args[0]
            else:
                raise ValueError(f"cannot parse {' '.join(words)!r}")
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from None
    if source is None:
        raise FormatError(0, "missing 'source' line")
    try:
        return Digraph(tuple(vertices), tuple(arcs), source)
    except ValueError as exc:
        raise FormatError(0, str(exc)) from None


def parse_chain(text: str) -> ChainDims:
    found = None
    for lineno, words in iter_lines(text):
        if words[0] != "dims" or found is not None:
            raise FormatError(lineno, f"expected a single 'dims' line, got {words[0]!r}")
        try:
            found = ChainDims(tuple(int(w) for w in words[1:]))
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from None
    if found is None:
        raise FormatError(0, "missing 'dims' line")
    return found
