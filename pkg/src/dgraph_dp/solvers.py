"""Bottom-up DP strategies on d-graphs.

* :func:`solve_topological` -- one pass in reverse topological order (acyclic graphs).
* :func:`solve_dijkstra` -- greedy frontier of finished decompositions (cyclic graphs
  whose combinators cannot beat their inputs).
* :func:`solve_bellman_ford` -- repeated tours over a complete arc sequence until a
  tour changes nothing.
* :func:`solve_auto` -- picks one of the above after a d-DFS pass and, for the greedy
  path, re-checks the result with Bellman-Ford tours.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field, replace
from typing import Sequence

from .core.graph import DGraph, PArc
from .core.traversal import CycleDetected, d_dfs_order, p_sources
from .core.trees import DSpanningTree
from .reals import format_real
from .weights import (
    Certificate,
    Color,
    ProblemSpec,
    UpdateEvent,
    WeightState,
    cstar_certificate,
    extract_tree,
    init_state,
)


class CyclicInput(ValueError):
    def __init__(self, witness: CycleDetected) -> None:
        self.witness = witness
        super().__init__(f"graph is cyclic: {witness}")


class GreedyNotApplicable(ValueError):
    pass


@dataclass
class UpdateTrace:
    events: list[UpdateEvent] = field(default_factory=list)
    tour_marks: list[int] = field(default_factory=list)
    # p-vertex -> number of events recorded when it turned black
    black_at: dict[str, int] = field(default_factory=dict)

    def tour_of(self, index: int) -> int:
        return sum(1 for m in self.tour_marks if m <= index)

    def lines(self) -> list[str]:
        return [ev.render(self.tour_of(i)) for i, ev in enumerate(self.events)]

    def tours(self) -> list[list[UpdateEvent]]:
        bounds = self.tour_marks + [len(self.events)]
        return [self.events[a:b] for a, b in zip(bounds, bounds[1:])]


@dataclass
class Solution:
    strategy: str
    weights: dict[str, float]
    trees: dict[str, DSpanningTree]
    trace: UpdateTrace
    tours: int
    certificate: Certificate
    sources: list[str]
    state: WeightState = field(repr=False)
    verified: bool | None = None

    @property
    def colors(self) -> dict[str, Color]:
        return self.state.color

    def tree_for(self, p: str) -> DSpanningTree:
        return extract_tree(self.state, p)

    def summary(self) -> str:
        line = f"strategy={self.strategy} tours={self.tours} certificate={self.certificate.verdict}"
        if self.verified is not None:
            line += f" verification={'clean' if self.verified else 'failed'}"
        return line


@dataclass
class NonConvergence:
    """Improvements were still happening after the last allowed tour."""

    strategy: str
    tours: int
    cap: int
    weights: dict[str, float]
    trace: UpdateTrace
    sources: list[str]

    def summary(self) -> str:
        return f"strategy={self.strategy} tours={self.tours} nonconvergence cap={self.cap}"

    def __str__(self) -> str:
        changed = [ev for ev in self.trace.tours()[-1] if ev.effective] if self.trace.tour_marks else []
        where = ", ".join(f"{ev.arc[0]}={format_real(ev.new_weight)}" for ev in changed[:5])
        return f"no convergence within {self.cap} tours; still improving: {where}"


def _promote(state: WeightState, trace: UpdateTrace, p: str) -> None:
    if state.color[p] != Color.BLACK:
        state.promote(p)
        trace.black_at[p] = len(trace.events)


def _start(graph: DGraph, problem: ProblemSpec) -> tuple[WeightState, UpdateTrace]:
    state = init_state(graph, problem)
    trace = UpdateTrace()
    for p in graph.p_vertices:
        if graph.is_sink(p):
            trace.black_at[p] = 0
    return state, trace


def _finish(state: WeightState, trace: UpdateTrace, strategy: str, tours: int, verified: bool | None = None) -> Solution:
    graph = state.graph
    final = state.weight
    trace.events = [
        replace(ev, optimal=True)
        if ev.complete and ev.effective and ev.new_weight == final[ev.arc[0]]
        else ev
        for ev in trace.events
    ]
    sources = p_sources(graph)
    trees = {s: extract_tree(state, s) for s in sources if final[s] != state.sense.identity}
    return Solution(
        strategy=strategy,
        weights=dict(final),
        trees=trees,
        trace=trace,
        tours=tours,
        certificate=cstar_certificate(state),
        sources=sources,
        state=state,
        verified=verified,
    )


def solve_topological(graph: DGraph, problem: ProblemSpec) -> Solution:
    order = d_dfs_order(graph)
    if isinstance(order, CycleDetected):
        raise CyclicInput(order)
    state, trace = _start(graph, problem)
    for v in order:
        if not graph.is_p(v) or graph.is_sink(v):
            continue
        for d in graph.dsons(v):
            trace.events.append(state.update((v, d)))
        _promote(state, trace, v)
    return _finish(state, trace, "topological", 0)


def _dijkstra(graph: DGraph, problem: ProblemSpec) -> tuple[WeightState, UpdateTrace]:
    if not problem.greedy_applicable:
        raise GreedyNotApplicable("problem is not flagged greedy-applicable")
    state, trace = _start(graph, problem)
    key = problem.sense.key
    frontier: list[tuple[float, int, str]] = []
    offered: set[str] = set()

    def offer(d: str) -> None:
        if d not in offered and state.color[d] == Color.BLACK:
            offered.add(d)
            heapq.heappush(frontier, (key(state.d_weight(d)), graph.order_of(d), d))

    for d in graph.d_vertices:
        offer(d)
    while frontier:
        _, _, d = heapq.heappop(frontier)
        p = graph.pfather(d)
        if state.color[p] == Color.BLACK:
            continue
        trace.events.append(state.update((p, d)))
        if not frontier or key(state.weight[p]) <= frontier[0][0]:
            _promote(state, trace, p)
            for f in graph.dfathers(p):
                offer(f)
    return state, trace


def solve_dijkstra(graph: DGraph, problem: ProblemSpec) -> Solution:
    state, trace = _dijkstra(graph, problem)
    return _finish(state, trace, "dijkstra", 0)


def _tours(state: WeightState, trace: UpdateTrace, seq: Sequence[PArc], cap: int) -> tuple[int, bool]:
    graph = state.graph
    for tour in range(1, cap + 1):
        trace.tour_marks.append(len(trace.events))
        improved = False
        for arc in seq:
            ev = state.update(arc)
            trace.events.append(ev)
            improved = improved or ev.effective
            p = arc[0]
            if state.color[p] != Color.BLACK and all((p, d) in state.complete_done for d in graph.dsons(p)):
                _promote(state, trace, p)
        if not improved:
            for p in graph.p_vertices:
                _promote(state, trace, p)
            return tour, True
    return cap, False


def tour_cap(graph: DGraph) -> int:
    return len(graph.p_vertices) + 1


def _check_sequence(graph: DGraph, seq: Sequence[PArc]) -> None:
    known = set(graph.parc_list)
    bad = [a for a in seq if tuple(a) not in known]
    if bad:
        raise ValueError(f"not p-arcs of the graph: {bad[:3]}")
    missing = known - {tuple(a) for a in seq}
    if missing:
        raise ValueError(f"arc sequence is not complete; missing {sorted(missing)[:3]}")


def solve_bellman_ford(
    graph: DGraph,
    problem: ProblemSpec,
    arc_sequence: Sequence[PArc] | None = None,
) -> Solution | NonConvergence:
    seq = list(graph.parc_list) if arc_sequence is None else [tuple(a) for a in arc_sequence]
    _check_sequence(graph, seq)
    state, trace = _start(graph, problem)
    cap = tour_cap(graph)
    tours, converged = _tours(state, trace, seq, cap)
    if not converged:
        return NonConvergence("bellman-ford", tours, cap, dict(state.weight), trace, p_sources(graph))
    return _finish(state, trace, "bellman-ford", tours)


def solve_auto(graph: DGraph, problem: ProblemSpec) -> Solution | NonConvergence:
    """d-DFS first; topological if acyclic, else greedy plus verification tours,
    else Bellman-Ford.  A greedy result that verification had to improve comes
    back with ``verified=False`` and the corrected weights."""
    if not isinstance(d_dfs_order(graph), CycleDetected):
        return solve_topological(graph, problem)
    if not problem.greedy_applicable:
        return solve_bellman_ford(graph, problem)

    state, trace = _dijkstra(graph, problem)
    used = list(dict.fromkeys(ev.arc for ev in trace.events))
    seen = set(used)
    seq = used + [a for a in graph.parc_list if a not in seen]
    mark = len(trace.events)
    cap = tour_cap(graph)
    tours, converged = _tours(state, trace, seq, cap)
    if not converged:
        return NonConvergence("dijkstra+bellman-ford", tours, cap, dict(state.weight), trace, p_sources(graph))
    clean = not any(ev.effective for ev in trace.events[mark:])
    return _finish(state, trace, "dijkstra", tours, verified=clean)
