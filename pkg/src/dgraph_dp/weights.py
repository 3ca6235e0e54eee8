"""Weight state of one solver run: p/d weights, vertex colours, update
classification, the zero-cost certificate and top-down tree extraction."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Mapping

from .core.graph import DGraph, PArc
from .core.trees import DSpanningTree
from .reals import format_real

CSTAR_TOL = 1e-9
FOLDS = ("sum", "max", "min")


class Sense(str, Enum):
    MIN = "min"
    MAX = "max"

    @property
    def identity(self) -> float:
        return math.inf if self is Sense.MIN else -math.inf

    def better(self, a: float, b: float) -> bool:
        """Strictly better; ties never count."""
        return a < b if self is Sense.MIN else a > b

    def key(self, a: float) -> float:
        return a if self is Sense.MIN else -a


class ProblemError(ValueError):
    pass


@dataclass(frozen=True)
class Combinator:
    fold: str
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.fold not in FOLDS:
            raise ProblemError(f"unknown fold {self.fold!r}; expected one of {FOLDS}")


@dataclass(frozen=True)
class ProblemSpec:
    """Objective sense, sink optima and the per-d-vertex weight function.

    ``greedy_applicable`` asserts that the greedy (Dijkstra-like) strategy is
    sound.  It is sanity-checked: every combinator must be unable to beat the
    p-son weights it folds, otherwise the flag is dropped with a warning.
    """

    sense: Sense
    sink_values: Mapping[str, float]
    combinators: Mapping[str, Combinator]
    greedy_applicable: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "sense", Sense(self.sense))
        if self.greedy_applicable:
            reason = self.greedy_violation()
            if reason:
                warnings.warn(f"greedy strategy not applicable: {reason}", stacklevel=3)
                object.__setattr__(self, "greedy_applicable", False)

    def greedy_violation(self) -> str | None:
        """Why the combinators may improve on their inputs, or ``None``."""
        if self.sense is Sense.MIN:
            ok_fold, sign = "max", 1.0
        else:
            ok_fold, sign = "min", -1.0
        has_sum = False
        for d, comb in self.combinators.items():
            if comb.fold not in ("sum", ok_fold):
                return f"{d}: fold {comb.fold} can undercut its inputs"
            if sign * comb.offset < 0:
                return f"{d}: offset {format_real(comb.offset)} has the wrong sign"
            has_sum = has_sum or comb.fold == "sum"
        if has_sum:
            for p, v in self.sink_values.items():
                if sign * v < 0:
                    return f"sink {p} value {format_real(v)} makes sum folds non-monotone"
        return None


def apply_combinator(comb: Combinator, values: list[float], identity: float) -> float:
    if any(v == identity for v in values):
        return identity
    if comb.fold == "sum":
        acc = sum(values)
    elif comb.fold == "max":
        acc = max(values)
    else:
        acc = min(values)
    return acc + comb.offset


class Color(IntEnum):
    WHITE = 0
    GREY = 1
    BLACK = 2


@dataclass(frozen=True)
class UpdateEvent:
    arc: PArc
    complete: bool
    effective: bool
    old_weight: float
    new_weight: float
    optimal: bool = False

    def __post_init__(self) -> None:
        if self.optimal and not (self.complete and self.effective):
            raise ValueError("an optimal update must be complete and effective")

    def render(self, tour: int) -> str:
        p, d = self.arc
        kind = "complete" if self.complete else "partial"
        eff = "effective" if self.effective else "null"
        opt = " optimal" if self.optimal else ""
        return (
            f"tour={tour} arc={p}→{d} {kind} {eff}{opt} "
            f"w:{format_real(self.old_weight)}→{format_real(self.new_weight)}"
        )


class ColorError(RuntimeError):
    pass


class UnreachedRoot(LookupError):
    pass


class TreeExtractionError(RuntimeError):
    pass


@dataclass
class WeightState:
    graph: DGraph
    problem: ProblemSpec
    weight: dict[str, float] = field(default_factory=dict)
    color: dict[str, Color] = field(default_factory=dict)
    best_dson: dict[str, str | None] = field(default_factory=dict)
    complete_done: set[PArc] = field(default_factory=set)

    @property
    def sense(self) -> Sense:
        return self.problem.sense

    def copy(self) -> WeightState:
        return WeightState(
            self.graph,
            self.problem,
            dict(self.weight),
            dict(self.color),
            dict(self.best_dson),
            set(self.complete_done),
        )

    def d_weight(self, d: str) -> float:
        # recomputed on every call; p-son weights change under the caller
        comb = self.problem.combinators[d]
        return apply_combinator(comb, [self.weight[q] for q in self.graph.psons(d)], self.sense.identity)

    def _recolor(self, v: str, c: Color) -> None:
        old = self.color[v]
        if c < old:
            raise ColorError(f"{v}: colour may not go back from {old.name} to {c.name}")
        if c == old:
            return
        self.color[v] = c
        if self.graph.is_p(v):
            for d in self.graph.dfathers(v):
                self._refresh_d(d)

    def _refresh_d(self, d: str) -> None:
        sons = [self.color[q] for q in self.graph.psons(d)]
        if all(c == Color.BLACK for c in sons):
            self._recolor(d, Color.BLACK)
        elif all(c != Color.WHITE for c in sons):
            self._recolor(d, Color.GREY)

    def promote(self, p: str) -> None:
        """Mark ``p`` as holding its optimal weight (solver-owned decision)."""
        self._recolor(p, Color.BLACK)

    def is_gratuitous(self, arc: PArc) -> bool:
        p, d = arc
        return arc in self.complete_done or self.color[p] == Color.BLACK or self.color[d] != Color.BLACK

    def update(self, arc: PArc) -> UpdateEvent:
        """Try to improve the p-end of ``arc`` with the current weight of its d-end."""
        p, d = arc
        if self.graph.is_sink(p):
            raise ValueError(f"{p} is a sink; its weight is fixed by the input")
        if self.graph.pfather(d) != p:
            raise KeyError(f"no p-arc {p}->{d}")
        complete = self.color[d] == Color.BLACK
        if self.color[p] == Color.WHITE:
            self._recolor(p, Color.GREY)
        old = self.weight[p]
        cand = self.d_weight(d)
        effective = self.sense.better(cand, old)
        if effective:
            self.weight[p] = cand
            self.best_dson[p] = d
        if complete:
            self.complete_done.add(arc)
        return UpdateEvent(arc, complete, effective, old, self.weight[p])


def init_state(graph: DGraph, problem: ProblemSpec) -> WeightState:
    sinks = {p for p in graph.p_vertices if graph.is_sink(p)}
    missing = [p for p in graph.p_vertices if p in sinks and p not in problem.sink_values]
    if missing:
        raise ProblemError(f"no sink value for {', '.join(missing)}")
    extra = [p for p in problem.sink_values if p not in sinks]
    if extra:
        raise ProblemError(f"sink value given for non-sink or unknown vertex {', '.join(extra)}")
    missing = [d for d in graph.d_vertices if d not in problem.combinators]
    if missing:
        raise ProblemError(f"no combinator for {', '.join(missing)}")
    extra = [d for d in problem.combinators if not graph.has_vertex(d) or graph.is_p(d)]
    if extra:
        raise ProblemError(f"combinator given for unknown d-vertex {', '.join(extra)}")

    state = WeightState(graph, problem)
    for p in graph.p_vertices:
        state.color[p] = Color.WHITE
        state.best_dson[p] = None
        state.weight[p] = float(problem.sink_values[p]) if p in sinks else problem.sense.identity
    for d in graph.d_vertices:
        state.color[d] = Color.WHITE
    for p in graph.p_vertices:
        if p in sinks:
            state.promote(p)
    return state


@dataclass(frozen=True)
class Certificate:
    costs: dict[PArc, float]
    ok: bool
    tree_cost: float
    offending: PArc | None = None

    @property
    def verdict(self) -> str:
        return "ok" if self.ok else "failed"


def _gap(a: float, b: float) -> float:
    return 0.0 if a == b else abs(a - b)


def cstar_certificate(state: WeightState, tol: float = CSTAR_TOL) -> Certificate:
    """Derived p-arc costs |w(p) - w(d)|; the chosen d-sons must cost zero."""
    costs = {arc: _gap(state.weight[arc[0]], state.d_weight(arc[1])) for arc in state.graph.parc_list}
    offending = None
    for arc, c in costs.items():
        if not c >= 0:
            offending = arc
            break
    tree_cost = 0.0
    for p, d in state.best_dson.items():
        if d is None:
            continue
        c = costs[(p, d)]
        tree_cost += c
        if offending is None and not c <= tol:
            offending = (p, d)
    return Certificate(costs, offending is None, tree_cost, offending)


def extract_tree(state: WeightState, root: str) -> DSpanningTree:
    """Rebuild the optimal solution tree of ``root`` from the stored best d-sons."""
    if not state.graph.is_p(root):
        raise KeyError(f"unknown p-vertex {root!r}")
    if state.weight[root] == state.sense.identity:
        raise UnreachedRoot(f"{root} has no solution")

    def walk(p: str, path: frozenset[str]) -> DSpanningTree:
        if p in path:
            raise TreeExtractionError(f"best d-son pointers loop through {p}")
        if state.graph.is_sink(p):
            return DSpanningTree(p)
        d = state.best_dson[p]
        if d is None:
            raise TreeExtractionError(f"{p} has no best d-son")
        below = path | {p}
        return DSpanningTree(p, d, tuple(walk(q, below) for q in state.graph.psons(d)))

    return walk(root, frozenset())
