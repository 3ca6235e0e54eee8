"""The d-graph data model: p-vertices (sub-problems), d-vertices (decompositions),
p-arcs (p -> d) and d-arcs (d -> p), plus structural validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import networkx as nx

PArc = tuple[str, str]
"""A p-arc is identified by its (p-vertex, d-vertex) endpoints."""


@dataclass(frozen=True)
class Violation:
    rule: str
    where: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule}] {self.where}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "\n".join(str(v) for v in self.violations)


class InvalidDGraph(ValueError):
    def __init__(self, report: ValidationReport) -> None:
        self.report = report
        super().__init__(str(report))


@dataclass
class RawDGraph:
    """Unvalidated graph description, as read from a file or built by an adapter."""

    p_vertices: list[str] = field(default_factory=list)
    d_vertices: list[str] = field(default_factory=list)
    p_arcs: list[tuple[str, str, float | None]] = field(default_factory=list)
    d_arcs: list[tuple[str, str]] = field(default_factory=list)
    labels: dict[str, str] = field(default_factory=dict)

    def add_p(self, vid: str, label: str | None = None) -> None:
        self.p_vertices.append(vid)
        if label:
            self.labels[vid] = label

    def add_d(self, vid: str, label: str | None = None) -> None:
        self.d_vertices.append(vid)
        if label:
            self.labels[vid] = label

    def add_parc(self, p: str, d: str, cost: float | None = None) -> None:
        self.p_arcs.append((p, d, cost))

    def add_darc(self, d: str, p: str) -> None:
        self.d_arcs.append((d, p))


def _bad_id(vid: str) -> bool:
    return not vid or any(c.isspace() for c in vid) or "#" in vid


def validate_dgraph(raw: RawDGraph) -> ValidationReport:
    out: list[Violation] = []
    pset, dset = set(), set()
    for vid in raw.p_vertices + raw.d_vertices:
        if _bad_id(vid):
            out.append(Violation("vertex-id", repr(vid), "ids must be non-empty, without whitespace or '#'"))
    for vid in raw.p_vertices:
        if vid in pset:
            out.append(Violation("duplicate-vertex", vid, "p-vertex declared twice"))
        pset.add(vid)
    for vid in raw.d_vertices:
        if vid in dset or vid in pset:
            out.append(Violation("duplicate-vertex", vid, "d-vertex id already in use"))
        dset.add(vid)
    for vid, label in raw.labels.items():
        if vid not in pset and vid not in dset:
            out.append(Violation("unknown-vertex", vid, "label for undeclared vertex"))
        elif not label or "#" in label or "\n" in label or label != label.strip():
            out.append(Violation("label", vid, "labels must be trimmed, non-empty, without '#' or newlines"))
    if not pset:
        out.append(Violation("empty", "-", "a d-graph needs at least one p-vertex"))

    fathers: dict[str, list[str]] = {d: [] for d in dset}
    sons: dict[str, list[str]] = {d: [] for d in dset}
    seen: set[tuple[str, str, str]] = set()
    for p, d, cost in raw.p_arcs:
        where = f"{p}->{d}"
        if p not in pset or d not in dset:
            kind = "bipartite" if (p in dset or d in pset) else "unknown-vertex"
            out.append(Violation(kind, where, "p-arcs must go from a p-vertex to a d-vertex"))
            continue
        if ("p", p, d) in seen:
            out.append(Violation("duplicate-arc", where, "p-arc listed twice"))
            continue
        seen.add(("p", p, d))
        fathers[d].append(p)
    for d, p in raw.d_arcs:
        where = f"{d}->{p}"
        if d not in dset or p not in pset:
            kind = "bipartite" if (d in pset or p in dset) else "unknown-vertex"
            out.append(Violation(kind, where, "d-arcs must go from a d-vertex to a p-vertex"))
            continue
        if ("d", d, p) in seen:
            out.append(Violation("duplicate-arc", where, "d-arc listed twice"))
            continue
        seen.add(("d", d, p))
        sons[d].append(p)

    for d in raw.d_vertices:
        if d not in fathers:
            continue
        if len(fathers[d]) != 1:
            out.append(Violation("d-in-degree", d, f"d-vertex has {len(fathers[d])} p-in-neighbours, expected exactly 1"))
        if not sons[d]:
            out.append(Violation("d-out-degree", d, "d-vertex has no p-son"))

    if pset:
        has_out = {p for p, d, _ in raw.p_arcs if p in pset and d in dset}
        if not (pset - has_out):
            out.append(Violation("no-sink", "-", "every p-vertex has a p-out-arc; trivial sub-problems are missing"))
        und = nx.Graph()
        und.add_nodes_from(pset | dset)
        und.add_edges_from((p, d) for p, d, _ in raw.p_arcs if p in pset and d in dset)
        und.add_edges_from((d, p) for d, p in raw.d_arcs if d in dset and p in pset)
        if not nx.is_connected(und):
            n = nx.number_connected_components(und)
            out.append(Violation("disconnected", "-", f"graph has {n} connected components"))
    return ValidationReport(tuple(out))


@dataclass(frozen=True)
class DGraph:
    """Immutable validated d-graph.  Build through :func:`build_dgraph`.

    All iteration orders follow the stored insertion order, which makes
    traversals, traces and tie-breaks reproducible.
    """

    p_vertices: tuple[str, ...]
    d_vertices: tuple[str, ...]
    p_arcs: tuple[tuple[str, str, float | None], ...]
    d_arcs: tuple[tuple[str, str], ...]
    labels: Mapping[str, str] = field(default_factory=dict, hash=False)

    @cached_property
    def _pset(self) -> frozenset[str]:
        return frozenset(self.p_vertices)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.p_vertices + self.d_vertices)}

    @cached_property
    def _dsons(self) -> dict[str, tuple[str, ...]]:
        acc: dict[str, list[str]] = {p: [] for p in self.p_vertices}
        for p, d, _ in self.p_arcs:
            acc[p].append(d)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def _father(self) -> dict[str, str]:
        return {d: p for p, d, _ in self.p_arcs}

    @cached_property
    def _psons(self) -> dict[str, tuple[str, ...]]:
        acc: dict[str, list[str]] = {d: [] for d in self.d_vertices}
        for d, p in self.d_arcs:
            acc[d].append(p)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def _dfathers(self) -> dict[str, tuple[str, ...]]:
        acc: dict[str, list[str]] = {p: [] for p in self.p_vertices}
        for d, p in self.d_arcs:
            acc[p].append(d)
        return {k: tuple(v) for k, v in acc.items()}

    @cached_property
    def parc_list(self) -> tuple[PArc, ...]:
        return tuple((p, d) for p, d, _ in self.p_arcs)

    @cached_property
    def input_costs(self) -> dict[PArc, float]:
        return {(p, d): c for p, d, c in self.p_arcs if c is not None}

    def is_p(self, vid: str) -> bool:
        return vid in self._pset

    def has_vertex(self, vid: str) -> bool:
        return vid in self._index

    def order_of(self, vid: str) -> int:
        return self._index[vid]

    def dsons(self, p: str) -> tuple[str, ...]:
        return self._dsons[p]

    def psons(self, d: str) -> tuple[str, ...]:
        return self._psons[d]

    def pfather(self, d: str) -> str:
        return self._father[d]

    def dfathers(self, p: str) -> tuple[str, ...]:
        return self._dfathers[p]

    def successors(self, vid: str) -> tuple[str, ...]:
        return self._dsons[vid] if vid in self._pset else self._psons[vid]

    def is_sink(self, p: str) -> bool:
        return not self._dsons[p]

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.p_vertices + self.d_vertices

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.parc_list)
        g.add_edges_from(self.d_arcs)
        return g

    def to_raw(self) -> RawDGraph:
        return RawDGraph(
            list(self.p_vertices),
            list(self.d_vertices),
            list(self.p_arcs),
            list(self.d_arcs),
            dict(self.labels),
        )


def build_dgraph(raw: RawDGraph) -> DGraph:
    """Validate ``raw`` and freeze it; raises :class:`InvalidDGraph` on any breach."""
    report = validate_dgraph(raw)
    if not report.ok:
        raise InvalidDGraph(report)
    return DGraph(
        tuple(raw.p_vertices),
        tuple(raw.d_vertices),
        tuple((p, d, None if c is None else float(c)) for p, d, c in raw.p_arcs),
        tuple(raw.d_arcs),
        dict(raw.labels),
    )


def from_arcs(
    p_vertices: Iterable[str],
    decompositions: Iterable[tuple[str, str, Iterable[str]]],
) -> DGraph:
    """Shorthand builder: ``decompositions`` lists ``(d_id, p_father, p_sons)``."""
    raw = RawDGraph()
    for p in p_vertices:
        raw.add_p(p)
    for d, father, psons in decompositions:
        raw.add_d(d)
        raw.add_parc(father, d)
        for q in psons:
            raw.add_darc(d, q)
    return build_dgraph(raw)
