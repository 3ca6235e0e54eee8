"""Solution trees of a d-graph: enumeration and the sum-of-products count."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from typing import Iterator

from .graph import DGraph
from .traversal import CycleDetected, d_dfs_order, d_subgraph


class CyclicSubgraph(ValueError):
    pass


@dataclass(frozen=True)
class DSpanningTree:
    """A rooted solution tree.

    ``dson`` is the decomposition chosen for ``root`` (``None`` at a p-sink) and
    ``children`` holds one subtree per p-son of ``dson``, in stored order.  The
    same sub-problem may occur in several branches with different choices,
    which is what makes the tree count a plain sum of products.
    """

    root: str
    dson: str | None = None
    children: tuple[DSpanningTree, ...] = ()

    def nodes(self) -> Iterator[DSpanningTree]:
        yield self
        for c in self.children:
            yield from c.nodes()

    def parcs(self) -> list[tuple[str, str]]:
        return [(n.root, n.dson) for n in self.nodes() if n.dson is not None]

    def choices(self) -> dict[str, str] | None:
        """Flat p -> d map, or ``None`` if some p-vertex is decomposed two different ways."""
        out: dict[str, str] = {}
        for n in self.nodes():
            if n.dson is None:
                continue
            if out.setdefault(n.root, n.dson) != n.dson:
                return None
        return out

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0) if self.dson else 0

    def render(self, indent: str = "  ") -> list[str]:
        lines: list[str] = []

        def walk(n: DSpanningTree, level: int) -> None:
            tail = f" <- {n.dson}" if n.dson else " (sink)"
            lines.append(f"{indent * level}{n.root}{tail}")
            for c in n.children:
                walk(c, level + 1)

        walk(self, 0)
        return lines

    def to_json(self) -> dict:
        return {"p": self.root, "d": self.dson, "sons": [c.to_json() for c in self.children]}

    @classmethod
    def from_json(cls, obj: dict) -> DSpanningTree:
        return cls(obj["p"], obj["d"], tuple(cls.from_json(c) for c in obj["sons"]))


def check_tree(graph: DGraph, tree: DSpanningTree) -> list[str]:
    """Structural problems with ``tree`` (empty list if it is a valid solution tree)."""
    problems: list[str] = []

    def walk(n: DSpanningTree, path: frozenset[str]) -> None:
        if not graph.is_p(n.root):
            problems.append(f"{n.root!r} is not a p-vertex")
            return
        if n.root in path:
            problems.append(f"{n.root} repeats on a root-to-leaf path")
            return
        if n.dson is None:
            if not graph.is_sink(n.root):
                problems.append(f"non-sink {n.root} has no chosen d-son")
            if n.children:
                problems.append(f"sink {n.root} has children")
            return
        if n.dson not in graph.dsons(n.root):
            problems.append(f"{n.dson!r} is not a d-son of {n.root}")
            return
        if tuple(c.root for c in n.children) != graph.psons(n.dson):
            problems.append(f"children of {n.root} do not match the p-sons of {n.dson}")
            return
        for c in n.children:
            walk(c, path | {n.root})

    walk(tree, frozenset())
    return problems


def iter_solution_trees(graph: DGraph, root: str) -> Iterator[DSpanningTree]:
    """Lazily yield every solution tree rooted at ``root`` in deterministic order.

    A p-vertex may not reappear below itself, so the enumeration is finite on
    cyclic graphs as well.
    """
    if not graph.is_p(root):
        raise KeyError(f"unknown p-vertex {root!r}")

    def trees(p: str, banned: frozenset[str]) -> Iterator[DSpanningTree]:
        if graph.is_sink(p):
            yield DSpanningTree(p)
            return
        below = banned | {p}
        for d in graph.dsons(p):
            sons = graph.psons(d)
            if any(q in below for q in sons):
                continue
            for combo in combos(sons, 0, below):
                yield DSpanningTree(p, d, combo)

    def combos(sons: tuple[str, ...], i: int, banned: frozenset[str]) -> Iterator[tuple[DSpanningTree, ...]]:
        if i == len(sons):
            yield ()
            return
        for head in trees(sons[i], banned):
            for rest in combos(sons, i + 1, banned):
                yield (head,) + rest

    return trees(root, frozenset())


@dataclass(frozen=True)
class TreeEnumeration:
    trees: tuple[DSpanningTree, ...]
    truncated: bool

    def __len__(self) -> int:
        return len(self.trees)

    def __iter__(self) -> Iterator[DSpanningTree]:
        return iter(self.trees)


def enumerate_solution_trees(graph: DGraph, root: str, limit: int | None = None) -> TreeEnumeration:
    it = iter_solution_trees(graph, root)
    if limit is None:
        return TreeEnumeration(tuple(it), False)
    got = tuple(islice(it, limit + 1))
    return TreeEnumeration(got[:limit], len(got) > limit)


def count_solutions(graph: DGraph, root: str) -> int:
    """Number of solution trees of ``root``: 1 at sinks, sum over d-sons of the
    product over their p-sons elsewhere.  Exact integer arithmetic."""
    sub = d_subgraph(graph, root)
    order = d_dfs_order(sub)
    if isinstance(order, CycleDetected):
        raise CyclicSubgraph(f"sub-d-graph of {root} is cyclic: {order}")
    count: dict[str, int] = {}
    for v in order:
        if not sub.is_p(v):
            continue
        if sub.is_sink(v):
            count[v] = 1
            continue
        total = 0
        for d in sub.dsons(v):
            prod = 1
            for q in sub.psons(d):
                prod *= count[q]
            total += prod
        count[v] = total
    return count[root]
