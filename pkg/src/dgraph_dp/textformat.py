"""Line-oriented d-graph file format.

::

    # structure
    pvertex <id> [label]
    dvertex <id> [label]
    parc <p-id> <d-id> [cost]
    darc <d-id> <p-id>
    # optional problem block
    objective min|max
    sink <p-id> <value>
    combine <d-id> sum|max|min <offset>
    greedy yes|no

Everything from ``#`` to the end of a line is a comment.  Without a ``greedy``
line the flag is set when the combinators pass the greedy sanity check.
"""

from __future__ import annotations

from typing import Iterator

from .core.graph import DGraph, RawDGraph, build_dgraph
from .reals import format_real, parse_real
from .weights import Combinator, ProblemSpec, Sense


class FormatError(ValueError):
    def __init__(self, lineno: int, message: str) -> None:
        self.lineno = lineno
        where = f"line {lineno}: " if lineno else ""
        super().__init__(f"{where}{message}")


def iter_lines(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(text.splitlines(), 1):
        words = line.split("#", 1)[0].split()
        if words:
            yield lineno, words


def _label(line: str) -> str | None:
    body = line.split("#", 1)[0]
    parts = body.split(None, 2)
    return parts[2].strip() if len(parts) > 2 else None


def parse_dgraph(text: str) -> tuple[RawDGraph, ProblemSpec | None]:
    """Parse structure and optional problem block (structure is not validated here)."""
    raw = RawDGraph()
    lines = text.splitlines()
    sense = None
    sinks: dict[str, float] = {}
    combs: dict[str, Combinator] = {}
    greedy: bool | None = None
    in_problem = False
    for lineno, words in iter_lines(text):
        kind, args = words[0], words[1:]
        try:
            if kind in ("pvertex", "dvertex") and args:
                add = raw.add_p if kind == "pvertex" else raw.add_d
                add(args[0], _label(lines[lineno - 1]))
            elif kind == "parc" and len(args) in (2, 3):
                raw.add_parc(args[0], args[1], parse_real(args[2]) if len(args) == 3 else None)
            elif kind == "darc" and len(args) == 2:
                raw.add_darc(args[0], args[1])
            elif kind == "objective" and len(args) == 1:
                if sense is not None:
                    raise ValueError("objective given twice")
                sense = Sense(args[0])
                in_problem = True
            elif kind == "sink" and len(args) == 2:
                if args[0] in sinks:
                    raise ValueError(f"sink value for {args[0]} given twice")
                sinks[args[0]] = parse_real(args[1])
                in_problem = True
            elif kind == "combine" and len(args) == 3:
                if args[0] in combs:
                    raise ValueError(f"combinator for {args[0]} given twice")
                combs[args[0]] = Combinator(args[1], parse_real(args[2]))
                in_problem = True
            elif kind == "greedy" and len(args) == 1 and args[0] in ("yes", "no"):
                greedy = args[0] == "yes"
                in_problem = True
            else:
                raise ValueError(f"cannot parse {' '.join(words)!r}")
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from None
    if not in_problem:
        return raw, None
    if sense is None:
        raise FormatError(0, "problem block without an 'objective' line")
    problem = ProblemSpec(sense, sinks, combs, False)
    if greedy is None:
        greedy = problem.greedy_violation() is None
    if greedy:
        problem = ProblemSpec(sense, sinks, combs, True)
    return raw, problem


def load_dgraph(text: str) -> tuple[DGraph, ProblemSpec | None]:
    raw, problem = parse_dgraph(text)
    return build_dgraph(raw), problem


def serialize_dgraph(graph: DGraph, problem: ProblemSpec | None = None) -> str:
    def lab(v: str) -> str:
        return f" {graph.labels[v]}" if v in graph.labels else ""

    lines = [f"pvertex {p}{lab(p)}" for p in graph.p_vertices]
    lines += [f"dvertex {d}{lab(d)}" for d in graph.d_vertices]
    for p, d, c in graph.p_arcs:
        lines.append(f"parc {p} {d}" + ("" if c is None else f" {format_real(c)}"))
    lines += [f"darc {d} {p}" for d, p in graph.d_arcs]
    if problem is not None:
        lines.append(f"objective {problem.sense.value}")
        lines += [f"sink {p} {format_real(v)}" for p, v in problem.sink_values.items()]
        for d, comb in problem.combinators.items():
            lines.append(f"combine {d} {comb.fold} {format_real(comb.offset)}")
        lines.append(f"greedy {'yes' if problem.greedy_applicable else 'no'}")
    return "\n".join(lines) + "\n"

