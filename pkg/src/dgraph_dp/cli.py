"""Command line front end: ``dgraph-dp {validate,solve,count,enumerate} FILE --kind KIND``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

from .core.graph import DGraph, InvalidDGraph
from .core.traversal import CycleDetected, d_dfs_order, p_sinks, p_sources
from .core.trees import CyclicSubgraph, count_solutions, enumerate_solution_trees
from .oracle import OracleLimitExceeded, brute_force_optimum
from .problems import matrix_chain_adapter, parse_chain, parse_digraph, shortest_path_adapter
from .reals import format_real
from .solvers import (
    CyclicInput,
    GreedyNotApplicable,
    NonConvergence,
    Solution,
    solve_auto,
    solve_bellman_ford,
    solve_dijkstra,
    solve_topological,
)
from .textformat import FormatError, load_dgraph, serialize_dgraph
from .weights import ProblemError, ProblemSpec

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_NONCONVERGENCE = 4
EXIT_VERIFICATION = 5
EXIT_IO = 6
EXIT_PRECONDITION = 7
EXIT_ORACLE_MISMATCH = 8
EXIT_ORACLE_REFUSED = 9

COMMANDS = ("validate", "solve", "count", "enumerate")
STRATEGIES = ("auto", "topo", "dijkstra", "bellman-ford")
KINDS = ("dgraph", "digraph", "chain")


@dataclass
class RunConfig:
    command: str
    path: str
    kind: str
    strategy: str = "auto"
    oracle: bool = False
    trace: str = "summary"
    format: str = "human"
    roots: tuple[str, ...] = ()
    limit: int = 100
    dump: bool = False


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        self.code = code
        super().__init__(message)


def jreal(x: float) -> float | str:
    return format_real(x) if math.isinf(x) else x


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def load(config: RunConfig) -> tuple[DGraph, ProblemSpec | None]:
    try:
        with open(config.path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {config.path}: {exc.strerror}") from None
    try:
        if config.kind == "dgraph":
            return load_dgraph(text)
        if config.kind == "digraph":
            return shortest_path_adapter(parse_digraph(text))
        return matrix_chain_adapter(parse_chain(text))
    except FormatError as exc:
        raise CliError(EXIT_INVALID, f"{config.path}: {exc}") from None
    except InvalidDGraph as exc:
        raise CliError(EXIT_INVALID, f"{config.path}: invalid d-graph\n{exc.report}") from None
    except ProblemError as exc:
        raise CliError(EXIT_INVALID, f"{config.path}: {exc}") from None


def _roots(config: RunConfig, graph: DGraph) -> list[str]:
    roots = list(config.roots) or p_sources(graph)
    for r in roots:
        if not graph.is_p(r):
            raise CliError(EXIT_INVALID, f"unknown p-vertex {r!r}")
    return roots


def cmd_validate(config: RunConfig, graph: DGraph, problem: ProblemSpec | None) -> tuple[int, str]:
    order = d_dfs_order(graph)
    cyclic = isinstance(order, CycleDetected)
    info = {
        "valid": True,
        "p_vertices": len(graph.p_vertices),
        "d_vertices": len(graph.d_vertices),
        "sources": p_sources(graph),
        "sinks": p_sinks(graph),
        "cyclic": cyclic,
        "cycle": list(order.cycle) if cyclic else None,
        "problem": problem is not None,
        "greedy_applicable": bool(problem and problem.greedy_applicable),
    }
    if config.format == "structured":
        if config.dump:
            info["dgraph"] = serialize_dgraph(graph, problem)
        return EXIT_OK, dumps(info)
    if config.dump:
        return EXIT_OK, serialize_dgraph(graph, problem)
    lines = [
        f"ok: {info['p_vertices']} p-vertices, {info['d_vertices']} d-vertices",
        f"sources: {' '.join(info['sources'])}",
        f"sinks: {' '.join(info['sinks'])}",
        f"cyclic: {'yes (' + str(order) + ')' if cyclic else 'no'}",
    ]
    if problem is not None:
        lines.append(f"objective: {problem.sense.value} greedy={'yes' if problem.greedy_applicable else 'no'}")
    return EXIT_OK, "\n".join(lines) + "\n"


def _solve(config: RunConfig, graph: DGraph, problem: ProblemSpec) -> Solution | NonConvergence:
    try:
        if config.strategy == "topo":
            return solve_topological(graph, problem)
        if config.strategy == "dijkstra":
            return solve_dijkstra(graph, problem)
        if config.strategy == "bellman-ford":
            return solve_bellman_ford(graph, problem)
        return solve_auto(graph, problem)
    except (CyclicInput, GreedyNotApplicable) as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from None
    except ProblemError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None


def _oracle_check(graph: DGraph, problem: ProblemSpec, sol: Solution) -> tuple[bool, list[str]]:
    mismatches = []
    for p in graph.p_vertices:
        res = brute_force_optimum(graph, problem, p)
        if res.optimum != sol.weights[p]:
            mismatches.append(f"{p}: solver {format_real(sol.weights[p])} oracle {format_real(res.optimum)}")
        elif p in sol.trees and sol.trees[p] not in res.argmin_trees:
            mismatches.append(f"{p}: extracted tree is not optimal")
    return not mismatches, mismatches


def _events_json(result: Solution | NonConvergence) -> list[dict]:
    tr = result.trace
    return [
        {
            "tour": tr.tour_of(i),
            "arc": list(ev.arc),
            "complete": ev.complete,
            "effective": ev.effective,
            "optimal": ev.optimal,
            "old": jreal(ev.old_weight),
            "new": jreal(ev.new_weight),
        }
        for i, ev in enumerate(tr.events)
    ]


def cmd_solve(config: RunConfig, graph: DGraph, problem: ProblemSpec | None) -> tuple[int, str]:
    if problem is None:
        raise CliError(EXIT_INVALID, "input has no problem block (objective/sink/combine lines)")
    result = _solve(config, graph, problem)
    full = config.trace == "full"

    if isinstance(result, NonConvergence):
        code = EXIT_NONCONVERGENCE
        doc = {
            "status": "nonconvergence",
            "strategy": result.strategy,
            "tours": result.tours,
            "cap": result.cap,
            "sources": result.sources,
            "weights": {p: jreal(w) for p, w in result.weights.items()},
            "trees": {},
            "certificate": None,
            "events": _events_json(result) if full else [],
        }
        human = [result.summary(), str(result)]
        if full:
            human[1:1] = result.trace.lines()
    else:
        code = EXIT_OK
        if result.verified is False:
            code = EXIT_VERIFICATION
        if not result.certificate.ok:
            code = EXIT_VERIFICATION
        doc = {
            "status": "converged",
            "strategy": result.strategy,
            "tours": result.tours,
            "verified": result.verified,
            "sources": result.sources,
            "weights": {p: jreal(w) for p, w in result.weights.items()},
            "trees": {s: t.to_json() for s, t in result.trees.items()},
            "certificate": {
                "verdict": result.certificate.verdict,
                "tree_cost": result.certificate.tree_cost,
                "offending": list(result.certificate.offending) if result.certificate.offending else None,
            },
            "events": _events_json(result) if full else [],
        }
        shown = graph.p_vertices if full else result.sources
        human = ["weights:"] + [f"  {p}\t{format_real(result.weights[p])}" for p in shown]
        for s in result.sources:
            if s in result.trees:
                human.append(f"tree {s}:")
                human += ["  " + line for line in result.trees[s].render()]
            else:
                human.append(f"tree {s}: unreachable")
        if full:
            human.append("trace:")
            human += ["  " + line for line in result.trace.lines()]
        if config.oracle and code == EXIT_OK:
            try:
                ok, problems = _oracle_check(graph, problem, result)
            except OracleLimitExceeded as exc:
                raise CliError(EXIT_ORACLE_REFUSED, f"oracle refused: {exc}") from None
            doc["oracle"] = {"agrees": ok, "mismatches": problems}
            human.append("oracle: agrees" if ok else "oracle: MISMATCH")
            human += ["  " + m for m in problems]
            if not ok:
                code = EXIT_ORACLE_MISMATCH
        human.append(result.summary())

    if config.format == "structured":
        return code, dumps(doc)
    if config.trace == "silent":
        return code, ""
    return code, "\n".join(human) + "\n"


def cmd_count(config: RunConfig, graph: DGraph, problem: ProblemSpec | None) -> tuple[int, str]:
    counts = {}
    for r in _roots(config, graph):
        try:
            counts[r] = count_solutions(graph, r)
        except CyclicSubgraph as exc:
            raise CliError(EXIT_PRECONDITION, str(exc)) from None
    if config.format == "structured":
        return EXIT_OK, dumps({"counts": counts})
    return EXIT_OK, "".join(f"{r}\t{c}\n" for r, c in counts.items())


def cmd_enumerate(config: RunConfig, graph: DGraph, problem: ProblemSpec | None) -> tuple[int, str]:
    out: dict[str, dict] = {}
    human: list[str] = []
    for r in _roots(config, graph):
        en = enumerate_solution_trees(graph, r, config.limit)
        out[r] = {"trees": [t.to_json() for t in en], "truncated": en.truncated}
        for i, t in enumerate(en, 1):
            human.append(f"{r} #{i}:")
            human += ["  " + line for line in t.render()]
        note = f" (truncated at {config.limit})" if en.truncated else ""
        human.append(f"{r}: {len(en)} trees{note}")
    if config.format == "structured":
        return EXIT_OK, dumps({"enumeration": out})
    return EXIT_OK, "\n".join(human) + "\n"


HANDLERS = {"validate": cmd_validate, "solve": cmd_solve, "count": cmd_count, "enumerate": cmd_enumerate}


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns (exit status, rendered report)."""
    try:
        graph, problem = load(config)
        return HANDLERS[config.command](config, graph, problem)
    except CliError as exc:
        if config.format == "structured":
            return exc.code, dumps({"error": str(exc), "exit": exc.code})
        return exc.code, f"error: {exc}\n"


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dgraph-dp", description="Solve DP problems modelled as d-graphs.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("path", help="input file")
    ap.add_argument("--kind", required=True, choices=KINDS, help="input format")
    ap.add_argument("--strategy", default="auto", choices=STRATEGIES)
    ap.add_argument("--oracle", action="store_true", help="cross-check weights by brute force")
    ap.add_argument("--trace", default="summary", choices=("silent", "summary", "full"))
    ap.add_argument("--format", default="human", choices=("human", "structured"))
    ap.add_argument("--root", action="append", default=[], help="root p-vertex for count/enumerate (repeatable)")
    ap.add_argument("--limit", type=int, default=100, help="maximum trees listed by enumerate")
    ap.add_argument("--dump", action="store_true", help="validate: print the compiled d-graph")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.strategy != "auto" and args.command != "solve":
        print("warning: --strategy only applies to solve", file=sys.stderr)
    config = RunConfig(
        command=args.command,
        path=args.path,
        kind=args.kind,
        strategy=args.strategy,
        oracle=args.oracle,
        trace=args.trace,
        format=args.format,
        roots=tuple(args.root),
        limit=args.limit,
        dump=args.dump,
    )
    code, text = run(config)
    stream = sys.stderr if text.startswith("error: ") else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
