"""Trace and solution invariants shared by the solver and acceptance tests."""

from __future__ import annotations

from dgraph_dp.core import check_tree
from dgraph_dp.oracle import evaluate_tree
from dgraph_dp.solvers import Solution
from dgraph_dp.weights import CSTAR_TOL, Color


def monotone_weights(sol: Solution) -> bool:
    sense = sol.state.sense
    return all(not sense.better(ev.old_weight, ev.new_weight) for ev in sol.trace.events) and all(
        ev.new_weight == ev.old_weight or sense.better(ev.new_weight, ev.old_weight) for ev in sol.trace.events
    )


def black_stable(sol: Solution) -> bool:
    for p, at in sol.trace.black_at.items():
        for ev in sol.trace.events[at:]:
            if ev.arc[0] == p and ev.effective:
                return False
    return True


def optimal_flags_sound(sol: Solution) -> bool:
    return all(ev.complete and ev.effective for ev in sol.trace.events if ev.optimal)


def single_pass_trace_ok(sol: Solution) -> bool:
    """Only complete updates, no arc completed twice, every reached source black."""
    events = sol.trace.events
    if not all(ev.complete for ev in events):
        return False
    arcs = [ev.arc for ev in events]
    if len(arcs) != len(set(arcs)):
        return False
    ident = sol.state.sense.identity
    return all(sol.colors[s] == Color.BLACK for s in sol.sources if sol.weights[s] != ident)


def certificate_ok(sol: Solution) -> bool:
    cert = sol.certificate
    if not cert.ok or not all(c >= 0 for c in cert.costs.values()):
        return False
    for tree in sol.trees.values():
        if sum(cert.costs[a] for a in tree.parcs()) > CSTAR_TOL:
            return False
    return abs(cert.tree_cost) <= CSTAR_TOL


def trees_consistent(sol: Solution, problem) -> bool:
    g = sol.state.graph
    for s, tree in sol.trees.items():
        if check_tree(g, tree):
            return False
        if evaluate_tree(g, problem, tree) != sol.weights[s]:
            return False
    return True


def fixed_point(sol: Solution) -> bool:
    """Every non-sink weight is the best of its d-son weights."""
    st = sol.state
    g = st.graph
    pick = min if st.sense.value == "min" else max
    return all(st.weight[p] == pick(st.d_weight(d) for d in g.dsons(p)) for p in g.p_vertices if not g.is_sink(p))


def all_invariants(sol: Solution, problem) -> list[str]:
    failed = []
    for name, fn in [
        ("monotone", monotone_weights),
        ("black-stable", black_stable),
        ("optimal-flags", optimal_flags_sound),
        ("certificate", certificate_ok),
        ("fixed-point", fixed_point),
    ]:
        if not fn(sol):
            failed.append(name)
    if not trees_consistent(sol, problem):
        failed.append("trees")
    return failed
