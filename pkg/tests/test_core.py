import random

import networkx as nx
import pytest
from hypothesis import HealthCheck, given, settings

from dgraph_dp.core import (
    CycleDetected,
    CyclicSubgraph,
    DSpanningTree,
    InvalidDGraph,
    RawDGraph,
    build_dgraph,
    check_tree,
    count_solutions,
    d_dfs_order,
    d_subgraph,
    enumerate_solution_trees,
    from_arcs,
    p_sinks,
    p_sources,
    validate_dgraph,
)
from dgraph_dp.problems import ChainDims, matrix_chain_adapter, triangle_examples
from dgraph_dp.textformat import load_dgraph, parse_dgraph, serialize_dgraph

from instances import catalan, chain_brute_force, dgraphs, random_dgraph

PROPS = settings(max_examples=120, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@pytest.fixture
def tri():
    return triangle_examples()


def single():
    raw = RawDGraph()
    raw.add_p("x")
    return build_dgraph(raw)


def chain(*dims):
    return matrix_chain_adapter(ChainDims(dims))[0]


# --- build / validate ---------------------------------------------------------

def test_triangle_graph_shape(tri):
    g, _ = tri["min"]
    assert set(g.p_vertices) == {"O", "A", "B"}
    assert set(g.d_vertices) == {"A-via-O", "A-via-B", "B-via-O", "B-via-A"}
    # A and B depend on each other through d-vertices
    assert g.psons("A-via-B") == ("B",) and g.pfather("A-via-B") == "A"
    assert g.psons("B-via-A") == ("A",) and g.pfather("B-via-A") == "B"


def test_two_fathers_rejected():
    raw = RawDGraph(["a", "b", "c"], ["d"], [("a", "d", None), ("b", "d", None)], [("d", "c")])
    report = validate_dgraph(raw)
    assert not report.ok
    assert "d-in-degree" in {v.rule for v in report.violations}
    with pytest.raises(InvalidDGraph) as err:
        build_dgraph(raw)
    assert err.value.report == report


@pytest.mark.parametrize(
    "raw, rule",
    [
        (RawDGraph(["a", "b"], ["d"], [("a", "d", None)], []), "d-out-degree"),
        (RawDGraph(["a", "b"], ["d"], [], [("d", "b")]), "d-in-degree"),
        (RawDGraph(["a", "b"], ["d"], [("a", "b", None)], [("d", "b")]), "bipartite"),
        (RawDGraph(["a", "b"], ["d"], [("a", "d", None)], [("d", "b"), ("d", "b")]), "duplicate-arc"),
        (RawDGraph(["a", "b", "c"], ["d"], [("a", "d", None)], [("d", "b")]), "disconnected"),
        (RawDGraph(["a", "a"], [], [], []), "duplicate-vertex"),
        (RawDGraph(["a b"], [], [], []), "vertex-id"),
        (RawDGraph([], [], [], []), "empty"),
        (RawDGraph(["a"], ["d"], [("a", "d", None)], [("d", "a")]), "no-sink"),
    ],
)
def test_invariant_breaches(raw, rule):
    assert rule in {v.rule for v in validate_dgraph(raw).violations}


def test_single_vertex_is_source_and_sink():
    g = single()
    assert p_sources(g) == ["x"] and p_sinks(g) == ["x"]
    assert d_dfs_order(g) == ["x"]


def test_report_ok_iff_no_violations():
    assert validate_dgraph(single().to_raw()).ok
    assert str(validate_dgraph(single().to_raw())) == "ok"


# --- sources / sinks ------------------------------------------------------------

def test_triangle_sources_and_sinks(tri):
    g, _ = tri["min"]
    assert set(p_sources(g)) == {"A", "B"}
    assert p_sinks(g) == ["O"]
    # nothing outside {A, B} reaches A or B
    dg = g.to_networkx()
    for s in ("A", "B"):
        assert all(v in {"A", "B", "A-via-B", "B-via-A"} for v in nx.ancestors(dg, s))


def test_chain_sources_and_sinks():
    g = chain(10, 100, 5, 50)
    assert p_sources(g) == ["(1,3)"]
    assert set(p_sinks(g)) == {"(1,1)", "(2,2)", "(3,3)"}


# --- d-DFS ---------------------------------------------------------------------

def _is_reverse_topological(g, order):
    pos = {v: i for i, v in enumerate(order)}
    return len(order) == len(g.vertices) and all(pos[v] < pos[u] for u in g.vertices for v in g.successors(u))


def test_dfs_chain_reverse_topological():
    g = chain(10, 100, 5, 50)
    order = d_dfs_order(g)
    assert not isinstance(order, CycleDetected)
    assert _is_reverse_topological(g, order)
    ps = [v for v in order if g.is_p(v)]
    assert set(ps[:3]) == {"(1,1)", "(2,2)", "(3,3)"}


def test_dfs_triangle_cycle(tri):
    g, _ = tri["min"]
    res = d_dfs_order(g)
    assert isinstance(res, CycleDetected)
    assert {"A", "B"} <= set(res.cycle)
    cyc = res.cycle
    for a, b in zip(cyc, cyc[1:] + cyc[:1]):
        assert b in g.successors(a)
    # alternates p / d
    assert all(g.is_p(a) != g.is_p(b) for a, b in zip(cyc, cyc[1:]))


def test_dfs_deterministic(tri):
    g = chain(3, 4, 5, 6, 7)
    assert d_dfs_order(g) == d_dfs_order(g)


@PROPS
@given(dgraphs(acyclic=False))
def test_dfs_cycle_iff_networkx_finds_one(g):
    res = d_dfs_order(g)
    dag = nx.is_directed_acyclic_graph(g.to_networkx())
    assert isinstance(res, CycleDetected) != dag
    if dag:
        assert _is_reverse_topological(g, res)


# --- sub-graphs -----------------------------------------------------------------

def test_subgraph_of_source_is_whole_graph():
    g = chain(10, 100, 5, 50)
    assert d_subgraph(g, "(1,3)") == g


def test_subgraph_of_inner_interval():
    g = chain(10, 100, 5, 50)
    sub = d_subgraph(g, "(1,2)")
    assert set(sub.p_vertices) == {"(1,2)", "(1,1)", "(2,2)"}
    assert sub.d_vertices == ("(1,2)@1",)


def test_subgraph_of_sink():
    g = chain(10, 100, 5, 50)
    sub = d_subgraph(g, "(2,2)")
    assert sub.p_vertices == ("(2,2)",) and not sub.d_vertices


def test_subgraph_unknown_root():
    with pytest.raises(KeyError):
        d_subgraph(single(), "nope")


# --- enumeration and counting -------------------------------------------------------

def test_all_paths_triangle_has_two_trees_at_A(tri):
    g, _ = tri["all-paths"]
    trees = enumerate_solution_trees(g, "A")
    assert not trees.truncated
    assert [t.choices() for t in trees] == [{"A": "A-via-O"}, {"A": "A-via-B", "B": "B-via-O"}]


def test_chain3_two_parenthesisations():
    g = chain(10, 100, 5, 50)
    trees = enumerate_solution_trees(g, "(1,3)")
    assert len(trees) == 2 == chain_brute_force((10, 100, 5, 50))[1]


def test_sink_root_single_empty_tree():
    g = chain(10, 100, 5, 50)
    trees = enumerate_solution_trees(g, "(2,2)")
    assert list(trees) == [DSpanningTree("(2,2)")]
    assert trees.trees[0].choices() == {}
    assert count_solutions(g, "(2,2)") == 1


def test_truncation_is_flagged():
    g = chain(1, 2, 3, 4, 5, 6)
    full = enumerate_solution_trees(g, "(1,5)")
    cut = enumerate_solution_trees(g, "(1,5)", limit=3)
    assert len(full) == 14 and not full.truncated
    assert len(cut) == 3 and cut.truncated
    assert cut.trees == full.trees[:3]
    assert not enumerate_solution_trees(g, "(1,5)", limit=14).truncated


@pytest.mark.parametrize("n", range(1, 7))
def test_chain_count_is_catalan(n):
    dims = tuple(range(2, n + 3))
    g = chain(*dims)
    root = f"(1,{n})"
    assert count_solutions(g, root) == catalan(n - 1) == chain_brute_force(dims)[1]


def test_or_of_two_decompositions():
    g = from_arcs(["r", "a", "b"], [("d1", "r", ["a"]), ("d2", "r", ["b"])])
    assert count_solutions(g, "r") == 2


def test_and_of_sons_multiplies():
    g = from_arcs(
        ["r", "a", "b", "s"],
        [("d", "r", ["a", "b"]), ("a1", "a", ["s"]), ("a2", "a", ["s"]), ("b1", "b", ["s"]), ("b2", "b", ["s"]), ("b3", "b", ["s"])],
    )
    assert count_solutions(g, "r") == 6
    assert len(enumerate_solution_trees(g, "r")) == 6


def test_count_rejects_cycles(tri):
    g, _ = tri["min"]
    with pytest.raises(CyclicSubgraph):
        count_solutions(g, "A")
    assert count_solutions(g, "O") == 1


@PROPS
@given(dgraphs(acyclic=True))
def test_count_matches_enumeration(g):
    for p in g.p_vertices:
        assert count_solutions(g, p) == len(enumerate_solution_trees(g, p))


@PROPS
@given(dgraphs(acyclic=False))
def test_enumerated_trees_valid_and_distinct(g):
    for p in g.p_vertices:
        trees = enumerate_solution_trees(g, p, limit=400).trees
        assert len(set(trees)) == len(trees)
        for t in trees:
            assert check_tree(g, t) == []


def test_count_matches_enumeration_up_to_12_p_vertices():
    rng = random.Random(7)
    for _ in range(150):
        g = random_dgraph(rng, max_p=12)
        for p in g.p_vertices:
            assert count_solutions(g, p) == len(enumerate_solution_trees(g, p))


def test_check_tree_catches_missing_son():
    g = chain(10, 100, 5, 50)
    bad = DSpanningTree("(1,3)", "(1,3)@1", (DSpanningTree("(1,1)"),))
    assert check_tree(g, bad)


# --- text format ------------------------------------------------------------------

@PROPS
@given(dgraphs(acyclic=False))
def test_round_trip(g):
    raw, problem = parse_dgraph(serialize_dgraph(g))
    assert problem is None
    assert build_dgraph(raw) == g


def test_round_trip_with_labels_costs_and_problem(tri):
    g, prob = tri["min"]
    raw = g.to_raw()
    raw.labels["A"] = "path to A"
    raw.p_arcs[0] = (raw.p_arcs[0][0], raw.p_arcs[0][1], 0.1 + 0.2)
    g2 = build_dgraph(raw)
    text = serialize_dgraph(g2, prob)
    g3, prob3 = load_dgraph(text)
    assert g3 == g2 and g3.labels == {"A": "path to A"}
    assert g3.p_arcs[0][2] == 0.1 + 0.2
    assert prob3 == prob
    assert serialize_dgraph(g3, prob3) == text
