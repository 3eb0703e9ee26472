import numpy as np
import pytest

from scmlab import (Assignment, Dag, NoiseSpec, StructuralModel,
                    backdoor_paths, d_separated, is_valid_backdoor_set,
                    load_graph, minimal_backdoor_sets, save_graph, to_dot,
                    topological_sort, validate_model)
from scmlab.errors import (CycleError, OverlappingSetsError,
                           TooManyCandidatesError, UnknownNodeError)

from dsep_helpers import (all_dags, all_queries, moral_separated_batch,
                          reflexive_closure)


def chain():
    return Dag(["x", "m", "y"], [("x", "m"), ("m", "y")])


def collider():
    return Dag(["x", "c", "y", "d"], [("x", "c"), ("y", "c"), ("c", "d")])


def confounder_triangle():
    # z -> x -> y with z -> y: one backdoor path x <- z -> y
    return Dag(["z", "x", "y"], [("z", "x"), ("z", "y"), ("x", "y")])


# --- construction and sorting --------------------------------------------

def test_dag_rejects_cycle_at_construction():
    with pytest.raises(CycleError):
        Dag(["a", "b"], [("a", "b"), ("b", "a")])


def test_dag_rejects_unknown_edge_endpoint():
    with pytest.raises(UnknownNodeError):
        Dag(["a"], [("a", "b")])


def test_topological_sort_respects_edges_and_declared_order():
    g = Dag(["c", "a", "b"], [("a", "b"), ("b", "c")])
    assert topological_sort(g) == ["a", "b", "c"]
    # ties broken by declared position
    g2 = Dag(["q", "p"], [])
    assert topological_sort(g2) == ["q", "p"]


def test_from_structural_model_carries_edges():
    m = validate_model(StructuralModel({
        "a": Assignment.exogenous(NoiseSpec.gaussian()),
        "b": Assignment.linear(["a"], [1.0], noise=NoiseSpec.gaussian()),
    }))
    g = Dag.from_structural_model(m)
    assert set(g.edges) == {("a", "b")}
    assert g.observed == {"a", "b"}


def test_ancestors_descendants():
    g = chain()
    assert g.ancestors_of({"y"}) == {"x", "m"}
    assert g.descendants_of("x") == {"m", "y"}


# --- d-separation ---------------------------------------------------------

@pytest.mark.parametrize("method", ["reachable", "moral"])
def test_chain_blocking(method):
    g = chain()
    assert not d_separated(g, {"x"}, {"y"}, set(), method=method)
    assert d_separated(g, {"x"}, {"y"}, {"m"}, method=method)


@pytest.mark.parametrize("method", ["reachable", "moral"])
def test_fork_blocking(method):
    g = Dag(["z", "x", "y"], [("z", "x"), ("z", "y")])
    assert not d_separated(g, {"x"}, {"y"}, set(), method=method)
    assert d_separated(g, {"x"}, {"y"}, {"z"}, method=method)


@pytest.mark.parametrize("method", ["reachable", "moral"])
def test_collider_opens_under_conditioning(method):
    g = collider()
    assert d_separated(g, {"x"}, {"y"}, set(), method=method)
    assert not d_separated(g, {"x"}, {"y"}, {"c"}, method=method)
    # conditioning on a collider's descendant opens the path too
    assert not d_separated(g, {"x"}, {"y"}, {"d"}, method=method)


def test_d_separation_set_queries():
    g = Dag(["a", "b", "c", "d"],
            [("a", "c"), ("b", "c"), ("c", "d")])
    assert d_separated(g, {"a", "b"}, set(), set())   # empty Y: vacuous
    assert not d_separated(g, {"a"}, {"c", "d"}, set())


def test_d_separation_rejects_overlap_and_unknown():
    g = chain()
    with pytest.raises(OverlappingSetsError):
        d_separated(g, {"x"}, {"x"}, set())
    with pytest.raises(OverlappingSetsError):
        d_separated(g, {"x"}, {"y"}, {"x"})
    with pytest.raises(UnknownNodeError):
        d_separated(g, {"x"}, {"nope"}, set())
    with pytest.raises(ValueError):
        d_separated(g, {"x"}, {"y"}, set(), method="psychic")


def test_methods_agree_on_random_graphs():
    rng = np.random.default_rng(7)
    names = [f"v{i}" for i in range(6)]
    for _ in range(60):
        order = rng.permutation(6)
        edges = [(names[order[i]], names[order[j]])
                 for i in range(6) for j in range(i + 1, 6)
                 if rng.random() < 0.35]
        g = Dag(names, edges)
        x, y = rng.choice(6, size=2, replace=False)
        rest = [v for v in range(6) if v not in (x, y)]
        Z = {names[v] for v in rest if rng.random() < 0.4}
        a = d_separated(g, {names[x]}, {names[y]}, Z, method="reachable")
        b = d_separated(g, {names[x]}, {names[y]}, Z, method="moral")
        assert a == b


def test_scalar_methods_match_exhaustive_batch_on_subsample():
    A = all_dags(4)
    R = reflexive_closure(A)
    names = ["a", "b", "c", "d"]
    queries = all_queries(4)
    rng = np.random.default_rng(0)
    for _ in range(120):
        d = int(rng.integers(A.shape[0]))
        x, y, Z = queries[int(rng.integers(len(queries)))]
        edges = [(names[i], names[j]) for i in range(4) for j in range(4)
                 if A[d, i, j]]
        g = Dag(names, edges)
        want = bool(moral_separated_batch(A[d:d + 1], R[d:d + 1], x, y, Z)[0])
        for method in ("reachable", "moral"):
            got = d_separated(g, {names[x]}, {names[y]},
                              {names[v] for v in Z}, method=method)
            assert got == want


# --- backdoor machinery ---------------------------------------------------

def test_backdoor_paths_found_and_sorted():
    g = confounder_triangle()
    assert backdoor_paths(g, "x", "y") == [["x", "z", "y"]]
    assert backdoor_paths(g, "z", "y") == []


def test_backdoor_path_through_collider_listed():
    g = Dag(["x", "u", "w", "y"],
            [("u", "x"), ("u", "w"), ("y", "w"), ("x", "y")])
    # x <- u -> w <- y is a backdoor path even though the collider blocks it
    assert ["x", "u", "w", "y"] in backdoor_paths(g, "x", "y")


def test_valid_backdoor_set_rules():
    g = confounder_triangle()
    assert not is_valid_backdoor_set(g, "x", "y", set())
    assert is_valid_backdoor_set(g, "x", "y", {"z"})
    with pytest.raises(ValueError):
        is_valid_backdoor_set(g, "x", "y", {"x"})


def test_descendants_of_cause_invalidate_a_set():
    g = Dag(["x", "m", "y", "z"],
            [("z", "x"), ("z", "y"), ("x", "m"), ("m", "y")])
    assert not is_valid_backdoor_set(g, "x", "y", {"m"})
    assert not is_valid_backdoor_set(g, "x", "y", {"m", "z"})
    assert is_valid_backdoor_set(g, "x", "y", {"z"})


def test_minimal_backdoor_sets_simple():
    analysis = minimal_backdoor_sets(confounder_triangle(), "x", "y")
    assert analysis.identifiable
    assert analysis.minimal_sets == [("z",)]
    assert analysis.valid_sets == [("z",)]
    assert analysis.backdoor_paths == [["x", "z", "y"]]


def test_minimal_backdoor_sets_no_backdoor_means_empty_set():
    g = chain()
    analysis = minimal_backdoor_sets(g, "x", "y")
    assert analysis.identifiable
    assert analysis.minimal_sets == [()]


def test_minimal_backdoor_sets_respects_observed():
    g = Dag(["z", "x", "y"], [("z", "x"), ("z", "y"), ("x", "y")],
            observed={"x", "y"})
    analysis = minimal_backdoor_sets(g, "x", "y")
    assert not analysis.identifiable
    assert analysis.minimal_sets == []


def test_minimal_backdoor_sets_candidate_cap():
    names = ["x", "y"] + [f"c{i}" for i in range(21)]
    edges = [(f"c{i}", "x") for i in range(21)] + \
            [(f"c{i}", "y") for i in range(21)]
    g = Dag(names, edges)
    with pytest.raises(TooManyCandidatesError):
        minimal_backdoor_sets(g, "x", "y")


# --- files and export -----------------------------------------------------

def test_graph_save_load_round_trip(tmp_path):
    g = Dag(["z", "x", "y", "iso"],
            [("z", "x"), ("z", "y"), ("x", "y")], observed={"x", "y", "iso"})
    path = tmp_path / "g.edges"
    save_graph(g, str(path))
    g2 = load_graph(str(path))
    assert g2.nodes == g.nodes
    assert set(g2.edges) == set(g.edges)
    assert g2.observed == g.observed


def test_to_dot_marks_unobserved_dashed():
    g = Dag(["z", "x"], [("z", "x")], observed={"x"})
    dot = to_dot(g)
    assert "digraph" in dot
    assert "dashed" in dot
    assert '"z" -> "x"' in dot
