import numpy as np
import pytest

from dagsp import build_dag, erdos_renyi_dag, poset_view, transitive_reduction
from dagsp.dag import WeightedDag
from dagsp.exceptions import CycleDetected, DuplicateEdge, EmptyWeightRange, ZeroWeight


def test_labels_and_topological_order(example_dag):
    assert example_dag.n == 6
    assert example_dag.ordered_labels() == list("abcdef")
    A = example_dag.adjacency()
    assert np.allclose(np.triu(A), 0)
    assert A[example_dag.pos("f"), example_dag.pos("b")] == 0.1


def test_kahn_breaks_ties_by_smallest_index():
    dag = build_dag([(3, 1, 1.0), (2, 0, 1.0)], n=4)
    assert dag.topo_order.tolist() == [2, 0, 3, 1]


def test_string_labels_first_appearance():
    dag = build_dag([("x", "y", 2.0), ("z", "y", 1.0)])
    assert dag.labels == ("x", "y", "z")
    assert dag.node("z") == 2


@pytest.mark.parametrize("edges, exc", [
    ([(0, 1, 1.0), (1, 0, 1.0)], CycleDetected),
    ([(0, 0, 1.0)], CycleDetected),
    ([(0, 1, 0.0)], ZeroWeight),
    ([(0, 1, float("nan"))], ZeroWeight),
    ([(0, 1, 1.0), (0, 1, 2.0)], DuplicateEdge),
])
def test_build_dag_rejects(edges, exc):
    with pytest.raises(exc):
        build_dag(edges)


def test_cycle_through_three_nodes():
    with pytest.raises(CycleDetected):
        build_dag([("a", "b"), ("b", "c"), ("c", "a")])


def test_from_matrix_roundtrip(example_dag):
    A = example_dag.adjacency()
    again = WeightedDag.from_matrix(A, labels=example_dag.ordered_labels())
    assert np.array_equal(again.adjacency(), A)
    with pytest.raises(CycleDetected):
        WeightedDag.from_matrix(A.T)


def test_poset_view(example_dag):
    P = poset_view(example_dag)
    assert P.leq("a", "e") and P.leq("a", "a")
    assert not P.leq("c", "f")
    assert P.predecessors(example_dag.node("f")) == {example_dag.node(k) for k in "abdf"}
    Z = P.zeta()
    assert np.all(np.diag(Z) == 1) and np.allclose(np.triu(Z, 1), 0)


def test_transitive_reduction_drops_shortcut():
    dag = build_dag([("a", "b", 1.0), ("b", "c", 2.0), ("a", "c", 5.0)])
    red = transitive_reduction(dag)
    assert sorted((red.labels[s], red.labels[d], w) for s, d, w in red.edges) == [("a", "b", 1.0), ("b", "c", 2.0)]


def test_example_reduction_drops_b_to_f(example_dag):
    red = transitive_reduction(example_dag)
    names = {(red.labels[s], red.labels[d]) for s, d, _ in red.edges}
    assert ("b", "f") not in names  # implied by b -> d -> f
    assert len(names) == len(example_dag.edges) - 1


def test_erdos_renyi_is_seeded_and_acyclic():
    a = erdos_renyi_dag(40, 0.2, seed=3)
    b = erdos_renyi_dag(40, 0.2, seed=3)
    assert a.edges == b.edges
    A = a.adjacency()
    assert np.allclose(np.triu(A), 0)
    assert all(w != 0 and -1 <= w <= 1 for _, _, w in a.edges)


def test_erdos_renyi_edge_count_matches_probability():
    counts = [erdos_renyi_dag(100, 0.05, seed=s).n_edges for s in range(20)]
    assert abs(np.mean(counts) - 0.05 * 100 * 99 / 2) < 15


def test_erdos_renyi_empty_weight_range():
    with pytest.raises(EmptyWeightRange):
        erdos_renyi_dag(5, 0.5, weight_range=(0.0, 0.0))
