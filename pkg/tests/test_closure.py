import numpy as np
import pytest
from conftest import EXAMPLE_W, random_small_dag
from oracles import path_oracle

from dagsp import build_dag, closure_operator, pollution_closure_closed_form, weighted_transitive_closure
from dagsp.closure import DENSE_LIMIT, ClosureOperator, capacity_to_influence, distance_to_influence, reflexive_closure
from dagsp.dag import erdos_renyi_dag
from dagsp.exceptions import NonRealizableSemiring, SemiringViolation
from dagsp.semiring import SEMIRINGS, Semiring, check_semiring, get_semiring

WEIGHT_RANGES = {
    "boolean": (-1.0, 1.0),
    "pollution": (-1.0, 1.0),
    "influence": (0.01, 1.0),
    "shortest_path": (0.01, 5.0),
    "max_capacity": (0.01, 5.0),
}


@pytest.mark.parametrize("name", sorted(SEMIRINGS))
def test_semiring_laws(name):
    check_semiring(SEMIRINGS[name])


def test_broken_semiring_is_rejected():
    bad = Semiring("bad", np.subtract, np.multiply, 0.0, 1.0, lambda rng, k: rng.uniform(-1, 1, k))
    with pytest.raises(SemiringViolation):
        check_semiring(bad)


def test_semiring_aliases():
    assert get_semiring("shortest-path").name == "shortest_path"
    assert get_semiring("capacity").name == "max_capacity"
    with pytest.raises(ValueError):
        get_semiring("tropical")


@pytest.mark.parametrize("name", sorted(SEMIRINGS))
@pytest.mark.parametrize("method", ["floyd-warshall", "topological"])
def test_closure_matches_path_enumeration(name, method):
    s = get_semiring(name)
    rng = np.random.default_rng(sorted(SEMIRINGS).index(name))
    for _ in range(25):
        dag = random_small_dag(rng, weight_range=WEIGHT_RANGES[name])
        got = weighted_transitive_closure(dag, s, method=method, check=False)
        want = path_oracle(dag, s)
        assert np.allclose(got, want, rtol=1e-9, atol=1e-9)


def test_example_pollution_closure(example_dag):
    W = closure_operator(example_dag, "pollution").W
    assert np.allclose(W, EXAMPLE_W, atol=1e-12)
    C = pollution_closure_closed_form(example_dag)
    assert np.allclose(C + np.eye(6), EXAMPLE_W, atol=1e-12)


def test_closed_form_method(example_dag):
    W = closure_operator(example_dag, "pollution", method="closed-form").W
    assert np.allclose(W, EXAMPLE_W, atol=1e-12)
    with pytest.raises(ValueError):
        closure_operator(example_dag, "influence", method="closed-form")


def test_boolean_closure_is_reachability(example_dag):
    H = weighted_transitive_closure(example_dag, "boolean")
    pos = example_dag.pos
    assert H[pos("e"), pos("a")] == 1 and H[pos("f"), pos("a")] == 1
    assert H[pos("f"), pos("c")] == 0


def test_influence_keeps_strongest_path():
    dag = build_dag([("a", "b", 0.5), ("b", "c", 0.5), ("a", "c", 0.2)])
    H = weighted_transitive_closure(dag, "influence")
    assert H[dag.pos("c"), dag.pos("a")] == 0.25


def test_capacity_is_bottleneck():
    dag = build_dag([("a", "b", 3.0), ("b", "c", 1.0), ("a", "d", 2.0), ("d", "c", 2.0)])
    H = weighted_transitive_closure(dag, "capacity")
    assert H[dag.pos("c"), dag.pos("a")] == 2.0


def test_unreachable_shortest_path_is_inf(example_dag):
    H = weighted_transitive_closure(example_dag, "shortest_path")
    assert np.isinf(H[example_dag.pos("f"), example_dag.pos("c")])


def test_reflexive_requires_unit_one():
    dag = build_dag([("a", "b", 2.0)])
    D = weighted_transitive_closure(dag, "shortest_path")
    with pytest.raises(NonRealizableSemiring):
        reflexive_closure(D, "shortest_path")
    W = reflexive_closure(distance_to_influence(D), "influence").W
    assert np.allclose(W, [[1, 0], [np.exp(-2.0), 1]])


def test_capacity_converted_to_influence():
    dag = build_dag([("a", "b", 4.0)])
    W = closure_operator(dag, "capacity").W
    assert W[1, 0] == pytest.approx(np.exp(-0.25))
    assert capacity_to_influence(np.array([[0.0]]))[0, 0] == 0.0


def test_closure_operator_validates():
    with pytest.raises(ValueError):
        ClosureOperator(np.array([[1.0, 1.0], [0.0, 1.0]]), "pollution")
    with pytest.raises(ValueError):
        ClosureOperator(np.array([[2.0, 0.0], [0.0, 1.0]]), "pollution")


def test_sparse_path_agrees_with_dense(monkeypatch):
    dag = erdos_renyi_dag(60, 0.08, seed=5)
    dense = weighted_transitive_closure(dag, "pollution")
    import dagsp.closure as closure_mod

    monkeypatch.setattr(closure_mod, "DENSE_LIMIT", 10)
    sparse = weighted_transitive_closure(dag, "pollution")
    assert sparse.shape == dense.shape and hasattr(sparse, "toarray")
    assert np.allclose(sparse.toarray(), dense, atol=1e-12)
    op = closure_operator(dag, "pollution")
    assert op.is_sparse
    assert DENSE_LIMIT == 4096
