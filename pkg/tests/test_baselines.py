import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dagsp import build_dag, closure_operator, erdos_renyi_dag
from dagsp.baselines import jacobi_eigh, symmetric_eigenbasis, undirected_matrices
from dagsp.exceptions import NotSymmetric


def check_basis(M, basis):
    Q, lam = basis.Q, basis.eigenvalues
    n = M.shape[0]
    assert np.max(np.abs(Q.T @ Q - np.eye(n))) <= 1e-8
    assert np.max(np.abs(Q @ np.diag(lam) @ Q.T - M)) <= 1e-7 * max(np.max(np.abs(M)), 1.0)
    assert np.all(np.diff(lam) >= 0)


def test_identity():
    b = symmetric_eigenbasis(np.eye(4))
    assert np.allclose(b.eigenvalues, 1)
    assert np.allclose(np.abs(b.Q).sum(axis=0), 1)


def test_two_by_two():
    b = symmetric_eigenbasis(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(b.eigenvalues, [-1, 1])
    s = 1 / np.sqrt(2)
    assert np.allclose(b.Q, [[s, s], [-s, s]])


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10**6), n=st.integers(1, 50))
def test_random_symmetric(seed, n):
    M = np.random.default_rng(seed).standard_normal((n, n))
    M = M + M.T
    b = symmetric_eigenbasis(M, method="jacobi")
    check_basis(M, b)
    assert np.allclose(b.eigenvalues, np.linalg.eigvalsh(M), atol=1e-10)


def test_sign_convention_matches_lapack():
    M = np.random.default_rng(0).standard_normal((30, 30))
    M = M + M.T
    a = symmetric_eigenbasis(M, method="jacobi")
    b = symmetric_eigenbasis(M, method="lapack")
    assert np.allclose(a.Q, b.Q, atol=1e-8)


def test_odd_size_and_degenerate_spectrum():
    M = np.diag([2.0, 2.0, 2.0]) + np.ones((3, 3))
    check_basis(M, symmetric_eigenbasis(M, method="jacobi"))


def test_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        symmetric_eigenbasis(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotSymmetric):
        symmetric_eigenbasis(np.ones((2, 3)))


def test_jacobi_unsorted_output():
    vals, Q = jacobi_eigh(np.diag([3.0, 1.0, 2.0]))
    assert sorted(vals) == [1.0, 2.0, 3.0]
    assert np.allclose(np.abs(Q), np.eye(3))


def test_undirected_matrices(example_dag):
    W = closure_operator(example_dag)
    mats = undirected_matrices(example_dag, W)
    S1 = mats["adjacency"]
    assert S1[2, 0] == S1[0, 2] == 0.3
    assert np.allclose(mats["adjacency_closed"], W.W + W.W.T - 2 * np.eye(6))
    for key in ("laplacian", "laplacian_closed"):
        assert np.allclose(mats[key].sum(axis=1), 0)


def test_edgeless():
    dag = build_dag([], node_labels=["a", "b"])
    mats = undirected_matrices(dag, closure_operator(dag))
    assert not mats["adjacency"].any() and not mats["laplacian"].any()


@pytest.mark.parametrize("key", ["adjacency", "adjacency_closed", "laplacian", "laplacian_closed"])
def test_experiment_sized_matrices(key):
    dag = erdos_renyi_dag(100, 0.05, seed=1)
    M = undirected_matrices(dag, closure_operator(dag))[key]
    b = symmetric_eigenbasis(M, method="jacobi", source=key)
    check_basis(M, b)
    assert b.source == key


def test_nonnegative_laplacian_is_psd():
    dag = erdos_renyi_dag(40, 0.2, weight_range=(0.1, 1.0), seed=0)
    L = undirected_matrices(dag, closure_operator(dag))["laplacian"]
    assert symmetric_eigenbasis(L).eigenvalues.min() > -1e-10
