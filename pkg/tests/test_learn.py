import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from oracles import grid_minimum, kkt_violation, pairwise_auc

from dagsp import FourierLasso, FourierLogisticRegression, build_dag, closure_operator, relative_error, roc_auc
from dagsp.exceptions import DegenerateLabels, DimensionMismatch, ZeroReference
from dagsp.learn import (
    SampleSet,
    lasso_lambda_max,
    lasso_objective,
    lasso_reconstruct,
    logistic_objective,
    logistic_sparse_fit,
    predict_binary,
    roc_curve,
    sample_nodes,
    soft_threshold,
)


def lasso_instance(seed):
    rng = np.random.default_rng(seed)
    k, n = rng.integers(5, 40), rng.integers(3, 60)
    X = rng.standard_normal((k, n))
    y = rng.standard_normal(k)
    lam = rng.uniform(0.01, 1.0) * lasso_lambda_max(X, y)
    return X, y, lam


def test_lasso_kkt_on_random_instances():
    for seed in range(50):
        X, y, lam = lasso_instance(seed)
        coef = FourierLasso(alpha=lam).fit(X, y).coef_
        assert kkt_violation(X, y, coef, lam) <= 1e-6


def test_lambda_max_gives_zero():
    X, y, _ = lasso_instance(7)
    lam = lasso_lambda_max(X, y)
    assert np.all(FourierLasso(alpha=lam).fit(X, y).coef_ == 0)
    assert np.any(FourierLasso(alpha=0.9 * lam).fit(X, y).coef_ != 0)


def test_lasso_matches_sklearn_scaling():
    from sklearn.linear_model import Lasso

    X, y, lam = lasso_instance(3)
    ours = FourierLasso(alpha=lam).fit(X, y).coef_
    ref = Lasso(alpha=lam / (2 * len(y)), fit_intercept=False, tol=1e-12, max_iter=100000).fit(X, y).coef_
    assert lasso_objective(ours, X, y, lam) <= lasso_objective(ref, X, y, lam) + 1e-8


def test_objective_trace_is_monotone():
    X, y, lam = lasso_instance(11)
    trace = FourierLasso(alpha=lam, polish=False).fit(X, y).objective_trace_
    assert np.all(np.diff(trace) <= 1e-10)


def test_one_sparse_recovery(example_dag):
    W = closure_operator(example_dag).dense()
    s = 5 * W[:, 0]
    res = lasso_reconstruct(W, SampleSet(np.arange(6), s, 6), 1e-4)
    assert np.flatnonzero(res.coef).tolist() == [0]
    assert abs(res.coef[0] - 5) <= 0.01


def test_zero_penalty_is_exact_inversion(example_dag):
    W = closure_operator(example_dag).dense()
    s = np.random.default_rng(0).standard_normal(6)
    res = lasso_reconstruct(W, SampleSet(np.arange(6), s, 6), 0.0)
    assert np.allclose(res.coef, np.linalg.solve(W, s), atol=1e-6)


def test_huge_penalty_gives_zero():
    X, y, _ = lasso_instance(5)
    assert not FourierLasso(alpha=1e12).fit(X, y).coef_.any()
    est = FourierLogisticRegression(alpha=1e12).fit(X, (y > 0).astype(float))
    assert not est.coef_.any()
    assert np.allclose(est.predict_proba(X)[:, 1], 0.5)


def logistic_toys():
    yield np.array([[1.0, 0.0], [1.0, 1.0]]), np.array([0.0, 1.0])
    rng = np.random.default_rng(0)
    for _ in range(5):
        X = rng.standard_normal((8, 2))
        y = (rng.random(8) < 0.5).astype(float)
        y[:2] = [0, 1]
        yield X, y


@pytest.mark.parametrize("toy", list(logistic_toys()))
def test_logistic_matches_grid_oracle(toy):
    X, y = toy
    est = FourierLogisticRegression(alpha=0.1).fit(X, y)
    assert abs(logistic_objective(est.coef_, X, y, 0.1) - grid_minimum(X, y, 0.1)) <= 1e-4


def test_separable_two_node_toy():
    dag = build_dag([("a", "b")])
    W = closure_operator(dag, "boolean").dense()
    res = logistic_sparse_fit(W, SampleSet([0, 1], [0.0, 1.0], 2), 0.1)
    p = 1 / (1 + np.exp(-res.signal))
    assert p[0] < 0.5 < p[1]


def test_one_class_logistic():
    rng = np.random.default_rng(2)
    X = np.abs(rng.standard_normal((10, 4)))
    est = FourierLogisticRegression(alpha=0.1).fit(X, np.zeros(10))
    assert np.all(est.decision_function(X) <= 0)
    assert est.predict(X).tolist() == [0] * 10
    assert est.classes_.tolist() == [0, 1]


def test_logistic_rejects_non_binary():
    with pytest.raises(ValueError):
        FourierLogisticRegression().fit(np.eye(3), [0, 1, 2])


def test_estimators_clone():
    for est in (FourierLasso(alpha=0.3), FourierLogisticRegression(alpha=0.2, threshold=0.4)):
        assert clone(est).get_params() == est.get_params()


def test_predict_binary_threshold():
    assert predict_binary([0.0, -1.0, 2.0], 0.5).tolist() == [1, 0, 1]


def test_soft_threshold():
    assert np.allclose(soft_threshold(np.array([-3.0, 0.5, 2.0]), 1.0), [-2.0, 0.0, 1.0])


def test_auc_equals_pairwise_oracle():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(2, 201))
        labels = (rng.random(n) < rng.uniform(0.1, 0.9)).astype(int)
        labels[:2] = [0, 1]
        scores = np.round(rng.standard_normal(n), int(rng.integers(0, 3)))
        _, auc = roc_auc(scores, labels)
        assert abs(auc - pairwise_auc(scores, labels)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.booleans()), min_size=2, max_size=30))
def test_auc_property(pairs):
    scores = np.array([p[0] for p in pairs], dtype=float)
    labels = np.array([int(p[1]) for p in pairs])
    if labels.min() == labels.max():
        with pytest.raises(DegenerateLabels):
            roc_auc(scores, labels)
        return
    fpr, tpr, thr = roc_curve(scores, labels)
    assert fpr[0] == tpr[0] == 0 and fpr[-1] == tpr[-1] == 1
    assert np.all(np.diff(fpr) >= 0) and np.all(np.diff(tpr) >= 0)
    assert abs(roc_auc(scores, labels)[1] - pairwise_auc(scores, labels)) <= 1e-12


def test_constant_scores_auc_half():
    assert roc_auc(np.zeros(5), [0, 1, 0, 1, 1])[1] == 0.5


def test_sampling():
    s = np.arange(10.0)
    a = sample_nodes(s, 0.3, seed=1)
    assert a.k == 3 and np.array_equal(a.values, s[a.indices])
    assert np.array_equal(a.indices, sample_nodes(s, 0.3, seed=1).indices)
    assert sample_nodes(s, 0.01, seed=0).k == 1
    with pytest.raises(ValueError):
        sample_nodes(s, 0.0)
    with pytest.raises(ValueError):
        SampleSet([1, 1], [0, 0], 4)


def test_relative_error():
    assert relative_error([1, 1], [1, 0]) == 1.0
    with pytest.raises(ZeroReference):
        relative_error([1], [0])


def test_basis_dimension_check():
    with pytest.raises((ValueError, DimensionMismatch)):
        lasso_reconstruct(np.eye(3), SampleSet([0], [1.0], 4), 0.1)
