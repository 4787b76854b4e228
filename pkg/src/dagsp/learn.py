"""Fourier-sparse reconstruction of DAG signals from node samples.

Both problems are solved by monotone accelerated proximal gradient with
backtracking (soft-thresholding prox). Neither model has an intercept and
neither rescales the basis columns; the least-squares term is the plain
sum of squared residuals.

    lasso:     min_r  sum_i (s_i - (B r)_{x_i})^2 + lam ||r||_1
    logistic:  min_r  -sum_i [s_i log p_i + (1 - s_i) log(1 - p_i)] + lam ||r||_1,
               p_i = sigmoid((B r)_{x_i})
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.special import expit
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._validation import check_indices
from .exceptions import DegenerateLabels, NotConverged, ZeroReference

__all__ = [
    "SampleSet",
    "SparseFitResult",
    "sample_nodes",
    "soft_threshold",
    "lasso_objective",
    "logistic_objective",
    "lasso_lambda_max",
    "FourierLasso",
    "FourierLogisticRegression",
    "lasso_reconstruct",
    "logistic_sparse_fit",
    "predict_binary",
    "roc_curve",
    "roc_auc",
    "relative_error",
]


@dataclass(frozen=True)
class SampleSet:
    """Observed values ``values[i]`` at topological positions ``indices[i]``."""

    indices: np.ndarray
    values: np.ndarray
    n: int

    def __post_init__(self):
        idx = check_indices(self.indices, self.n)
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.shape != idx.shape:
            raise ValueError("one value per sampled index required")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", vals)

    @property
    def k(self):
        return self.indices.size

    @property
    def fraction(self):
        return self.k / self.n


def sample_nodes(signal, fraction, seed=None) -> SampleSet:
    """Observe ``round(fraction * n)`` (at least one) nodes uniformly without replacement."""
    signal = np.asarray(signal, dtype=float)
    n = signal.size
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must lie in (0, 1]")
    k = max(1, int(round(fraction * n)))
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(n, size=k, replace=False))
    return SampleSet(idx, signal[idx], n)


@dataclass
class SparseFitResult:
    """Estimated spectrum ``coef``, reconstructed signal ``signal = B coef``."""

    coef: np.ndarray
    signal: np.ndarray
    objective_trace: list = field(default_factory=list)
    n_iter: int = 0
    converged: bool = False


def soft_threshold(x, t):
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def lasso_objective(coef, X, y, lam):
    r = y - X @ coef
    return float(r @ r + lam * np.abs(coef).sum())


def logistic_objective(coef, X, y, lam):
    z = X @ coef
    return float(np.sum(np.logaddexp(0.0, z) - y * z) + lam * np.abs(coef).sum())


def lasso_lambda_max(X, y):
    """Smallest penalty for which the zero vector solves the lasso."""
    return float(2.0 * np.max(np.abs(X.T @ y))) if X.size else 0.0


def _lipschitz_guess(X, scale, iters=30, seed=0):
    # power iteration on X^T X; backtracking corrects any underestimate
    if X.size == 0:
        return 1.0
    v = np.random.default_rng(seed).standard_normal(X.shape[1])
    for _ in range(iters):
        v = X.T @ (X @ v)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            return 1.0
        v /= nrm
    return max(scale * np.linalg.norm(X @ v) ** 2, 1e-12)


def _proximal_gradient(smooth, x0, lam, L0, max_iter, tol):
    """Monotone FISTA with backtracking on the Lipschitz constant.

    ``smooth(x)`` returns ``(f(x), grad f(x))``. The recorded iterates have a
    nonincreasing objective ``f + lam ||.||_1``. Stops when the prox step
    moves the extrapolated point by less than ``tol`` (relative to its
    size) or the objective changes by less than ``tol`` relatively.
    """
    x = x0.copy()
    fx, _ = smooth(x)
    Fx = fx + lam * np.abs(x).sum()
    trace = [Fx]
    y, x_prev, t, L = x.copy(), x.copy(), 1.0, L0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        fy, gy = smooth(y)
        while True:
            z = soft_threshold(y - gy / L, lam / L)
            d = z - y
            fz, _ = smooth(z)
            if fz <= fy + gy @ d + 0.5 * L * (d @ d) + 1e-12 * max(1.0, abs(fy)):
                break
            L *= 2.0
        Fz = fz + lam * np.abs(z).sum()
        x_prev = x
        if Fz <= Fx:
            x, Fx_new = z, Fz
        else:
            Fx_new = Fx
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = x + (t / t_next) * (z - x) + ((t - 1.0) / t_next) * (x - x_prev)
        t = t_next
        step = np.max(np.abs(d)) if d.size else 0.0
        rel_obj = abs(Fx - Fx_new) / max(abs(Fx), 1e-300)
        Fx = Fx_new
        trace.append(Fx)
        if step <= tol * max(1.0, np.max(np.abs(y)) if y.size else 0.0) or (0.0 < rel_obj < tol):
            converged = True
            break
        if Fz > trace[-2]:
            # objective rose at the extrapolated point: restart the momentum
            y, t = x.copy(), 1.0
    return x, trace, it, converged


def _polish_lasso(coef, X, y, lam):
    """Exact lasso solution on the current support and sign pattern, if it is better."""
    S = np.flatnonzero(coef)
    if S.size == 0 or S.size > X.shape[0]:
        return coef
    XS = X[:, S]
    sign = np.sign(coef[S])
    Q, R = np.linalg.qr(XS)
    diag = np.abs(np.diag(R))
    if diag.min() <= 1e-10 * diag.max():
        return coef
    # normal equations 2 XS^T (XS r - y) + lam * sign = 0
    rhs = XS.T @ y - 0.5 * lam * sign
    tmp = sla.solve_triangular(R, rhs, trans="T")
    rS = sla.solve_triangular(R, tmp)
    if not np.all(np.sign(rS) == sign):
        return coef
    cand = np.zeros_like(coef)
    cand[S] = rS
    if lasso_objective(cand, X, y, lam) <= lasso_objective(coef, X, y, lam):
        return cand
    return coef


class FourierLasso(RegressorMixin, BaseEstimator):
    """L1-penalized least squares on basis rows, no intercept.

    ``X`` holds the sampled rows of a basis matrix (one column per basis
    vector) and ``y`` the observed values.

    Parameters
    ----------
    alpha : float, default=1.0
        Weight of the L1 penalty on the unnormalized squared error.
    max_iter : int, default=10000
    tol : float, default=1e-8
    polish : bool, default=True
        Finish with an exact solve on the detected support and signs when
        that lowers the objective.

    Attributes
    ----------
    coef_ : ndarray
    n_iter_ : int
    objective_trace_ : list of float
    converged_ : bool
    """

    def __init__(self, alpha=1.0, max_iter=10000, tol=1e-8, polish=True):
        self.alpha = alpha
        self.max_iter = max_iter
        self.tol = tol
        self.polish = polish

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        lam = float(self.alpha)

        def smooth(c):
            r = X @ c - y
            return float(r @ r), 2.0 * (X.T @ r)

        L0 = _lipschitz_guess(X, 2.0)
        coef, trace, n_iter, converged = _proximal_gradient(
            smooth, np.zeros(X.shape[1]), lam, L0, self.max_iter, self.tol
        )
        if self.polish:
            polished = _polish_lasso(coef, X, y, lam)
            if polished is not coef:
                coef = polished
                trace.append(lasso_objective(coef, X, y, lam))
                converged = True
        if not converged:
            warnings.warn(f"lasso did not converge in {self.max_iter} iterations", NotConverged)
        self.coef_ = coef
        self.n_iter_ = n_iter
        self.objective_trace_ = trace
        self.converged_ = converged
        self.n_features_in_ = X.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        return check_array(X) @ self.coef_


class FourierLogisticRegression(ClassifierMixin, BaseEstimator):
    """L1-penalized logistic regression on basis rows, no intercept.

    Labels must be 0/1; a single observed class is allowed, which matters
    for very sparse infection signals.

    Parameters
    ----------
    alpha : float, default=0.1
    threshold : float, default=0.5
        Probability at or above which ``predict`` returns 1.
    max_iter : int, default=10000
    tol : float, default=1e-8
    """

    def __init__(self, alpha=0.1, threshold=0.5, max_iter=10000, tol=1e-8):
        self.alpha = alpha
        self.threshold = threshold
        self.max_iter = max_iter
        self.tol = tol

    def fit(self, X, y):
        X, y = check_X_y(X, y, y_numeric=True)
        if not np.all((y == 0) | (y == 1)):
            raise ValueError("labels must be 0 or 1")
        if self.alpha < 0:
            raise ValueError("alpha must be nonnegative")
        lam = float(self.alpha)

        def smooth(c):
            z = X @ c
            f = float(np.sum(np.logaddexp(0.0, z) - y * z))
            return f, X.T @ (expit(z) - y)

        L0 = _lipschitz_guess(X, 0.25)
        coef, trace, n_iter, converged = _proximal_gradient(
            smooth, np.zeros(X.shape[1]), lam, L0, self.max_iter, self.tol
        )
        if not converged:
            warnings.warn(f"logistic fit did not converge in {self.max_iter} iterations", NotConverged)
        self.classes_ = np.array([0, 1])
        self.coef_ = coef
        self.n_iter_ = n_iter
        self.objective_trace_ = trace
        self.converged_ = converged
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        return check_array(X) @ self.coef_

    def predict_proba(self, X):
        p = expit(self.decision_function(X))
        return np.column_stack([1.0 - p, p])

    def predict(self, X):
        return predict_binary(self.decision_function(X), self.threshold)


def _basis_rows(basis, samples):
    basis = np.asarray(basis, dtype=float)
    if basis.ndim != 2 or basis.shape[0] != samples.n:
        raise ValueError(f"basis must have {samples.n} rows")
    return basis[samples.indices]


def lasso_reconstruct(basis, samples: SampleSet, lam, **kwargs) -> SparseFitResult:
    """Sparse spectrum from samples by the lasso; ``signal`` is the full reconstruction."""
    est = FourierLasso(alpha=lam, **kwargs).fit(_basis_rows(basis, samples), samples.values)
    return SparseFitResult(est.coef_, np.asarray(basis) @ est.coef_, est.objective_trace_, est.n_iter_, est.converged_)


def logistic_sparse_fit(basis, samples: SampleSet, lam=0.1, **kwargs) -> SparseFitResult:
    """Sparse spectrum of the logit from binary samples; ``signal`` holds the logits ``r``."""
    est = FourierLogisticRegression(alpha=lam, **kwargs).fit(_basis_rows(basis, samples), samples.values)
    return SparseFitResult(est.coef_, np.asarray(basis) @ est.coef_, est.objective_trace_, est.n_iter_, est.converged_)


def predict_binary(r, tau=0.5):
    """``[sigmoid(r) >= tau]`` elementwise, as 0/1 integers."""
    return (expit(np.asarray(r, dtype=float)) >= tau).astype(int)


def roc_curve(scores, labels):
    """ROC points by sweeping the threshold down through the distinct scores.

    Returns ``(fpr, tpr, thresholds)``; the first point is ``(0, 0)`` at
    threshold ``+inf``. Tied scores move both rates in a single step, so
    the trapezoid over that step counts ties as one half.
    """
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have the same length")
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateLabels("need at least one positive and one negative label")
    order = np.argsort(-scores, kind="mergesort")
    s_sorted = scores[order]
    tp = np.cumsum(pos[order])
    fp = np.cumsum(~pos[order])
    last = np.r_[np.flatnonzero(np.diff(s_sorted) != 0), s_sorted.size - 1]
    tpr = np.r_[0.0, tp[last] / n_pos]
    fpr = np.r_[0.0, fp[last] / n_neg]
    thresholds = np.r_[np.inf, s_sorted[last]]
    return fpr, tpr, thresholds


def roc_auc(scores, labels):
    """ROC curve and the trapezoidal area under it: ``((fpr, tpr), auc)``."""
    fpr, tpr, _ = roc_curve(scores, labels)
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return (fpr, tpr), auc


def relative_error(r, s):
    """``||r - s|| / ||s||``."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    ref = np.linalg.norm(s)
    if ref == 0:
        raise ZeroReference("reference signal has zero norm")
    return float(np.linalg.norm(r - s) / ref)
