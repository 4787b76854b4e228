"""Causal Fourier analysis on a weighted DAG.

Given the closure operator ``W`` (unit lower triangular, topological order):

* the Fourier basis is the set of columns of ``W``;
* the Fourier transform is ``F = W^-1``, whose entries are the weighted
  Moebius function ``F[y, x] = mu(x, y)``;
* the shift by node ``q`` is ``T_q = W D_q F`` with ``D_q = diag([y <= q])``,
  it keeps exactly the causes shared with ``q``;
* a filter ``h`` is ``sum_q h_q T_q`` and acts in the frequency domain by
  pointwise multiplication with ``h'_y = sum_{q >= y} h_q``.

Transforms never build ``F`` unless asked; they solve ``W x = s`` by
forward substitution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import check_unit_lower, check_vector
from .closure import ClosureOperator, closure_operator
from .dag import PosetView, WeightedDag, poset_view

__all__ = [
    "FourierOperator",
    "moebius_matrix",
    "fourier_transform",
    "inverse_fourier_transform",
    "shift_matrix",
    "frequency_response",
    "inverse_frequency_response",
    "filter_matrix",
    "apply_filter",
    "lowpass_filter",
    "total_variation",
    "FrequencyOrder",
    "frequency_order",
    "CausalFourierTransform",
]


def _moebius_recursive(W):
    # mu(x, x) = 1 and mu(x, y) = -sum_{x <= z < y} w[y, z] mu(x, z), filled
    # one row y at a time so every mu(x, z) with z < y is already known.
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    F = np.zeros((n, n))
    for y in range(n):
        F[y, y] = 1.0
        if y:
            F[y, :y] = -(W[y, :y] @ F[:y, :y])
    return F


def moebius_matrix(W, method="recursion"):
    """Fourier transform matrix ``F`` with ``F[y, x] = mu_w(x, y)``.

    Parameters
    ----------
    W : ndarray, sparse array or ClosureOperator
    method : {"recursion", "inverse"}
        ``recursion`` evaluates the weighted Moebius recursion directly;
        ``inverse`` solves ``W F = I`` by forward substitution.
    """
    if isinstance(W, (ClosureOperator, FourierOperator)):
        W = W.W
    W = W.toarray() if sp.issparse(W) else np.asarray(W, dtype=float)
    check_unit_lower(W)
    if method == "recursion":
        return _moebius_recursive(W)
    if method == "inverse":
        return sla.solve_triangular(W, np.eye(W.shape[0]), lower=True, unit_diagonal=True)
    raise ValueError(f"unknown method {method!r}")


class FourierOperator:
    """Fourier basis ``W`` and transform ``F = W^-1`` for one DAG and closure.

    Parameters
    ----------
    closure : ClosureOperator
    poset : PosetView, optional
        Computed from ``closure.dag`` when omitted. Shifts and frequency
        responses need the unweighted order, which the sparsity pattern of
        ``W`` can under-report when path weights cancel.
    """

    def __init__(self, closure: ClosureOperator, poset: PosetView | None = None):
        self.closure = closure
        if poset is None:
            if closure.dag is None:
                raise ValueError("a poset or a closure with its dag is required")
            poset = poset_view(closure.dag)
        self.poset = poset
        self._F = None

    @classmethod
    def from_dag(cls, dag: WeightedDag, semiring="pollution", method="auto"):
        return cls(closure_operator(dag, semiring, method=method))

    @property
    def W(self):
        return self.closure.W

    @property
    def n(self):
        return self.closure.n

    @property
    def F(self):
        if self._F is None:
            self._F = moebius_matrix(self.W, method="inverse")
        return self._F

    def basis(self):
        """Dense matrix whose column ``y`` is the basis vector ``f^y``."""
        return self.closure.dense()

    def transform(self, s):
        return fourier_transform(s, self)

    def inverse(self, c):
        return inverse_fourier_transform(c, self)

    def zeta(self):
        return self.poset.zeta()


def _unwrap(op):
    if isinstance(op, FourierOperator):
        return op.W
    if isinstance(op, ClosureOperator):
        return op.W
    return op if sp.issparse(op) else np.asarray(op, dtype=float)


def fourier_transform(s, W):
    """Spectrum ``c`` of ``s``, i.e. the solution of ``W c = s``.

    ``s`` may be a vector or an ``(n, k)`` stack of column signals.
    """
    W = _unwrap(W)
    s = check_vector(s, W.shape[0])
    if sp.issparse(W):
        return spla.spsolve_triangular(sp.csr_array(W), s, lower=True, unit_diagonal=True)
    return sla.solve_triangular(W, s, lower=True, unit_diagonal=True, check_finite=False)


def inverse_fourier_transform(c, W):
    """Signal ``s = W c`` from its spectrum."""
    W = _unwrap(W)
    c = check_vector(c, W.shape[0], name="spectrum")
    return W @ c


def _as_fourier(op):
    if isinstance(op, FourierOperator):
        return op
    if isinstance(op, ClosureOperator):
        return FourierOperator(op)
    raise TypeError("expected a FourierOperator or ClosureOperator")


def _below(poset, q):
    """Boolean mask over positions ``y`` with ``y <= q``."""
    return poset.matrix[poset.dag.pos(q)].copy()


def shift_matrix(q, op, method="spectral"):
    """Matrix of the causal shift by node ``q``.

    ``spectral`` forms ``W D_q F``. ``direct`` evaluates the double sum
    ``(T_q)[x, z] = sum_{y <= x, y <= q, z <= y} w[x, y] mu(z, y)`` entry by
    entry over the partial order, without using ``D_q``.
    """
    op = _as_fourier(op)
    mask = _below(op.poset, q)
    W = op.closure.dense()
    F = op.F
    if method == "spectral":
        return W[:, mask] @ F[mask, :]
    if method == "direct":
        R = op.poset.matrix
        n = op.n
        T = np.zeros((n, n))
        common = np.flatnonzero(mask)
        for x in range(n):
            for y in common:
                if not R[x, y]:
                    continue
                for z in np.flatnonzero(R[y]):
                    T[x, z] += W[x, y] * F[y, z]
        return T
    raise ValueError(f"unknown method {method!r}")


def frequency_response(h, poset: PosetView):
    """``h'_y = sum_{q >= y} h_q``; depends only on the partial order."""
    h = check_vector(h, poset.dag.n, name="filter")
    return poset.matrix.T.astype(float) @ h


def inverse_frequency_response(hp, poset: PosetView):
    """Filter coefficients with the given frequency response.

    Uses the dual Moebius inversion ``h_q = sum_{y >= q} mu(q, y) h'_y`` of
    the unweighted order.
    """
    hp = check_vector(hp, poset.dag.n, name="frequency response")
    mu = _moebius_recursive(poset.zeta())
    return mu.T @ hp


def filter_matrix(h, op):
    """``H = sum_q h_q T_q``, assembled as ``W diag(h') F``."""
    op = _as_fourier(op)
    hp = frequency_response(h, op.poset)
    W = op.closure.dense()
    return (W * hp[None, :]) @ op.F


def apply_filter(h, s, op, method="spectral"):
    """Convolution ``h * s``.

    ``spectral`` computes ``W (h' . (W^-1 s))`` with two triangular
    operations; ``matrix`` sums the explicit shift matrices.
    """
    op = _as_fourier(op)
    s = check_vector(s, op.n)
    if method == "spectral":
        hp = frequency_response(h, op.poset)
        c = fourier_transform(s, op)
        scaled = c * (hp if c.ndim == 1 else hp[:, None])
        return inverse_fourier_transform(scaled, op)
    if method == "matrix":
        h = check_vector(h, op.n, name="filter")
        H = np.zeros((op.n, op.n))
        for pos in np.flatnonzero(h != 0):
            node = op.poset.dag.topo_order[pos]
            H += h[pos] * shift_matrix(node, op)
        return H @ s
    raise ValueError(f"unknown method {method!r}")


def lowpass_filter(poset: PosetView):
    """Coefficients of ``I + sum_q T_q`` divided by its largest eigenvalue.

    ``H`` is triangular, so its eigenvalues are the frequency response
    values; the largest in magnitude is used.
    """
    n = poset.dag.n
    identity = inverse_frequency_response(np.ones(n), poset)
    h = identity + 1.0
    lam = np.max(np.abs(frequency_response(h, poset)))
    return h / lam


def total_variation(s, op, normalize=False):
    """Variation ``TV_q(s) = ||s - T_q s||_2`` for every shift ``q``.

    Returns ``(tv, stv)``. For a vector ``s``, ``tv`` has length ``n``
    (indexed by topological position of ``q``) and ``stv`` is its sum. For
    an ``(n, k)`` stack, ``tv`` is ``(n, k)`` and ``stv`` has length ``k``.
    ``normalize`` scales each signal to unit norm first.
    """
    op = _as_fourier(op)
    s = check_vector(s, op.n)
    vec = s.ndim == 1
    S = s[:, None] if vec else s
    if normalize:
        S = S / np.linalg.norm(S, axis=0, keepdims=True)
    C = fourier_transform(S, op)
    W = op.closure.dense()
    R = op.poset.matrix
    tv = np.empty((op.n, S.shape[1]))
    for q in range(op.n):
        outside = ~R[q]
        # s - T_q s = W (I - D_q) c
        tv[q] = np.linalg.norm(W[:, outside] @ C[outside], axis=0)
    stv = tv.sum(axis=0)
    return (tv[:, 0], float(stv[0])) if vec else (tv, stv)


@dataclass(frozen=True)
class FrequencyOrder:
    """Frequencies sorted by sum total variation.

    ``order`` lists topological positions sorted by ascending STV (ties by
    position). ``tv[y]`` is the TV vector of the normalized basis vector
    ``f^y``, ``comparable[x, y]`` is True iff ``TV(f^x) <= TV(f^y)``
    componentwise.
    """

    order: np.ndarray
    stv: np.ndarray
    tv: np.ndarray
    comparable: np.ndarray


def frequency_order(op, tol=1e-9) -> FrequencyOrder:
    """Order the basis vectors by their total variation."""
    op = _as_fourier(op)
    tv, stv = total_variation(op.basis(), op, normalize=True)
    tv = tv.T
    comparable = np.all(tv[:, None, :] <= tv[None, :, :] + tol, axis=2)
    order = np.lexsort((np.arange(op.n), np.round(stv, 9)))
    return FrequencyOrder(order=order, stv=stv, tv=tv, comparable=comparable)


class CausalFourierTransform(TransformerMixin, BaseEstimator):
    """Causal Fourier transform of DAG signals as a scikit-learn transformer.

    Each row of ``X`` is one signal whose columns follow the DAG's
    topological order. ``transform`` returns the spectra (causes) row by
    row and ``inverse_transform`` maps spectra back to signals.

    Parameters
    ----------
    dag : WeightedDag
    semiring : str, default="pollution"
    closure_method : str, default="auto"

    Attributes
    ----------
    operator_ : FourierOperator
    n_features_in_ : int
    """

    def __init__(self, dag=None, semiring="pollution", closure_method="auto"):
        self.dag = dag
        self.semiring = semiring
        self.closure_method = closure_method

    def fit(self, X=None, y=None):
        if self.dag is None:
            raise ValueError("CausalFourierTransform needs a dag")
        if X is not None:
            X = check_array(X)
            if X.shape[1] != self.dag.n:
                raise ValueError(f"X has {X.shape[1]} features, dag has {self.dag.n} nodes")
        self.operator_ = FourierOperator.from_dag(self.dag, self.semiring, self.closure_method)
        self.n_features_in_ = self.dag.n
        return self

    def transform(self, X):
        check_is_fitted(self, "operator_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return fourier_transform(X.T, self.operator_).T

    def inverse_transform(self, X):
        check_is_fitted(self, "operator_")
        X = check_array(X)
        return inverse_fourier_transform(X.T, self.operator_).T
