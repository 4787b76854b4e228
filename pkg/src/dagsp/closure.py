"""Weighted transitive and reflexive closures of a DAG.

The closure of ``A`` under a semiring holds, for every pair ``y < x``, the
semiring sum over all paths ``y -> x`` of the semiring product of the edge
weights along the path. Adding the unit diagonal gives the operator ``W``
of the signal model ``s = W c``; its columns are the Fourier basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .dag import WeightedDag
from .exceptions import NegativeDistance, NonRealizableSemiring
from .semiring import Semiring, get_semiring

__all__ = [
    "DENSE_LIMIT",
    "ClosureOperator",
    "weighted_transitive_closure",
    "pollution_closure_closed_form",
    "reflexive_closure",
    "distance_to_influence",
    "capacity_to_influence",
    "closure_operator",
]

#: Above this node count closures are returned as scipy sparse arrays whose
#: implicit entries mean "no path" (the semiring zero).
DENSE_LIMIT = 4096


@dataclass(frozen=True)
class ClosureOperator:
    """Unit lower-triangular ``W = I + closure(A)`` in topological order.

    ``W`` may be a dense ndarray or a scipy sparse array.
    """

    W: object
    semiring: str
    dag: WeightedDag | None = None

    def __post_init__(self):
        W = self.W
        n = W.shape[0]
        if W.shape != (n, n):
            raise ValueError("W must be square")
        diag = W.diagonal()
        if not np.all(diag == 1.0):
            raise ValueError("W must have a unit diagonal")
        upper = sp.triu(W, k=1) if sp.issparse(W) else np.triu(W, k=1)
        if (upper.nnz if sp.issparse(W) else np.count_nonzero(upper)):
            raise ValueError("W must be lower triangular")
        if self.dag is not None and self.dag.n != n:
            raise ValueError("W and dag disagree on the node count")

    @property
    def n(self):
        return self.W.shape[0]

    @property
    def is_sparse(self):
        return sp.issparse(self.W)

    def dense(self):
        return self.W.toarray() if self.is_sparse else np.asarray(self.W)

    def closure_edges(self):
        """The strictly lower part, i.e. the transitive closure weights."""
        if self.is_sparse:
            return (self.W - sp.eye_array(self.n, format="csr")).tocsr()
        return self.W - np.eye(self.n)


def _initial_matrix(dag, s):
    A = dag.adjacency()
    H = np.full((dag.n, dag.n), s.zero, dtype=float)
    mask = A != 0
    H[mask] = s.encode(A[mask])
    return H


def _floyd_warshall(H, s):
    # Only row/column k can feed the update at step k; in topological order
    # H[:, k] lives below k and H[k, :] left of k, so only that block changes.
    n = H.shape[0]
    zero = s.zero
    for k in range(n):
        col = H[k + 1:, k]
        row = H[k, :k]
        rows = np.flatnonzero(col != zero) + k + 1
        cols = np.flatnonzero(row != zero)
        if rows.size == 0 or cols.size == 0:
            continue
        block = np.ix_(rows, cols)
        H[block] = s.plus(H[block], s.times(H[rows, k][:, None], H[k, cols][None, :]))
    return H


def _topological_dense(dag, s):
    n = dag.n
    H = np.full((n, n), s.zero, dtype=float)
    for x, plist in enumerate(dag.parents()):
        acc = H[x]
        for y, w in plist:
            reach = H[y].copy()
            reach[y] = s.one
            acc = s.plus(acc, s.times(s.encode(np.array([w]))[0], reach))
        H[x] = acc
    return H


def _topological_sparse(dag, s):
    if not s.is_ufunc:
        raise ValueError("sparse closure needs numpy ufunc semiring operations")
    n = dag.n
    idx_rows, val_rows = [], []
    for x, plist in enumerate(dag.parents()):
        if not plist:
            idx_rows.append(np.zeros(0, dtype=np.intp))
            val_rows.append(np.zeros(0))
            continue
        idx_parts, val_parts = [], []
        for y, w in plist:
            ew = s.encode(np.array([w]))[0]
            idx_parts.append(np.append(idx_rows[y], y))
            val_parts.append(s.times(ew, np.append(val_rows[y], s.one)))
        idx = np.concatenate(idx_parts)
        val = np.concatenate(val_parts)
        order = np.argsort(idx, kind="stable")
        idx, val = idx[order], val[order]
        uniq, start = np.unique(idx, return_index=True)
        merged = s.plus.reduceat(val, start) if val.size else val
        keep = merged != s.zero
        idx_rows.append(uniq[keep])
        val_rows.append(merged[keep])
    indptr = np.zeros(n + 1, dtype=np.intp)
    indptr[1:] = np.cumsum([r.size for r in idx_rows])
    indices = np.concatenate(idx_rows) if n else np.zeros(0, dtype=np.intp)
    data = np.concatenate(val_rows) if n else np.zeros(0)
    return sp.csr_array((data, indices, indptr), shape=(n, n))


def weighted_transitive_closure(dag: WeightedDag, semiring="pollution", method="auto", check=True):
    """Close the weights of ``dag`` under ``semiring``.

    Parameters
    ----------
    dag : WeightedDag
    semiring : str or Semiring
    method : {"auto", "floyd-warshall", "topological"}
        ``floyd-warshall`` is the generic O(n^3) triple loop (restricted to
        the entries a DAG can change); ``topological`` accumulates rows in
        topological order in O(m n). ``auto`` uses the former for dense
        output and the latter for sparse output.
    check : bool
        Run the randomized semiring law checks first.

    Returns
    -------
    ndarray or scipy.sparse.csr_array
        ``n <= DENSE_LIMIT``: dense matrix, unreachable pairs hold the
        semiring zero (``inf`` for shortest path). Larger: sparse matrix
        whose implicit entries are "no path".
    """
    s = get_semiring(semiring)
    if check:
        s.check()
    if dag.n > DENSE_LIMIT:
        return _topological_sparse(dag, s)
    if method in ("auto", "floyd-warshall"):
        return _floyd_warshall(_initial_matrix(dag, s), s)
    if method == "topological":
        return _topological_dense(dag, s)
    raise ValueError(f"unknown method {method!r}")


def pollution_closure_closed_form(dag: WeightedDag):
    """``A + A^2 + ... = (I - A)^-1 - I`` by forward substitution."""
    n = dag.n
    if n > DENSE_LIMIT:
        # row-wise forward substitution: row x of (I - A)^-1 is e_x + sum_y a_xy * row y
        return _topological_sparse(dag, get_semiring("pollution"))
    M = np.eye(n) - dag.adjacency()
    inv = sla.solve_triangular(M, np.eye(n), lower=True, unit_diagonal=True)
    return inv - np.eye(n)


def reflexive_closure(closure, semiring="pollution", dag=None) -> ClosureOperator:
    """``W = I + closure`` with the semiring zero mapped to real 0.

    Only semirings whose multiplicative identity is 1 give a meaningful
    unit diagonal. Shortest-path and capacity closures have to be converted
    first with :func:`distance_to_influence` / :func:`capacity_to_influence`
    (and then passed with ``semiring="influence"``).
    """
    s = get_semiring(semiring) if not isinstance(semiring, Semiring) else semiring
    if s.one != 1.0:
        raise NonRealizableSemiring(
            f"{s.name} closure has multiplicative identity {s.one}; convert to influences first"
        )
    n = closure.shape[0]
    if sp.issparse(closure):
        C = sp.csr_array(closure, copy=True)
        if s.zero != 0.0:
            C.data[C.data == s.zero] = 0.0
        C = sp.tril(C, k=-1, format="csr")
        C.eliminate_zeros()
        W = (C + sp.eye_array(n, format="csr")).tocsr()
    else:
        C = np.array(closure, dtype=float)
        C[C == s.zero] = 0.0
        W = np.tril(C, k=-1) + np.eye(n)
    return ClosureOperator(W, s.name, dag)


def distance_to_influence(D):
    """Entrywise ``exp(-d)`` with ``inf -> 0``; diagonal and sparse structure are preserved."""
    if sp.issparse(D):
        out = sp.csr_array(D, copy=True).astype(float)
        if np.any(out.data < 0):
            raise NegativeDistance("distances must be nonnegative")
        out.data = np.exp(-out.data)
        return out
    D = np.asarray(D, dtype=float)
    if np.any(D < 0):
        raise NegativeDistance("distances must be nonnegative")
    return np.exp(-D)


def capacity_to_influence(C):
    """Entrywise ``exp(-1/c)``; capacity 0 (no path) maps to 0.

    Experimental: how a max/min capacity closure interacts with a
    multiplicative reflexive weight is not worked out anywhere.
    """
    def conv(x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise NegativeDistance("capacities must be nonnegative")
        with np.errstate(divide="ignore"):
            return np.exp(-1.0 / x)

    if sp.issparse(C):
        out = sp.csr_array(C, copy=True).astype(float)
        out.data = conv(out.data)
        return out
    return conv(C)


def closure_operator(dag: WeightedDag, semiring="pollution", method="auto") -> ClosureOperator:
    """Full pipeline: transitive closure, conversion to influences if needed, reflexive closure.

    ``method="closed-form"`` is accepted for the pollution semiring only.
    """
    s = get_semiring(semiring)
    if method == "closed-form":
        if s.name != "pollution":
            raise ValueError("the closed form exists only for the pollution semiring")
        C = pollution_closure_closed_form(dag)
    else:
        C = weighted_transitive_closure(dag, s, method=method)
    target = s
    if s.name == "shortest_path":
        C, target = distance_to_influence(C), get_semiring("influence")
    elif s.name == "max_capacity":
        C, target = capacity_to_influence(C), get_semiring("influence")
    op = reflexive_closure(C, target, dag=dag)
    return ClosureOperator(op.W, s.name, dag)
