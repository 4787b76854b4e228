"""Undirected graph Fourier bases used as baselines.

Dropping edge directions gives symmetric matrices whose orthonormal
eigenbases are the usual graph signal processing Fourier bases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .closure import ClosureOperator
from .dag import WeightedDag
from .exceptions import NotConverged, NotSymmetric

__all__ = [
    "SymmetricEigenbasis",
    "undirected_matrices",
    "jacobi_eigh",
    "symmetric_eigenbasis",
    "JACOBI_LIMIT",
]

#: ``method="auto"`` uses Jacobi rotations up to this size and LAPACK above.
JACOBI_LIMIT = 256


@dataclass(frozen=True)
class SymmetricEigenbasis:
    """Orthonormal eigenvectors (columns of ``Q``) with ascending eigenvalues."""

    Q: np.ndarray
    eigenvalues: np.ndarray
    source: str = "custom"


def undirected_matrices(dag: WeightedDag, W) -> dict:
    """The four symmetric baseline matrices.

    ``adjacency = A + A^T``, ``adjacency_closed = W + W^T - 2I`` and the
    matching Laplacians ``D - S`` with ``D`` the diagonal of row sums.
    """
    if isinstance(W, ClosureOperator):
        W = W.dense()
    elif sp.issparse(W):
        W = W.toarray()
    A = dag.adjacency()
    S1 = A + A.T
    S2 = W + W.T - 2.0 * np.eye(dag.n)
    return {
        "adjacency": S1,
        "adjacency_closed": S2,
        "laplacian": np.diag(S1.sum(axis=1)) - S1,
        "laplacian_closed": np.diag(S2.sum(axis=1)) - S2,
    }


def _round_robin(n):
    """n-1 (n even) rounds of disjoint index pairs covering every pair once."""
    players = list(range(n))
    rounds = []
    for _ in range(n - 1):
        pairs = [(players[i], players[n - 1 - i]) for i in range(n // 2)]
        rounds.append((np.array([min(p) for p in pairs]), np.array([max(p) for p in pairs])))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def _off_norm(A):
    return np.linalg.norm(A - np.diag(np.diag(A)))


def jacobi_eigh(M, tol=1e-14, max_sweeps=60):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits all index pairs in a round-robin order; within a round
    the pairs are disjoint, so their rotations are applied together.

    Returns ``(eigenvalues, Q)`` unsorted.
    """
    A = np.array(M, dtype=float)
    n = A.shape[0]
    if n <= 1:
        return A.diagonal().copy(), np.eye(n)
    size = n + (n % 2)
    if size != n:
        A = np.pad(A, ((0, 1), (0, 1)))
    V = np.eye(size)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)
    rounds = _round_robin(size)
    for _ in range(max_sweeps):
        off = _off_norm(A)
        if off <= tol * scale:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            P, Q, apq = P[active], Q[active], apq[active]
            theta = (A[Q, Q] - A[P, P]) / (2.0 * apq)
            big = np.abs(theta) > 1e150
            th = np.where(big, 1.0, theta)
            t = np.where(big, 0.5 / np.where(big, theta, 1.0),
                         np.sign(th) / (np.abs(th) + np.sqrt(th * th + 1.0)))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # A <- J^T A J, V <- V J for the block rotation J
            cp, cq = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = c * cp - s * cq
            A[:, Q] = s * cp + c * cq
            rp, rq = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * rp - s[:, None] * rq
            A[Q, :] = s[:, None] * rp + c[:, None] * rq
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            vp, vq = V[:, P].copy(), V[:, Q].copy()
            V[:, P] = c * vp - s * vq
            V[:, Q] = s * vp + c * vq
    else:
        off = _off_norm(A)
        if off > tol * scale * 1e3:
            raise NotConverged(f"Jacobi did not converge in {max_sweeps} sweeps (off-norm {off:.3e})")
    return A.diagonal()[:n].copy(), V[:n, :n].copy()


def symmetric_eigenbasis(M, method="auto", source="custom", sym_tol=1e-10) -> SymmetricEigenbasis:
    """Full eigenbasis with ascending eigenvalues and a fixed sign convention.

    Each eigenvector is flipped so that its largest-magnitude entry (the
    first one on ties) is positive.

    Parameters
    ----------
    method : {"auto", "jacobi", "lapack"}
        ``auto`` uses Jacobi up to :data:`JACOBI_LIMIT` nodes.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric(f"matrix must be square, got {M.shape}")
    if M.size and np.max(np.abs(M - M.T)) > sym_tol * max(1.0, np.max(np.abs(M))):
        raise NotSymmetric("matrix is not symmetric")
    M = 0.5 * (M + M.T)
    if method == "auto":
        method = "jacobi" if M.shape[0] <= JACOBI_LIMIT else "lapack"
    if method == "jacobi":
        vals, Q = jacobi_eigh(M)
    elif method == "lapack":
        vals, Q = np.linalg.eigh(M)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(vals, kind="stable")
    vals, Q = vals[order], Q[:, order]
    if Q.size:
        lead = np.argmax(np.abs(Q), axis=0)
        signs = np.sign(Q[lead, np.arange(Q.shape[1])])
        signs[signs == 0] = 1.0
        Q = Q * signs
    return SymmetricEigenbasis(Q, vals, source)
