"""Weighted DAGs, their topological order and the partial order they induce.

Every matrix produced by this package is indexed by *topological position*,
not by the node index the caller used. ``WeightedDag.topo_order[i]`` is the
node sitting at position ``i`` and ``WeightedDag.position[v]`` is the
inverse map. Matrix entry ``A[x, y]`` holds the weight of the edge ``y -> x``
so that ``A`` is strictly lower triangular.
"""

from __future__ import annotations

import heapq
from numbers import Integral
from typing import Hashable, Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .exceptions import CycleDetected, DuplicateEdge, EmptyWeightRange, ZeroWeight

__all__ = [
    "WeightedDag",
    "PosetView",
    "build_dag",
    "poset_view",
    "transitive_reduction",
    "erdos_renyi_dag",
]


def _kahn_order(n, edges):
    """Stable Kahn sort; among ready nodes the smallest index goes first."""
    indeg = [0] * n
    children = [[] for _ in range(n)]
    for src, dst, _ in edges:
        children[src].append(dst)
        indeg[dst] += 1
    heap = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for c in children[v]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    if len(order) != n:
        stuck = sorted(v for v in range(n) if indeg[v] > 0)
        raise CycleDetected(f"directed cycle through nodes {stuck[:10]}")
    return np.asarray(order, dtype=np.intp)


class WeightedDag:
    """Immutable edge-weighted DAG with a fixed topological order.

    Use :func:`build_dag` or :meth:`from_matrix` rather than calling the
    constructor with unchecked data.

    Attributes
    ----------
    n : int
        Number of nodes.
    labels : tuple of str
        Label of each node, by node index.
    edges : tuple of (int, int, float)
        ``(src, dst, weight)`` triples using node indices.
    topo_order : ndarray of int
        ``topo_order[i]`` is the node at topological position ``i``.
    position : ndarray of int
        Inverse permutation of ``topo_order``.
    """

    def __init__(self, n, edges, labels=None, topo_order=None):
        self.n = int(n)
        self.edges = tuple((int(s), int(d), float(w)) for s, d, w in edges)
        if labels is None:
            labels = [str(i) for i in range(self.n)]
        self.labels = tuple(str(lab) for lab in labels)
        if len(self.labels) != self.n:
            raise ValueError(f"expected {self.n} labels, got {len(self.labels)}")
        if topo_order is None:
            topo_order = _kahn_order(self.n, self.edges)
        self.topo_order = np.asarray(topo_order, dtype=np.intp)
        self.topo_order.setflags(write=False)
        position = np.empty(self.n, dtype=np.intp)
        position[self.topo_order] = np.arange(self.n)
        position.setflags(write=False)
        self.position = position
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    def __repr__(self):
        return f"WeightedDag(n={self.n}, edges={len(self.edges)})"

    @property
    def n_edges(self):
        return len(self.edges)

    @classmethod
    def from_matrix(cls, A, labels=None):
        """Build from a strictly lower-triangular weight matrix already in topological order."""
        A = sp.coo_array(A) if sp.issparse(A) else np.asarray(A, dtype=float)
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError("weight matrix must be square")
        if sp.issparse(A):
            rows, cols, vals = A.row, A.col, A.data
            keep = vals != 0
            rows, cols, vals = rows[keep], cols[keep], vals[keep]
        else:
            rows, cols = np.nonzero(A)
            vals = A[rows, cols]
        if np.any(cols >= rows):
            raise CycleDetected("matrix is not strictly lower triangular")
        edges = sorted(zip(cols.tolist(), rows.tolist(), vals.tolist()))
        return cls(n, edges, labels=labels, topo_order=np.arange(n))

    def node(self, key):
        """Node index for ``key``, given either as a label or an integer index."""
        if isinstance(key, (Integral, np.integer)) and not isinstance(key, bool):
            if not 0 <= key < self.n:
                raise IndexError(f"node index {key} out of range")
            return int(key)
        try:
            return self._index[str(key)]
        except KeyError:
            raise KeyError(f"unknown node {key!r}") from None

    def pos(self, key):
        """Topological position of a node given by label or index."""
        return int(self.position[self.node(key)])

    def ordered_labels(self):
        """Labels listed in topological order (the row order of every matrix)."""
        return [self.labels[v] for v in self.topo_order]

    def adjacency(self, sparse=False):
        """Weight matrix ``A`` in topological order; ``A[x, y]`` is the weight of ``y -> x``."""
        if self.edges:
            src, dst, w = map(np.asarray, zip(*self.edges))
            rows = self.position[dst.astype(np.intp)]
            cols = self.position[src.astype(np.intp)]
        else:
            rows = cols = np.zeros(0, dtype=np.intp)
            w = np.zeros(0)
        mat = sp.csr_array((w.astype(float), (rows, cols)), shape=(self.n, self.n))
        return mat if sparse else mat.toarray()

    def parents(self):
        """Per topological position, the list of ``(parent_position, weight)``."""
        out = [[] for _ in range(self.n)]
        for s, d, w in self.edges:
            out[self.position[d]].append((int(self.position[s]), w))
        for lst in out:
            lst.sort()
        return out

    def with_weights(self, weights):
        """Copy with the edge weights replaced (same edge order)."""
        weights = list(weights)
        if len(weights) != len(self.edges):
            raise ValueError("one weight per edge required")
        edges = [(s, d, w) for (s, d, _), w in zip(self.edges, weights)]
        if any(w == 0 for _, _, w in edges):
            raise ZeroWeight("edge weights must be nonzero")
        return WeightedDag(self.n, edges, labels=self.labels, topo_order=self.topo_order)


def build_dag(edge_list: Iterable[Sequence], node_labels: Sequence[Hashable] | None = None, n: int | None = None) -> WeightedDag:
    """Validate an edge list and return a :class:`WeightedDag`.

    Endpoints may be integer node indices or labels. Labels are assigned
    dense indices in first-appearance order, starting with ``node_labels``
    if given. Integer endpoints are used as indices directly when no labels
    are involved.

    Raises
    ------
    ZeroWeight, DuplicateEdge, CycleDetected
    """
    edge_list = [tuple(e) for e in edge_list]
    for e in edge_list:
        if len(e) not in (2, 3):
            raise ValueError(f"edge {e!r} must be (src, dst) or (src, dst, weight)")
    endpoints = [x for e in edge_list for x in e[:2]]
    all_int = all(isinstance(x, (Integral, np.integer)) and not isinstance(x, bool) for x in endpoints)

    if node_labels is None and all_int:
        size = max(endpoints, default=-1) + 1
        if n is not None:
            if n < size:
                raise ValueError(f"n={n} but edges reference node {size - 1}")
            size = n
        if any(x < 0 for x in endpoints):
            raise ValueError("node indices must be nonnegative")
        labels = [str(i) for i in range(size)]
        index = lambda x: int(x)  # noqa: E731
    else:
        labels = []
        lookup = {}
        for lab in list(node_labels or []) + endpoints:
            key = str(lab)
            if key not in lookup:
                lookup[key] = len(labels)
                labels.append(key)
        index = lambda x: lookup[str(x)]  # noqa: E731
        if n is not None and n != len(labels):
            raise ValueError(f"n={n} does not match {len(labels)} labels")

    seen = set()
    edges = []
    for e in edge_list:
        src, dst = index(e[0]), index(e[1])
        w = float(e[2]) if len(e) == 3 else 1.0
        if w == 0 or not np.isfinite(w):
            raise ZeroWeight(f"edge {e[0]}->{e[1]} has weight {w}; weights must be finite and nonzero")
        if src == dst:
            raise CycleDetected(f"self-loop at node {e[0]}")
        if (src, dst) in seen:
            raise DuplicateEdge(f"duplicate edge {e[0]}->{e[1]}")
        seen.add((src, dst))
        edges.append((src, dst, w))
    return WeightedDag(len(labels), edges, labels=labels)


class PosetView:
    """Reachability relation of a DAG.

    ``matrix[x, y]`` (topological positions) is True iff ``y <= x``, so the
    boolean pattern matches the lower-triangular closure matrices.
    """

    def __init__(self, dag: WeightedDag, matrix: np.ndarray):
        self.dag = dag
        self.matrix = matrix
        self.matrix.setflags(write=False)

    def leq(self, y, x) -> bool:
        """True iff ``y <= x``, i.e. ``x`` is reachable from ``y`` or equal to it."""
        return bool(self.matrix[self.dag.pos(x), self.dag.pos(y)])

    def predecessors(self, x):
        """Node indices ``y`` with ``y <= x`` (including ``x``)."""
        return set(self.dag.topo_order[np.flatnonzero(self.matrix[self.dag.pos(x)])].tolist())

    def successors(self, y):
        """Node indices ``q`` with ``y <= q`` (including ``y``)."""
        return set(self.dag.topo_order[np.flatnonzero(self.matrix[:, self.dag.pos(y)])].tolist())

    def zeta(self):
        """The relation as a 0/1 float matrix (unit lower triangular)."""
        return self.matrix.astype(float)


def _reachability(dag):
    n = dag.n
    R = np.zeros((n, n), dtype=bool)
    for x, plist in enumerate(dag.parents()):
        R[x, x] = True
        for y, _ in plist:
            R[x] |= R[y]
    return R


def poset_view(dag: WeightedDag) -> PosetView:
    """Compute the induced partial order once, in O(n*m) boolean row operations."""
    return PosetView(dag, _reachability(dag))


def transitive_reduction(dag: WeightedDag) -> WeightedDag:
    """Cover graph of the induced poset, keeping the original weights of surviving edges."""
    R = _reachability(dag)
    parents = dag.parents()
    keep = []
    for s, d, w in dag.edges:
        x, y = dag.position[d], dag.position[s]
        redundant = any(z != y and R[z, y] for z, _ in parents[x])
        if not redundant:
            keep.append((s, d, w))
    return WeightedDag(dag.n, keep, labels=dag.labels, topo_order=dag.topo_order)


def erdos_renyi_dag(n: int, p: float, weight_range=(-1.0, 1.0), seed=None) -> WeightedDag:
    """Random DAG: nodes shuffled, each forward pair joined with probability ``p``.

    Weights are uniform in ``weight_range``; exact zeros are resampled.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    low, high = map(float, weight_range)
    if low > high or (low == high == 0.0):
        raise EmptyWeightRange(f"no nonzero weight available in [{low}, {high}]")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    iu, ju = np.triu_indices(n, k=1)
    mask = rng.random(iu.size) < p
    iu, ju = iu[mask], ju[mask]
    w = rng.uniform(low, high, size=iu.size)
    while np.any(w == 0):
        bad = w == 0
        w[bad] = rng.uniform(low, high, size=int(bad.sum()))
    edges = list(zip(perm[iu].tolist(), perm[ju].tolist(), w.tolist()))
    return WeightedDag(n, edges)
