"""CSV readers and writers for edge lists, signals and matrices.

Floats are written with ``repr`` so output is exact and byte-stable.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .dag import WeightedDag, build_dag
from .exceptions import ParseError

__all__ = [
    "read_edge_csv",
    "read_labels",
    "load_dag",
    "write_edge_csv",
    "write_triplets",
    "read_triplets",
    "read_signal",
    "write_signal",
    "write_rows",
]


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def write_rows(path, header, rows):
    """Write a CSV with ``\\n`` line endings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _read_table(path, expected):
    with open(Path(path), newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        header = [h.strip().lower() for h in header]
        if header != expected:
            raise ParseError(f"expected header {','.join(expected)}, got {','.join(header)}", line=1)
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(expected):
                raise ParseError(f"expected {len(expected)} fields, got {len(row)}", line=lineno)
            out.append((lineno, [c.strip() for c in row]))
        return out


def read_edge_csv(path):
    """Edges ``(src, dst, weight)`` from a ``src,dst,weight`` CSV; endpoints stay strings."""
    edges = []
    for lineno, (src, dst, w) in _read_table(path, ["src", "dst", "weight"]):
        try:
            edges.append((src, dst, float(w)))
        except ValueError:
            raise ParseError(f"non-numeric weight {w!r}", line=lineno) from None
    return edges


def read_labels(path):
    with open(Path(path)) as fh:
        return [line.strip() for line in fh if line.strip()]


def load_dag(edges_path, labels_path=None) -> WeightedDag:
    labels = read_labels(labels_path) if labels_path else None
    return build_dag(read_edge_csv(edges_path), node_labels=labels)


def write_edge_csv(dag: WeightedDag, path):
    write_rows(path, ["src", "dst", "weight"], ((dag.labels[s], dag.labels[d], w) for s, d, w in dag.edges))


def write_triplets(M, path, skip_zero=True):
    """``row,col,value`` for a matrix in topological indexing.

    Zeros are skipped; infinite entries (unreachable shortest paths) are
    skipped as well so the file lists reachable pairs only.
    """
    if sp.issparse(M):
        C = sp.coo_array(M)
        order = np.lexsort((C.col, C.row))
        rows = zip(C.row[order], C.col[order], C.data[order])
    else:
        M = np.asarray(M, dtype=float)
        r, c = np.nonzero((M != 0) & np.isfinite(M)) if skip_zero else np.nonzero(np.isfinite(M))
        rows = zip(r, c, M[r, c])
    write_rows(path, ["row", "col", "value"], ((int(i), int(j), float(v)) for i, j, v in rows))


def read_triplets(path, n):
    out = np.zeros((n, n))
    for lineno, (i, j, v) in _read_table(path, ["row", "col", "value"]):
        try:
            out[int(i), int(j)] = float(v)
        except (ValueError, IndexError):
            raise ParseError(f"bad triplet {i},{j},{v}", line=lineno) from None
    return out


def read_signal(path, dag: WeightedDag):
    """Signal from a ``node,value`` CSV, returned in topological order; missing nodes are 0."""
    s = np.zeros(dag.n)
    for lineno, (node, value) in _read_table(path, ["node", "value"]):
        try:
            s[dag.pos(node)] = float(value)
        except KeyError:
            raise ParseError(f"unknown node {node!r}", line=lineno) from None
        except ValueError:
            raise ParseError(f"non-numeric value {value!r}", line=lineno) from None
    return s


def write_signal(values, dag: WeightedDag, path):
    write_rows(path, ["node", "value"], zip(dag.ordered_labels(), np.asarray(values, dtype=float)))
