"""Input checks shared by the public functions and estimators."""

import numpy as np
import scipy.sparse as sp

from .exceptions import DimensionMismatch


def check_vector(s, n, name="signal"):
    """Float copy of a length-``n`` vector, or of an ``(n, k)`` stack of column vectors."""
    arr = np.asarray(s, dtype=float)
    if arr.ndim not in (1, 2) or arr.shape[0] != n:
        raise DimensionMismatch(f"{name} has shape {arr.shape}; expected ({n},) or ({n}, k)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_square(M, name="matrix"):
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {M.shape}")
    return M


def check_unit_lower(W, name="W"):
    check_square(W, name)
    if sp.issparse(W):
        bad = sp.triu(W, k=1).nnz
    else:
        bad = np.count_nonzero(np.triu(W, k=1))
    if bad or not np.all(W.diagonal() == 1.0):
        raise ValueError(f"{name} must be unit lower triangular")
    return W


def check_indices(idx, n):
    idx = np.asarray(idx, dtype=np.intp).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"sample indices must lie in [0, {n})")
    if np.unique(idx).size != idx.size:
        raise ValueError("sample indices must be distinct")
    return idx


def as_seed_sequence(seed):
    """Accept ``None``, an int, a sequence of ints or a SeedSequence."""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)
