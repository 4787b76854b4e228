"""Linear structural equation models and their link to closures.

For the (+, *) closure, the SEM ``X = A X + N`` has the solution
``X = W N``: the noise is the spectrum of the sampled signal. Conversely,
any closure ``W`` defines the SEM with weights ``A' = I - W^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import as_seed_sequence
from .closure import ClosureOperator
from .dag import WeightedDag
from .spectral import inverse_fourier_transform, moebius_matrix

__all__ = ["SemSignalConfig", "generate_sem_signal", "sem_from_closure"]


@dataclass(frozen=True)
class SemSignalConfig:
    """Parameters of ``X = W (C + N_c) + N_x``.

    ``C`` has ``ceil(cause_density * n)`` nonzero entries at uniformly
    random nodes with magnitudes uniform in ``cause_range``; each nonzero
    gets a random sign only when ``random_sign`` is set.
    """

    cause_density: float = 0.1
    cause_range: tuple = (1.0, 10.0)
    sigma_c: float = 0.1
    sigma_x: float = 0.1
    random_sign: bool = False
    seed: int | None = None

    def __post_init__(self):
        if not 0.0 < self.cause_density <= 1.0:
            raise ValueError("cause_density must lie in (0, 1]")
        if self.sigma_c < 0 or self.sigma_x < 0:
            raise ValueError("noise standard deviations must be nonnegative")
        low, high = self.cause_range
        if low > high:
            raise ValueError("cause_range must be (low, high) with low <= high")


def generate_sem_signal(W, cfg: SemSignalConfig, seed=None):
    """Sample one signal and return ``(X, C)``.

    The seed (``seed`` overrides ``cfg.seed``) is split into four
    independent streams for the support, the magnitudes and both noise
    vectors, so changing one parameter never shifts the others' draws.
    """
    n = W.n if isinstance(W, ClosureOperator) else np.shape(W)[0]
    ss = as_seed_sequence(cfg.seed if seed is None else seed)
    support_rng, mag_rng, nc_rng, nx_rng = (np.random.default_rng(s) for s in ss.spawn(4))

    k = int(np.ceil(cfg.cause_density * n - 1e-12))
    C = np.zeros(n)
    support = np.sort(support_rng.choice(n, size=k, replace=False))
    mags = mag_rng.uniform(*cfg.cause_range, size=k)
    if cfg.random_sign:
        mags *= mag_rng.choice([-1.0, 1.0], size=k)
    C[support] = mags
    N_c = nc_rng.normal(0.0, cfg.sigma_c, size=n) if cfg.sigma_c > 0 else np.zeros(n)
    N_x = nx_rng.normal(0.0, cfg.sigma_x, size=n) if cfg.sigma_x > 0 else np.zeros(n)
    X = inverse_fourier_transform(C + N_c, W) + N_x
    return X, C


def sem_from_closure(W, labels=None) -> WeightedDag:
    """DAG with weights ``A' = I - W^-1`` whose SEM noise is the spectrum under ``W``.

    Entries that cancel to exactly zero are not edges.
    """
    dag = None
    if isinstance(W, ClosureOperator):
        dag = W.dag
        W = W.W
    F = moebius_matrix(W, method="inverse")
    A = np.eye(F.shape[0]) - F
    A[np.triu_indices_from(A)] = 0.0
    if labels is None and dag is not None:
        labels = dag.ordered_labels()
    return WeightedDag.from_matrix(A, labels=labels)
