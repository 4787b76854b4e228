import numpy as np
import pytest

from dagsp import build_dag

EXAMPLE_EDGES = [
    ("a", "c", 0.3), ("b", "c", 0.2), ("a", "d", 0.7), ("b", "d", 0.7),
    ("c", "e", 1.0), ("d", "e", 0.5), ("b", "f", 0.1), ("d", "f", 0.5),
]

EXAMPLE_W = np.array([
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [0.3, 0.2, 1, 0, 0, 0],
    [0.7, 0.7, 0, 1, 0, 0],
    [0.65, 0.55, 1, 0.5, 1, 0],
    [0.35, 0.45, 0, 0.5, 0, 1],
])

EXAMPLE_F = np.array([
    [1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0],
    [-0.3, -0.2, 1, 0, 0, 0],
    [-0.7, -0.7, 0, 1, 0, 0],
    [0, 0, -1, -0.5, 1, 0],
    [0, -0.1, 0, -0.5, 0, 1],
])


@pytest.fixture
def example_dag():
    return build_dag(EXAMPLE_EDGES, node_labels=list("abcdef"))


def random_small_dag(rng, n_max=8, p=0.5, weight_range=(-1.0, 1.0)):
    n = int(rng.integers(1, n_max + 1))
    perm = rng.permutation(n)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = 0.0
                while w == 0.0:
                    w = float(rng.uniform(*weight_range))
                edges.append((int(perm[i]), int(perm[j]), w))
    return build_dag(edges, n=n)
