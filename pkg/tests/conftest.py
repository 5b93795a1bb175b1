import numpy as np
import pytest

from entangled_graphs.graphs import BrainGraph


def graph_from_adjacency(a, features=None):
    a = np.asarray(a, dtype=float)
    if features is None:
        features = a.copy()
    return BrainGraph(adjacency=a, features=features)


def path_graph(n, weight=1.0):
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = weight
    return graph_from_adjacency(a)


def cycle_graph(n, weight=1.0):
    a = np.zeros((n, n))
    for i in range(n):
        j = (i + 1) % n
        a[i, j] = a[j, i] = weight
    return graph_from_adjacency(a)


def star_graph(n, weight=1.0):
    a = np.zeros((n, n))
    a[0, 1:] = weight
    a[1:, 0] = weight
    return graph_from_adjacency(a)


def complete_graph(n, weight=1.0):
    a = np.full((n, n), float(weight))
    np.fill_diagonal(a, 0.0)
    return graph_from_adjacency(a)


def random_graph(n, seed, p=0.4, weighted=True, ensure_edge=True):
    rng = np.random.Generator(np.random.PCG64(seed))
    a = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                w = rng.uniform(0.2, 2.0) if weighted else 1.0
                a[i, j] = a[j, i] = w
    if ensure_edge and not a.any():
        a[0, 1] = a[1, 0] = 1.0
    return graph_from_adjacency(a)


@pytest.fixture
def two_cliques():
    """Two 5-cliques, no bridge."""
    a = np.zeros((10, 10))
    for block in (range(5), range(5, 10)):
        for i in block:
            for j in block:
                if i != j:
                    a[i, j] = 1.0
    return graph_from_adjacency(a)
