"""Shared fixtures and random-graph helpers."""
import numpy as np
import pytest

from dualrate.demo import (
    example_initial_state,
    six_node_graph,
    six_node_graph_no_finite_optimum,
)
from dualrate.graph import Graph, from_adjacency


def random_graph_matrix(rng, n: int, p: float = 0.4) -> np.ndarray:
    """Random symmetric 0/1 matrix without isolated vertices (connectivity not guaranteed)."""
    while True:
        upper = np.triu((rng.random((n, n)) < p).astype(float), 1)
        a = upper + upper.T
        if (a.sum(axis=1) > 0).all():
            return a


def random_connected_graph(rng, n: int, extra_edge_prob: float = 0.3) -> Graph:
    """Random spanning tree plus extra edges: connected by construction."""
    a = np.zeros((n, n))
    for v in range(1, n):
        u = int(rng.integers(0, v))
        a[u, v] = a[v, u] = 1.0
    mask = np.triu(rng.random((n, n)) < extra_edge_prob, 1)
    a = np.where(mask | mask.T, 1.0, a)
    return from_adjacency(a)


def random_disconnected_graph(rng, n_a: int, n_b: int) -> Graph:
    """Two connected components glued into one adjacency matrix."""
    g_a = random_connected_graph(rng, n_a)
    g_b = random_connected_graph(rng, n_b)
    n = n_a + n_b
    a = np.zeros((n, n))
    a[:n_a, :n_a] = g_a.adjacency
    a[n_a:, n_a:] = g_b.adjacency
    return from_adjacency(a)


@pytest.fixture
def bench_graph() -> Graph:
    return six_node_graph()


@pytest.fixture
def bench_graph_alt() -> Graph:
    return six_node_graph_no_finite_optimum()


@pytest.fixture
def bench_x0() -> np.ndarray:
    return example_initial_state()


@pytest.fixture
def k2() -> Graph:
    return from_adjacency([[0, 1], [1, 0]])


@pytest.fixture
def path3() -> Graph:
    return from_adjacency([[0, 1, 0], [1, 0, 1], [0, 1, 0]])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260811)
