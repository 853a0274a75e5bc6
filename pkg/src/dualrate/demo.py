"""Bundled six-node example scenarios used by the CLI and the docs.

The first graph admits a finite optimal sampling ratio; the second does
not (its smallest nonzero Laplacian mode dominates the largest in the
large-N limit). Both ship with the same reference initial state, which
the CLI exposes as --x0 paper.
"""
import numpy as np

from .graph import Graph, from_adjacency

_ADJACENCY = (
    (0, 1, 0, 0, 1, 0),
    (1, 0, 1, 0, 1, 0),
    (0, 1, 0, 1, 0, 0),
    (0, 0, 1, 0, 1, 1),
    (1, 1, 0, 1, 0, 0),
    (0, 0, 0, 1, 0, 0),
)

_ADJACENCY_NO_FINITE = (
    (0, 1, 0, 1, 1, 0),
    (1, 0, 1, 0, 1, 1),
    (0, 1, 0, 0, 0, 1),
    (1, 0, 0, 0, 1, 0),
    (1, 1, 0, 1, 0, 0),
    (0, 1, 1, 0, 0, 0),
)

_INITIAL_STATE = (5.0, 6.0, -3.5, 0.0, -2.0, 3.0)


def six_node_graph() -> Graph:
    """The example graph with a finite optimal sampling ratio."""
    return from_adjacency(np.array(_ADJACENCY, dtype=float))


def six_node_graph_no_finite_optimum() -> Graph:
    """The example graph whose decay objective has no finite minimizer."""
    return from_adjacency(np.array(_ADJACENCY_NO_FINITE, dtype=float))


def example_initial_state() -> np.ndarray:
    """Reference initial state shared by both example graphs."""
    return np.array(_INITIAL_STATE)


def matches_example_graph(g: Graph) -> bool:
    """Whether g is one of the two bundled six-node graphs."""
    if g.n != 6:
        return False
    return np.array_equal(g.adjacency, np.array(_ADJACENCY, dtype=float)) or np.array_equal(
        g.adjacency, np.array(_ADJACENCY_NO_FINITE, dtype=float)
    )
