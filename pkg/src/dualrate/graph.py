"""Undirected graphs and their normalized-Laplacian spectra.

The communication topology is an unweighted, undirected simple graph. All
downstream analysis runs on the normalized Laplacian L = I - D^-1 A, whose
eigenvalues are real and lie in [0, 2]; the zero eigenvalue is simple
exactly when the graph is connected. Since L itself is not symmetric, the
spectrum is computed on the similar symmetric matrix
S = I - D^-1/2 A D^-1/2 and mapped back.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    AsymmetricMatrix,
    EigensolverNoConvergence,
    IsolatedVertex,
    SelfLoop,
)


@dataclass(frozen=True)
class Graph:
    """Validated simple graph: 0/1 adjacency, symmetric, no self-loops.

    Every vertex has degree >= 1 so that D^-1 exists.
    """

    n: int
    adjacency: np.ndarray   # (n, n) of 0/1, float64
    degrees: np.ndarray     # (n,) positive integers


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of the normalized Laplacian.

    eigenvalues are sorted ascending. Column i of right_eigenvectors and
    row i of left_eigenvectors form a biorthonormal pair: left @ right = I.
    """

    eigenvalues: np.ndarray          # (n,) ascending
    right_eigenvectors: np.ndarray   # (n, n), columns
    left_eigenvectors: np.ndarray    # (n, n), rows


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def from_adjacency(matrix) -> Graph:
    """Validate an adjacency matrix and build a Graph.

    Raises ValueError for malformed input (non-square, entries outside
    {0, 1}), AsymmetricMatrix, SelfLoop, or IsolatedVertex.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {a.shape}")
    if a.size == 0:
        raise ValueError("adjacency must have at least one vertex")
    if not np.isin(a, (0.0, 1.0)).all():
        raise ValueError("adjacency entries must be 0 or 1 (weighted graphs are not supported)")
    if not np.array_equal(a, a.T):
        raise AsymmetricMatrix("adjacency must satisfy a_ij == a_ji")
    if np.any(np.diag(a) != 0.0):
        raise SelfLoop("adjacency diagonal must be zero")
    degrees = a.sum(axis=1).astype(np.int64)
    if np.any(degrees == 0):
        bad = int(np.flatnonzero(degrees == 0)[0])
        raise IsolatedVertex(f"vertex {bad} has degree 0")
    return Graph(n=a.shape[0], adjacency=_freeze(a), degrees=_freeze(degrees))


def from_json(obj) -> Graph:
    """Build a Graph from {"n": int, "edges": [[i, j], ...]} (0-based).

    Duplicate or reversed edge entries are idempotent; self-edges raise
    SelfLoop; indices outside [0, n) raise ValueError.
    """
    try:
        n = int(obj["n"])
        edges = obj["edges"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"graph JSON must have 'n' and 'edges': {exc}") from exc
    if n < 1:
        raise ValueError(f"'n' must be positive, got {n}")
    a = np.zeros((n, n))
    for edge in edges:
        i, j = (int(v) for v in edge)
        if not (0 <= i < n and 0 <= j < n):
            raise ValueError(f"edge {edge} outside vertex range [0, {n})")
        if i == j:
            raise SelfLoop(f"edge {edge} is a self-loop")
        a[i, j] = a[j, i] = 1.0
    return from_adjacency(a)


def load_graph(path) -> Graph:
    """Read a graph JSON file (see from_json for the schema)."""
    with open(path, encoding="utf-8") as fh:
        return from_json(json.load(fh))


def is_connected(g: Graph) -> bool:
    """Breadth-first search from vertex 0 reaches every vertex."""
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in np.flatnonzero(g.adjacency[v]):
            if not seen[u]:
                seen[u] = True
                queue.append(int(u))
    return bool(seen.all())


def normalized_laplacian(g: Graph) -> np.ndarray:
    """I - D^-1 A; every row sums to zero."""
    return np.eye(g.n) - g.adjacency / g.degrees[:, None]


def _jacobi_eigh(sym: np.ndarray, max_sweeps: int = 100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) unsorted, eigenvectors as columns.
    Rotations are applied pivot by pivot until the off-diagonal mass drops
    below machine-level relative to the Frobenius norm. Unconditionally
    convergent for symmetric input; the sweep cap is a safety net.
    """
    a = np.array(sym, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return np.diag(a).copy(), v
    scale = max(np.linalg.norm(a), 1e-300)
    for _ in range(max_sweeps):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= 1e-15 * scale:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                beta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(beta) > 1e17:  # rotation angle below machine epsilon
                    a[p, q] = a[q, p] = 0.0
                    continue
                t = 1.0 / (abs(beta) + np.sqrt(beta * beta + 1.0))
                if beta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                app, aqq = a[p, p], a[q, q]
                row_p, row_q = a[p].copy(), a[q].copy()
                a[p] = c * row_p - s * row_q
                a[q] = s * row_p + c * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vec_p = v[:, p].copy()
                v[:, p] = c * vec_p - s * v[:, q]
                v[:, q] = s * vec_p + c * v[:, q]
    raise EigensolverNoConvergence(f"Jacobi sweeps exceeded cap ({max_sweeps})")


def spectrum(g: Graph) -> Spectrum:
    """Eigenvalues and biorthonormal eigenvector pairs of L = I - D^-1 A.

    Computed via the symmetric similar matrix S = I - D^-1/2 A D^-1/2:
    if S v = lam v then L (D^-1/2 v) = lam (D^-1/2 v), and the left
    eigenvector is D^1/2 v, so biorthonormality is inherited from the
    orthonormality of the symmetric eigenbasis.
    """
    d_isqrt = 1.0 / np.sqrt(g.degrees.astype(float))
    sym = np.eye(g.n) - d_isqrt[:, None] * g.adjacency * d_isqrt[None, :]
    sym = 0.5 * (sym + sym.T)  # scrub rounding asymmetry
    eigenvalues, vectors = _jacobi_eigh(sym)
    order = np.argsort(eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    vectors = vectors[:, order]
    right = d_isqrt[:, None] * vectors
    left = (vectors / d_isqrt[:, None]).T
    return Spectrum(
        eigenvalues=_freeze(eigenvalues),
        right_eigenvectors=_freeze(right),
        left_eigenvectors=_freeze(left),
    )


def has_simple_zero(s: Spectrum, tol: float = 1e-8) -> bool:
    """Exactly one eigenvalue within tol of zero."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return int(np.sum(np.abs(s.eigenvalues) <= tol)) == 1
