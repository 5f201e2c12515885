"""Graph topology, incidence/Laplacian construction and small linear-algebra
helpers shared by every model."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SYM_TOL = 1e-10


@dataclass(frozen=True)
class NetworkGraph:
    """Undirected weighted graph.

    Edges are stored as ``(i, j, weight)`` with ``i < j``; the lower index is
    the ``+1`` end of the incidence column.
    """

    node_count: int
    edges: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if int(self.node_count) < 1:
            raise ValueError("node_count must be positive")
        seen = set()
        norm = []
        for e in self.edges:
            i, j, w = (int(e[0]), int(e[1]), float(e[2]) if len(e) > 2 else 1.0)
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < self.node_count and 0 <= j < self.node_count):
                raise ValueError(f"edge ({i}, {j}) out of range")
            if w < 0 or not np.isfinite(w):
                raise ValueError(f"edge ({i}, {j}) has invalid weight {w}")
            a, b = min(i, j), max(i, j)
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add((a, b))
            norm.append((a, b, w))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=float)

    @classmethod
    def complete(cls, n: int, weight: float = 1.0) -> "NetworkGraph":
        return cls(n, tuple((i, j, weight) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def from_adjacency(cls, a) -> "NetworkGraph":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("adjacency must be square")
        if not np.allclose(a, a.T, atol=SYM_TOL):
            raise ValueError("adjacency must be symmetric")
        n = a.shape[0]
        return cls(n, tuple((i, j, a[i, j]) for i in range(n) for j in range(i + 1, n) if a[i, j] != 0))

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.node_count, self.node_count))
        for i, j, w in self.edges:
            a[i, j] = a[j, i] = w
        return a


def incidence(graph: NetworkGraph) -> np.ndarray:
    """Node-by-edge incidence matrix, +1 on the lower-index end."""
    e = np.zeros((graph.node_count, graph.edge_count))
    for k, (i, j, _) in enumerate(graph.edges):
        e[i, k] = 1.0
        e[j, k] = -1.0
    return e


def laplacian(graph: NetworkGraph) -> np.ndarray:
    """Weighted Laplacian ``E diag(w) E^T``."""
    e = incidence(graph)
    return e @ np.diag(graph.weights) @ e.T


def kronecker(a, b) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    return np.kron(a, b)


def algebraic_connectivity(lap) -> float:
    """Second-smallest eigenvalue of a symmetric Laplacian.

    Raises
    ------
    ValueError
        If the matrix is not symmetric to within ``SYM_TOL``.
    """
    lap = np.asarray(lap, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise ValueError("Laplacian must be square")
    if not np.allclose(lap, lap.T, atol=SYM_TOL, rtol=0):
        raise ValueError("Laplacian must be symmetric")
    if lap.shape[0] < 2:
        return 0.0
    ev = np.linalg.eigvalsh(lap)
    lam2 = float(ev[1])
    return 0.0 if abs(lam2) < SYM_TOL else lam2
