"""The 4-regular dual multigraph: one vertex per tetrahedron, one edge per glued pair."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from ._kernels import bitparallel_diameter_kernel, diameter_kernel
from .errors import DisconnectedGraph, NoConvergence
from .model import GluingInstance

DENSE_LIMIT = 2000
DEFAULT_TOL = 1e-8
DEFAULT_MAXITER = 100_000


class MultiGraph:
    """Regular multigraph on ``range(n)`` with loops allowed.

    ``edges`` is an ``(m, 2)`` array with ``i <= j`` per row.  A loop adds 2
    to the degree of its vertex and 2 to the diagonal of the adjacency matrix.
    """

    def __init__(self, n: int, edges, degree: int):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        edges = np.sort(edges, axis=1)
        deg = np.bincount(edges.ravel(), minlength=n)
        if deg.shape[0] != n or np.any(deg != degree):
            raise ValueError(f"graph is not {degree}-regular")
        self.n = int(n)
        self.edges = edges
        self.degree = int(degree)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> csr_matrix:
        i, j = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([i, j])
        cols = np.concatenate([j, i])
        return coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n)).tocsr()

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        adj = self.adjacency()
        return adj.indptr.astype(np.int64), adj.indices.astype(np.int64)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, edges={self.num_edges})"


class MultiGraph4(MultiGraph):
    def __init__(self, n: int, edges):
        super().__init__(n, edges, 4)


def build_dual(instance: GluingInstance) -> MultiGraph4:
    firsts = instance.first_faces()
    a = firsts // 4
    b = instance.partner[firsts] // 4
    return MultiGraph4(instance.n, np.stack([a, b], axis=1))


def is_simple(g: MultiGraph) -> bool:
    """No loops and no repeated edges."""
    i, j = g.edges[:, 0], g.edges[:, 1]
    if np.any(i == j):
        return False
    codes = i * g.n + j
    return np.unique(codes).size == codes.size


def is_connected(g: MultiGraph) -> bool:
    if g.n == 1:
        return True
    ncomp, _ = connected_components(g.adjacency(), directed=False)
    return ncomp == 1


def diameter(g: MultiGraph, method: str = "bitparallel") -> float | int:
    """Exact graph diameter; ``math.inf`` if disconnected.

    ``bitparallel`` runs 64 breadth-first searches per sweep on bitsets;
    ``bfs`` is the plain one-source-at-a-time version.
    """
    indptr, indices = g.csr()
    if method == "bitparallel":
        d = int(bitparallel_diameter_kernel(indptr, indices))
    elif method == "bfs":
        d = int(diameter_kernel(indptr, indices))
    else:
        raise ValueError(f"unknown method {method!r}")
    return math.inf if d < 0 else d


@dataclass(frozen=True)
class SpectralReport:
    lambda1: float
    tol: float
    iterations: int
    method: str


def spectral_gap(
    g: MultiGraph,
    tol: float = DEFAULT_TOL,
    *,
    maxiter: int = DEFAULT_MAXITER,
    dense_limit: int = DENSE_LIMIT,
    seed: int = 0,
) -> SpectralReport:
    """Smallest nonzero eigenvalue of ``I - A / degree``.

    Equals ``1 - mu2 / degree`` with ``mu2`` the second-largest adjacency
    eigenvalue.  Dense solve up to ``dense_limit`` vertices, otherwise
    Lanczos (ARPACK) on the adjacency operator with a seeded start vector.
    """
    if g.n < 2:
        raise ValueError("spectral gap needs at least two vertices")
    if not is_connected(g):
        raise DisconnectedGraph("spectral gap of a disconnected graph is zero")
    adj = g.adjacency()
    if g.n <= dense_limit:
        mu = np.linalg.eigvalsh(adj.toarray())
        return SpectralReport(float(1.0 - mu[-2] / g.degree), tol, 0, "dense")

    matvecs = 0

    def matvec(x):
        nonlocal matvecs
        matvecs += 1
        return adj @ x

    op = LinearOperator(adj.shape, matvec=matvec, dtype=np.float64)
    v0 = np.random.default_rng(seed).standard_normal(g.n)
    try:
        mu = eigsh(op, k=2, which="LA", tol=tol, maxiter=maxiter, v0=v0, return_eigenvectors=False)
    except ArpackNoConvergence as exc:
        raise NoConvergence(f"Lanczos did not converge after {matvecs} matvecs") from exc
    mu = np.sort(mu)
    return SpectralReport(float(1.0 - mu[0] / g.degree), tol, matvecs, "lanczos")


def double_graph(g: MultiGraph) -> MultiGraph:
    """Two copies of ``g`` plus four parallel edges between each vertex and its copy."""
    n = g.n
    cross = np.repeat(np.stack([np.arange(n), np.arange(n) + n], axis=1), 4, axis=0)
    edges = np.concatenate([g.edges, g.edges + n, cross])
    return MultiGraph(2 * n, edges, g.degree + 4)
