"""Centrality measures and deterministic node rankings."""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
import scipy.sparse as sp

from ._parallel import map_chunks
from .graph import Graph, GraphError, connected_components

MEASURES = (
    "degree",
    "kshell",
    "betweenness",
    "closeness",
    "eigenvector",
    "pagerank",
    "nghd2",
    "nghd3",
    "nghd5",
    "nghd10",
)

NEIGHBORHOOD_RADII = {"nghd2": 2, "nghd3": 3, "nghd5": 5, "nghd10": 10}

EIGENVECTOR_TOL = 1e-10
PAGERANK_TOL = 1e-12
MAX_ITER = 10_000

# sources per betweenness work item; fixed so the reduction order never changes
_BETWEENNESS_CHUNK = 64
_BFS_CHUNK = 256


class ConvergenceError(ArithmeticError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True, eq=False)
class CentralityScores:
    measure: str
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class Ranking:
    """Node indices ordered best-first: score descending, index ascending."""

    order: np.ndarray

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order.tolist())


def rank_nodes(scores: CentralityScores | np.ndarray) -> Ranking:
    values = np.asarray(getattr(scores, "values", scores), dtype=np.float64)
    order = np.lexsort((np.arange(len(values)), -values))
    return Ranking(order.astype(np.int64))


def degree_centrality(g: Graph) -> CentralityScores:
    return CentralityScores("degree", g.degrees.astype(np.float64))


@numba.njit(cache=True, nogil=True)
def _core_numbers(indptr, indices):
    # Batagelj-Zaversnik bucket peeling
    n = len(indptr) - 1
    deg = np.empty(n, np.int64)
    md = 0
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] > md:
            md = deg[v]
    bin_start = np.zeros(md + 2, np.int64)
    for v in range(n):
        bin_start[deg[v] + 1] += 1
    for d in range(1, md + 2):
        bin_start[d] += bin_start[d - 1]
    pos = np.empty(n, np.int64)
    vert = np.empty(n, np.int64)
    fill = bin_start.copy()
    for v in range(n):
        pos[v] = fill[deg[v]]
        vert[pos[v]] = v
        fill[deg[v]] += 1
    for i in range(n):
        v = vert[i]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bin_start[du] += 1
                deg[u] -= 1
    return deg


def shell_decomposition(g: Graph) -> CentralityScores:
    """Shell number of every node by iterative peeling.

    Stage ``S`` removes nodes whose remaining degree is at most ``S`` until none
    are left at that stage.  Isolated nodes land in shell 0.
    """
    shells = _core_numbers(g.indptr, g.indices)
    return CentralityScores("kshell", shells.astype(np.float64))


@numba.njit(cache=True, nogil=True)
def _brandes_chunk(indptr, indices, lo, hi):
    n = len(indptr) - 1
    total = np.zeros(n)
    dist = np.full(n, -1, np.int64)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    stack = np.empty(n, np.int64)
    for s in range(lo, hi):
        dist[s] = 0
        sigma[s] = 1.0
        stack[0] = s
        head = 0
        tail = 1
        # the stack doubles as the BFS queue
        while head < tail:
            v = stack[head]
            head += 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    stack[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for i in range(tail - 1, -1, -1):
            w = stack[i]
            coeff = (1.0 + delta[w]) / sigma[w]
            for e in range(indptr[w], indptr[w + 1]):
                v = indices[e]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] * coeff
            if w != s:
                total[w] += delta[w]
        for i in range(tail):
            w = stack[i]
            dist[w] = -1
            sigma[w] = 0.0
            delta[w] = 0.0
    return total


def betweenness_centrality(g: Graph, workers: int = 1) -> CentralityScores:
    """Sum over unordered pairs {s, t} of the fraction of shortest s-t paths through v.

    Unnormalised.  Sources are processed in fixed chunks whose partial sums are
    added in source order, so the result does not depend on ``workers``.
    """
    n = g.node_count
    parts = map_chunks(
        lambda lo, hi: _brandes_chunk(g.indptr, g.indices, lo, hi),
        n, _BETWEENNESS_CHUNK, workers,
    )
    total = np.zeros(n)
    for part in parts:
        total += part
    return CentralityScores("betweenness", total / 2.0)


@numba.njit(cache=True, nogil=True)
def _bfs_ball_sizes(indptr, indices, lo, hi, radius):
    """For nodes lo..hi-1: (#nodes within ``radius``, sum of their distances).

    A negative radius means unbounded.
    """
    n = len(indptr) - 1
    count = np.zeros(hi - lo, np.int64)
    dsum = np.zeros(hi - lo, np.int64)
    dist = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    for s in range(lo, hi):
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        total = 0
        while head < tail:
            v = queue[head]
            head += 1
            total += dist[v]
            if radius >= 0 and dist[v] >= radius:
                continue
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
        count[s - lo] = tail
        dsum[s - lo] = total
        for i in range(tail):
            dist[queue[i]] = -1
    return count, dsum


def _balls(g: Graph, radius: int, workers: int):
    parts = map_chunks(
        lambda lo, hi: _bfs_ball_sizes(g.indptr, g.indices, lo, hi, radius),
        g.node_count, _BFS_CHUNK, workers,
    )
    if not parts:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return (np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]))


def closeness_centrality(g: Graph, workers: int = 1) -> CentralityScores:
    n = g.node_count
    count, dsum = _balls(g, -1, workers)
    if n > 1 and (count < n).any():
        raise GraphError("closeness is undefined on a disconnected graph")
    values = np.zeros(n) if n == 1 else (n - 1) / dsum.astype(np.float64)
    return CentralityScores("closeness", values)


def q_neighborhood(g: Graph, q: int, workers: int = 1) -> CentralityScores:
    """Number of nodes within distance ``q`` of each node, the node included."""
    if q < 0:
        raise ValueError("q must be non-negative")
    count, _ = _balls(g, q, workers)
    return CentralityScores(f"nghd{q}", count.astype(np.float64))


def adjacency_matrix(g: Graph) -> sp.csr_matrix:
    n = g.node_count
    data = np.ones(len(g.indices))
    return sp.csr_matrix((data, g.indices, g.indptr), shape=(n, n))


def eigenvector_centrality(
    g: Graph, tol: float = EIGENVECTOR_TOL, max_iter: int = MAX_ITER
) -> CentralityScores:
    """Principal eigenvector of the adjacency matrix, unit Euclidean norm.

    Power iteration on ``A + I`` from the all-ones vector.  The shift leaves the
    eigenvectors unchanged but stops the oscillation that plain ``A`` shows on
    bipartite graphs, where ``-lambda`` is also an eigenvalue.
    """
    n = g.node_count
    a = adjacency_matrix(g)
    x = np.full(n, 1.0 / np.sqrt(n))
    diff = np.inf
    for _ in range(max_iter):
        y = a @ x + x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            raise ConvergenceError("eigenvector iteration collapsed to zero", diff)
        y /= norm
        diff = float(np.max(np.abs(y - x)))
        x = y
        if diff < tol:
            return CentralityScores("eigenvector", x)
    raise ConvergenceError(
        f"eigenvector centrality did not converge in {max_iter} iterations", diff
    )


def rayleigh_quotient(g: Graph, x: np.ndarray) -> float:
    return float(x @ (adjacency_matrix(g) @ x) / (x @ x))


def pagerank(
    g: Graph,
    damping: float = 0.85,
    variant: str = "damped",
    tol: float = PAGERANK_TOL,
    max_iter: int = MAX_ITER,
) -> CentralityScores:
    """PageRank on the undirected graph, scores summing to 1.

    ``pure`` iterates ``R_v <- sum R_u / d_u`` over neighbours with no teleport;
    ``damped`` mixes in a uniform jump with probability ``1 - damping``.
    """
    if variant not in ("pure", "damped"):
        raise ValueError(f"unknown pagerank variant {variant!r}")
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must lie in (0, 1]")
    n = g.node_count
    deg = g.degrees.astype(np.float64)
    if (deg == 0).any():
        raise GraphError("pagerank needs every node to have degree >= 1")
    a = adjacency_matrix(g)
    d = damping if variant == "damped" else 1.0
    r = np.full(n, 1.0 / n)
    diff = np.inf
    for _ in range(max_iter):
        nxt = d * (a @ (r / deg)) + (1.0 - d) / n
        nxt /= nxt.sum()
        diff = float(np.max(np.abs(nxt - r)))
        r = nxt
        if diff < tol:
            return CentralityScores("pagerank", r)
    hint = " (pure variant oscillates on bipartite graphs; use variant='damped')"
    raise ConvergenceError(
        f"pagerank did not converge in {max_iter} iterations"
        + (hint if variant == "pure" else ""),
        diff,
    )


def compute_measure(
    g: Graph,
    measure: str,
    *,
    pagerank_variant: str = "damped",
    damping: float = 0.85,
    workers: int = 1,
) -> CentralityScores:
    if measure == "degree":
        return degree_centrality(g)
    if measure == "kshell":
        return shell_decomposition(g)
    if measure == "betweenness":
        return betweenness_centrality(g, workers)
    if measure == "closeness":
        return closeness_centrality(g, workers)
    if measure == "eigenvector":
        return eigenvector_centrality(g)
    if measure == "pagerank":
        return pagerank(g, damping, pagerank_variant)
    if measure in NEIGHBORHOOD_RADII:
        scores = q_neighborhood(g, NEIGHBORHOOD_RADII[measure], workers)
        return CentralityScores(measure, scores.values)
    raise ValueError(
        f"unknown measure {measure!r}; valid measures: {', '.join(MEASURES)}"
    )


def is_connected(g: Graph) -> bool:
    return len(connected_components(g)) == 1
