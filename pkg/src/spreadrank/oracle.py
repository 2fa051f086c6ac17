"""Exact single-seed influence spread by enumerating bond-percolation states.

With a constant infection probability the final SIR outbreak from a seed has
the law of the seed's cluster when each edge is independently open with that
probability.  Enumerating all ``2**m`` open/closed patterns gives the exact
expectation.  Cluster sizes are tallied as integers per number of open edges,
so the result is the polynomial ``sum_j c_j * beta**j * (1 - beta)**(m - j)``
with non-negative integer ``c_j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numba
import numpy as np

from .graph import Graph

MAX_EDGES = 24


class EnumerationLimitError(ValueError):
    pass


@dataclass(frozen=True)
class ExactSpread:
    node: int
    beta: float
    value: float


@numba.njit(cache=True, nogil=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@numba.njit(cache=True, nogil=True)
def _cluster_tallies(n, eu, ev):
    m = len(eu)
    tallies = np.zeros((n, m + 1), np.int64)
    parent = np.empty(n, np.int64)
    size = np.empty(n, np.int64)
    for mask in range(1 << m):
        for i in range(n):
            parent[i] = i
            size[i] = 1
        live = 0
        for j in range(m):
            if (mask >> j) & 1:
                live += 1
                a = _find(parent, eu[j])
                b = _find(parent, ev[j])
                if a != b:
                    if size[a] < size[b]:
                        a, b = b, a
                    parent[b] = a
                    size[a] += size[b]
        for i in range(n):
            tallies[i, live] += size[_find(parent, i)]
    return tallies


def cluster_tallies(g: Graph) -> np.ndarray:
    """``t[i, j]``: total size of node ``i``'s cluster over patterns with ``j`` open edges."""
    m = g.edge_count
    if m > MAX_EDGES:
        raise EnumerationLimitError(
            f"exact enumeration supports at most {MAX_EDGES} edges (2^{MAX_EDGES} "
            f"percolation states); graph has {m}"
        )
    edges = np.array(g.edges(), dtype=np.int64).reshape(-1, 2)
    return _cluster_tallies(g.node_count, edges[:, 0].copy(), edges[:, 1].copy())


def _evaluate(row: np.ndarray, beta: float) -> float:
    m = len(row) - 1
    if beta == 0.0:
        return float(row[0])
    if beta == 1.0:
        return float(row[m])
    q = 1.0 - beta
    return math.fsum(int(c) * beta**j * q ** (m - j) for j, c in enumerate(row))


def exact_value_fraction(g: Graph, node: int, beta: Fraction) -> Fraction:
    """Exact rational spread for a rational ``beta``."""
    row = cluster_tallies(g)[node]
    m = len(row) - 1
    return sum(
        (int(c) * beta**j * (1 - beta) ** (m - j) for j, c in enumerate(row)),
        Fraction(0),
    )


def exact_all_spreads(g: Graph, beta: float) -> list[ExactSpread]:
    beta = float(beta)
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"infection probability must lie in [0, 1], got {beta}")
    tallies = cluster_tallies(g)
    return [ExactSpread(i, beta, _evaluate(tallies[i], beta))
            for i in range(g.node_count)]


def exact_influence_spread(g: Graph, node: int, beta: float) -> ExactSpread:
    if not 0 <= node < g.node_count:
        raise IndexError(f"node {node} outside 0..{g.node_count - 1}")
    return exact_all_spreads(g, beta)[node]


def exact_to_csv(g: Graph, spreads: list[ExactSpread]) -> str:
    lines = ["node_label,mean_spread,std_error,runs,beta_percent"]
    for s in spreads:
        lines.append(f"{g.labels[s.node]},{s.value!r},0.0,0,{100.0 * s.beta!r}")
    return "\n".join(lines) + "\n"
