"""Undirected simple graphs, edge-list ingestion and network summary statistics."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for malformed input or graphs unsuitable for an operation."""


class ParseError(GraphError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph in compressed sparse row form.

    ``indices[indptr[i]:indptr[i + 1]]`` are the sorted neighbours of node ``i``.
    ``labels[i]`` is the original label of dense index ``i``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self):
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        labels: Sequence[str] | None = None,
    ) -> "Graph":
        """Build a graph on nodes ``0..n-1``; loops dropped, duplicates merged."""
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise GraphError(f"expected {n} labels, got {len(labels)}")
        pairs = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) outside node range 0..{n - 1}")
            if u != v:
                pairs.add((u, v) if u < v else (v, u))
        if pairs:
            arr = np.array(sorted(pairs), dtype=np.int64)
            src = np.concatenate([arr[:, 0], arr[:, 1]])
            dst = np.concatenate([arr[:, 1], arr[:, 0]])
        else:
            src = dst = np.empty(0, dtype=np.int64)
        order = np.lexsort((dst, src))
        indices = dst[order].astype(np.int64)
        counts = np.bincount(src, minlength=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(indptr, indices, tuple(str(x) for x in labels))

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i).tolist() for i in range(self.node_count)]

    def edges(self) -> list[tuple[int, int]]:
        """Each undirected edge once, as ``(u, v)`` with ``u < v``, sorted."""
        src = np.repeat(np.arange(self.node_count), self.degrees)
        keep = src < self.indices
        return list(zip(src[keep].tolist(), self.indices[keep].tolist()))

    def subgraph(self, nodes: Sequence[int]) -> "Graph":
        """Induced subgraph, re-indexed in the order of ``nodes``."""
        remap = {int(v): i for i, v in enumerate(nodes)}
        edges = [
            (remap[u], remap[v])
            for u, v in self.edges()
            if u in remap and v in remap
        ]
        return Graph.from_edges(len(remap), edges, [self.labels[v] for v in nodes])

    def to_edge_list(self) -> str:
        lines = [f"{self.labels[u]} {self.labels[v]}" for u, v in self.edges()]
        return "\n".join(lines) + ("\n" if lines else "")


_SPLIT = re.compile(r"[ \t]+")


def parse_edge_list(text: str) -> Graph:
    """Parse whitespace-separated label pairs, one edge per line.

    Lines starting with ``#`` and blank lines are skipped.  Labels receive dense
    indices in order of first appearance.
    """
    index: dict[str, int] = {}
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = _SPLIT.split(line)
        if len(tokens) != 2:
            raise ParseError(f"expected 2 node labels, found {len(tokens)}", lineno)
        a, b = (index.setdefault(t, len(index)) for t in tokens)
        edges.append((a, b))
    if not index:
        raise ParseError("edge list is empty")
    return Graph.from_edges(len(index), edges, list(index))


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted index lists, ordered by their smallest index."""
    seen = np.zeros(g.node_count, dtype=bool)
    components = []
    for start in range(g.node_count):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    comp.append(int(v))
                    queue.append(v)
        components.append(sorted(comp))
    return components


def greatest_connected_component(g: Graph) -> Graph:
    if g.node_count == 0:
        raise GraphError("graph has no nodes")
    components = connected_components(g)
    # max() keeps the first maximal entry, i.e. the one with the smallest index
    best = max(components, key=len)
    if len(best) == g.node_count:
        return g
    return g.subgraph(best)


@dataclass(frozen=True)
class DegreeHistogram:
    counts: dict[int, int]
    mean: float
    second_moment: float

    @property
    def node_count(self) -> int:
        return sum(self.counts.values())

    def probabilities(self) -> dict[int, float]:
        n = self.node_count
        return {k: c / n for k, c in self.counts.items()}


def degree_histogram(g: Graph) -> DegreeHistogram:
    n = g.node_count
    counts: dict[int, int] = {}
    s1 = s2 = 0
    for k in g.degrees.tolist():
        counts[k] = counts.get(k, 0) + 1
        s1 += k
        s2 += k * k
    return DegreeHistogram(dict(sorted(counts.items())), s1 / n, s2 / n)


def power_law_fit(h: DegreeHistogram) -> tuple[float, float]:
    """Least-squares fit of ``log P(k)`` on ``log k``; returns (exponent, R^2).

    Degree zero and empty degrees are excluded.  The exponent is the negated
    slope; R^2 is the squared correlation, taken as 1 when ``log P(k)`` is
    constant (the zero-slope line then fits exactly).
    """
    n = h.node_count
    pts = [(k, c) for k, c in h.counts.items() if k >= 1 and c > 0]
    if len(pts) < 2:
        raise GraphError("power-law fit needs at least 2 distinct nonzero degrees")
    x = np.log([k for k, _ in pts])
    y = np.log([c / n for _, c in pts])
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    sxy = float(dx @ dy)
    syy = float(dy @ dy)
    slope = sxy / sxx
    if syy <= 1e-300:
        r_squared = 1.0
    else:
        r_squared = min(1.0, sxy * sxy / (sxx * syy))
    return -slope + 0.0, r_squared


@dataclass(frozen=True)
class NetworkStats:
    nodes: int
    edges: int
    density: float
    beta_prime: float
    lambda_: float
    r_squared: float
    mean_degree: float
    second_moment: float
    max_shell: int

    CSV_HEADER = (
        "name,nodes,edges,density,beta_prime,lambda,r_squared,"
        "mean_degree,second_moment,max_shell"
    )

    def csv_row(self, name: str) -> str:
        fields = [
            name, self.nodes, self.edges, self.density, self.beta_prime,
            self.lambda_, self.r_squared, self.mean_degree, self.second_moment,
            self.max_shell,
        ]
        return ",".join(repr(f) if isinstance(f, float) else str(f) for f in fields)

    def to_csv(self, name: str) -> str:
        return f"{self.CSV_HEADER}\n{self.csv_row(name)}\n"


def summary_stats(g: Graph) -> NetworkStats:
    """One row of network statistics; ``beta_prime`` is in percent."""
    from .centrality import shell_decomposition
    from .epidemic import epidemic_threshold

    if g.edge_count == 0:
        raise GraphError("summary statistics are undefined for a graph without edges")
    n, m = g.node_count, g.edge_count
    hist = degree_histogram(g)
    try:
        lam, r2 = power_law_fit(hist)
    except GraphError:
        # regular graphs have a single degree: no slope to fit
        lam = r2 = float("nan")
    threshold = epidemic_threshold(hist)
    shells = shell_decomposition(g)
    return NetworkStats(
        nodes=n,
        edges=m,
        density=2.0 * m / (n * (n - 1)),
        beta_prime=threshold.beta_prime_percent,
        lambda_=lam,
        r_squared=r2,
        mean_degree=hist.mean,
        second_moment=hist.second_moment,
        max_shell=int(shells.values.max()),
    )
