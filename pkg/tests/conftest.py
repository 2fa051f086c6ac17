from __future__ import annotations

import networkx as nx
import numpy as np
import pytest

from spreadrank.graph import Graph


def from_nx(h: nx.Graph) -> Graph:
    nodes = list(h.nodes())
    index = {v: i for i, v in enumerate(nodes)}
    return Graph.from_edges(
        len(nodes), [(index[u], index[v]) for u, v in h.edges()], [str(v) for v in nodes]
    )


def to_nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.node_count))
    h.add_edges_from(g.edges())
    return h


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_connected(rng: np.random.Generator, n: int, max_edges: int | None = None,
                     extra_p: float = 0.3) -> Graph:
    """Random spanning tree plus random extra edges, capped at ``max_edges``."""
    edges = set()
    order = rng.permutation(n)
    for i in range(1, n):
        u, v = int(order[i]), int(order[rng.integers(0, i)])
        edges.add((min(u, v), max(u, v)))
    cap = max_edges if max_edges is not None else n * (n - 1) // 2
    for u in range(n):
        for v in range(u + 1, n):
            if len(edges) >= cap:
                break
            if (u, v) not in edges and rng.random() < extra_p:
                edges.add((u, v))
    return Graph.from_edges(n, sorted(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(20121)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
