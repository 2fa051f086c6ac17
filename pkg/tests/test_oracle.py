import itertools
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spreadrank.graph import Graph
from spreadrank.oracle import (
    EnumerationLimitError,
    MAX_EDGES,
    cluster_tallies,
    exact_all_spreads,
    exact_influence_spread,
    exact_value_fraction,
)

from conftest import complete, path, random_connected, star, to_nx


def naive_expected_cluster(g: Graph, node: int, beta: Fraction) -> Fraction:
    """Independent enumeration with networkx components and exact weights."""
    edges = g.edges()
    total = Fraction(0)
    for live in itertools.product((0, 1), repeat=len(edges)):
        h = nx.Graph()
        h.add_nodes_from(range(g.node_count))
        h.add_edges_from(e for e, on in zip(edges, live) if on)
        k = sum(live)
        weight = beta**k * (1 - beta) ** (len(edges) - k)
        total += weight * len(nx.node_connected_component(h, node))
    return total


def test_path_and_triangle():
    assert exact_influence_spread(path(3), 0, 0.5).value == 1.75
    assert [s.value for s in exact_all_spreads(complete(3), 0.5)] == [2.25] * 3


def test_star_closed_forms():
    for beta in (0.1, 0.3, 0.77):
        vals = [s.value for s in exact_all_spreads(star(4), beta)]
        assert vals[0] == pytest.approx(1 + 4 * beta, abs=1e-12)
        for v in vals[1:]:
            assert v == pytest.approx(1 + beta + 3 * beta**2, abs=1e-12)


def test_edgeless_graph():
    g = Graph.from_edges(3, [])
    assert [s.value for s in exact_all_spreads(g, 0.4)] == [1.0] * 3


def test_beta_extremes():
    g = Graph.from_edges(5, [(0, 1), (1, 2), (3, 4)])
    assert [s.value for s in exact_all_spreads(g, 1.0)] == [3, 3, 3, 2, 2]
    assert [s.value for s in exact_all_spreads(g, 0.0)] == [1] * 5


def test_edge_bound():
    g = path(MAX_EDGES + 2)
    with pytest.raises(EnumerationLimitError, match="2\\^24"):
        exact_all_spreads(g, 0.5)


@pytest.mark.parametrize("seed", range(6))
def test_matches_independent_enumeration(seed):
    rng = np.random.default_rng(seed)
    g = random_connected(rng, int(rng.integers(2, 7)), max_edges=9)
    beta = Fraction(int(rng.integers(1, 10)), 10)
    for node in range(g.node_count):
        want = naive_expected_cluster(g, node, beta)
        assert exact_value_fraction(g, node, beta) == want
        assert exact_influence_spread(g, node, float(beta)).value == pytest.approx(
            float(want), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), beta=st.floats(0.0, 1.0))
def test_polynomial_structure_and_weights(seed, beta):
    g = random_connected(np.random.default_rng(seed), 6, max_edges=10)
    t = cluster_tallies(g)
    m = g.edge_count
    assert (t >= 0).all()
    # summing weights only: every pattern contributes its cluster size >= 1,
    # and with size replaced by 1 the weights sum to one
    from math import comb, fsum
    assert fsum(comb(m, j) * beta**j * (1 - beta) ** (m - j) for j in range(m + 1)) \
        == pytest.approx(1.0, abs=1e-12)
    vals = [s.value for s in exact_all_spreads(g, beta)]
    assert all(1 - 1e-12 <= v <= g.node_count + 1e-12 for v in vals)


def test_automorphic_nodes_agree():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
    vals = [s.value for s in exact_all_spreads(g, 0.35)]
    assert vals[1] == pytest.approx(vals[2]) == pytest.approx(vals[4]) \
        == pytest.approx(vals[5])
    assert vals[0] == pytest.approx(vals[3])
