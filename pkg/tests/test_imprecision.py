import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spreadrank.centrality import CentralityScores, compute_measure, rank_nodes
from spreadrank.epidemic import SpreadEstimate, all_spreads
from spreadrank.graph import degree_histogram
from spreadrank.imprecision import (
    AVERAGE_NETWORK,
    CURVE_HEADER,
    DEFAULT_BETA_MULTIPLES,
    DIFF_NETWORK,
    GridMismatchError,
    ImprecisionCurve,
    average_curves,
    beta_sweep,
    by_multiple,
    curves_to_csv,
    imprecision,
    imprecision_curve,
    pairwise_difference,
    top_set,
    top_set_size,
)
from spreadrank.epidemic import epidemic_threshold

from conftest import from_nx, random_connected

import networkx as nx

SPREADS = np.array([10.0, 8.0, 6.0, 4.0, 2.0])


def est(mean, beta=0.1):
    mean = np.asarray(mean, dtype=float)
    return SpreadEstimate(mean, np.zeros_like(mean), 100, beta, 1)


def sc(values, name="m"):
    return CentralityScores(name, np.asarray(values, dtype=float))


def test_top_set_sizes():
    assert top_set_size(5, 100) == 5
    assert top_set_size(5, 10) == 1
    assert top_set_size(10, 379) == 38
    assert top_set_size(50, 3) == 2  # 1.5 rounds half up
    assert top_set_size(100, 7) == 7
    for bad in (0, -1, 100.5):
        with pytest.raises(ValueError):
            top_set_size(bad, 10)


def test_top_set_members_follow_ranking():
    ts = top_set(rank_nodes(np.array([1.0, 9.0, 5.0, 9.0])), 50, 4)
    assert ts.members == {1, 3}


def test_perfect_measure_is_zero():
    for p in (1, 20, 40, 60, 99, 100):
        assert imprecision(est(SPREADS), sc(SPREADS), p) == 0.0


def test_hand_example():
    # measure ranks the nodes with spreads 10 and 6 highest
    eps = imprecision(est(SPREADS), sc([5, 1, 4, 0, 0]), 40)
    assert eps == pytest.approx(1 - 8 / 9, abs=1e-15)


def test_constant_measure_uses_index_order():
    eps = imprecision(est([2.0, 4.0, 6.0, 8.0, 10.0]), sc([1] * 5), 40)
    assert eps == pytest.approx(1 - 3 / 9)


def test_mismatched_nodes():
    with pytest.raises(ValueError):
        imprecision(est(SPREADS), sc([1, 2, 3]), 40)


def test_reversed_ranking_curve():
    curve = imprecision_curve(est(SPREADS), sc([1, 2, 3, 4, 5]), [20, 40, 60, 80, 100])
    want = [1 - 2 / 10, 1 - 3 / 9, 1 - 4 / 8, 1 - 5 / 7, 0.0]
    np.testing.assert_allclose(curve.epsilons, want, atol=1e-15)
    assert max(curve.epsilons) == curve.epsilons[0]


def test_curve_defaults_and_single_point():
    c = imprecision_curve(est(np.arange(1.0, 21.0)), sc(np.arange(20.0)))
    assert c.xs == tuple(float(p) for p in range(1, 11))
    assert imprecision_curve(est(SPREADS), sc(SPREADS), [5]).points == ((5.0, 0.0),)
    with pytest.raises(ValueError):
        imprecision_curve(est(SPREADS), sc(SPREADS), [])


@settings(max_examples=80, deadline=None)
@given(
    spreads=st.lists(st.floats(1.0, 500.0), min_size=1, max_size=40),
    seed=st.integers(0, 2**32 - 1),
    p=st.floats(0.01, 100.0),
)
def test_bounds_and_monotone_invariance(spreads, seed, p):
    rng = np.random.default_rng(seed)
    scores = rng.integers(0, 5, len(spreads)).astype(float)
    e = imprecision(est(spreads), sc(scores), p)
    assert 0.0 <= e <= 1.0
    for f in (lambda x: 3 * x + 7, np.exp, lambda x: x**3):
        assert imprecision(est(spreads), sc(f(scores)), p) == e
    assert imprecision(est(spreads), sc(scores), 100) == 0.0
    assert imprecision(est(spreads), sc(spreads), p) == 0.0


def _curve(eps, measure="m", network="n", xs=(1, 2, 3)):
    return ImprecisionCurve(measure, network, 5.0, "p",
                            tuple(zip(map(float, xs), eps)), 10, 1)


def test_average_curves():
    a = _curve((0.0, 0.1, 0.2))
    assert average_curves([a, a]).points == a.points
    assert average_curves([a]).points == a.points
    b = _curve((0.2, 0.3, 0.4))
    avg = average_curves([a, b])
    assert avg.network == AVERAGE_NETWORK
    assert avg.epsilons[0] == pytest.approx(0.1)
    with pytest.raises(GridMismatchError):
        average_curves([a, _curve((0, 0), xs=(1, 2))])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=10), st.integers(1, 9))
def test_average_of_copies_is_exact(eps, n):
    c = _curve(tuple(eps), xs=range(len(eps)))
    assert average_curves([c] * n).epsilons == c.epsilons


def test_pairwise_difference():
    a = _curve((0.3, 0.2, 0.0), measure="kshell")
    b = _curve((0.1, 0.2, 0.5), measure="eigenvector")
    d = pairwise_difference(a, b)
    assert d.network == DIFF_NETWORK and d.measure == "kshell-eigenvector"
    np.testing.assert_allclose(d.epsilons, [0.2, 0.0, -0.5])
    assert pairwise_difference(a, a).epsilons == (0.0, 0.0, 0.0)
    back = pairwise_difference(b, a)
    assert back.epsilons == tuple(-x for x in d.epsilons)
    with pytest.raises(GridMismatchError):
        pairwise_difference(a, _curve((0, 0), xs=(1, 2)))


def test_csv_rows():
    text = curves_to_csv([_curve((0.5, 0.25, 0.0))])
    lines = text.splitlines()
    assert lines[0] == CURVE_HEADER
    assert lines[1] == "n,m,5.0,10,1,p,1.0,0.5"


def test_beta_sweep_shapes():
    g = from_nx(nx.barabasi_albert_graph(120, 2, seed=3))
    scores = {m: compute_measure(g, m) for m in ("degree", "kshell", "eigenvector")}
    curves = beta_sweep(g, scores, DEFAULT_BETA_MULTIPLES, p=5, runs=20, master_seed=4)
    assert [c.measure for c in curves] == ["degree", "kshell", "eigenvector"]
    bp = epidemic_threshold(degree_histogram(g)).beta_prime
    for c in curves:
        assert len(c.points) == 10
        assert c.x_kind == "beta_percent"
        np.testing.assert_allclose(c.xs, [100 * m * bp for m in DEFAULT_BETA_MULTIPLES])
        assert all(0 <= e <= 1 for e in c.epsilons)
    assert by_multiple(curves[0]).xs == DEFAULT_BETA_MULTIPLES


def test_beta_sweep_perfect_measure_and_large_multiples():
    g = from_nx(nx.barabasi_albert_graph(80, 2, seed=1))
    bp = epidemic_threshold(degree_histogram(g)).beta_prime
    truth = all_spreads(g, 1.1 * bp, 30, 2)
    [curve] = beta_sweep(g, [CentralityScores("truth", truth.mean)], [1.1], 5, 30, 2)
    assert curve.epsilons == (0.0,)
    curves = beta_sweep(g, [compute_measure(g, "degree")], [5.0, 7.0], 5, 10, 2)
    assert len(curves[0].points) == 2
