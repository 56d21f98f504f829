import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latentgfl.graph import NodeSeries, graph_from_edges, standardize_seasonal, standardize_zscore


def test_dedup_and_symmetry():
    g = graph_from_edges(3, [(0, 1), (1, 0), (1, 2)])
    assert g.edge_list() == [(0, 1), (1, 2)]
    assert list(g.neighbors(1)) == [0, 2]


def test_empty_graph():
    g = graph_from_edges(2, [])
    assert g.n_edges == 0
    assert all(len(g.neighbors(i)) == 0 for i in range(2))


@pytest.mark.parametrize("n, edges", [(4, [(0, 0)]), (3, [(0, 3)]), (3, [(-1, 1)]), (0, [])])
def test_rejects_bad_input(n, edges):
    with pytest.raises(ValueError):
        graph_from_edges(n, edges)


edge_lists = st.integers(2, 12).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda p: p[0] != p[1]),
        max_size=40)))


@given(edge_lists)
def test_graph_invariants(case):
    n, edges = case
    g = graph_from_edges(n, edges)
    assert graph_from_edges(n, g.edge_list()) == g
    assert g.degrees().sum() == 2 * g.n_edges
    pairs = {(min(i, j), max(i, j)) for i, j in edges}
    assert set(g.edge_list()) == pairs
    for i in range(n):
        for j in g.neighbors(i):
            assert (min(i, j), max(i, j)) in pairs
    assert all(0 <= v < n for e in g.edge_list() for v in e)


def test_incidence_signs():
    g = graph_from_edges(3, [(0, 1), (1, 2)])
    inc = g.incidence()
    assert inc[0] == [(0, 1)]
    assert inc[1] == [(0, -1), (1, 1)]


def test_series_validation():
    with pytest.raises(ValueError):
        NodeSeries(np.array([[1.0, np.nan]]))
    g = graph_from_edges(3, [])
    with pytest.raises(ValueError):
        NodeSeries(np.zeros((2, 4))).check_graph(g)


def test_seasonal_hand_example():
    out = standardize_seasonal([1, 10, 3, 20], period=2, n_periods=2)
    expected = [(1 - 2) / np.sqrt(2), (10 - 15) / np.sqrt(50), (3 - 2) / np.sqrt(2), (20 - 15) / np.sqrt(50)]
    np.testing.assert_allclose(out, expected, rtol=0, atol=1e-15)


def test_seasonal_zero_variance_names_season():
    with pytest.raises(ValueError, match="season 1"):
        standardize_seasonal([1, 5, 2, 5, 3, 5], period=2, n_periods=3)


@settings(max_examples=50)
@given(st.integers(2, 6), st.integers(2, 6), st.integers(0, 10_000))
def test_seasonal_properties(period, n_periods, seed):
    y = np.random.default_rng(seed).normal(size=period * n_periods) * 5 + 3
    out = standardize_seasonal(y, period, n_periods)
    grid = out.reshape(n_periods, period)
    np.testing.assert_allclose(grid.mean(axis=0), 0, atol=1e-12)
    np.testing.assert_allclose(grid.std(axis=0, ddof=1), 1, atol=1e-12)
    np.testing.assert_allclose(standardize_seasonal(out, period, n_periods), out, atol=1e-10)


def test_zscore_examples():
    np.testing.assert_allclose(standardize_zscore([0, 2]), [-1 / np.sqrt(2), 1 / np.sqrt(2)], atol=1e-15)
    with pytest.raises(ValueError):
        standardize_zscore([5, 5, 5])


@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=50))
def test_zscore_centering(values):
    y = np.array(values)
    if y.std(ddof=1) < 1e-6:
        return
    out = standardize_zscore(y)
    assert abs(out.mean()) < 1e-12
    assert abs(out.std(ddof=1) - 1) < 1e-10
