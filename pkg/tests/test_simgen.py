import numpy as np
import pytest

from latentgfl.simgen import (ScenarioSpec, equicorrelated_noise, gen_ar_series, gen_block_graph, gen_grid_graph,
                              gen_var_series, grid_labels, run_scenario)


def within_frequency(graph, labels):
    same = labels[graph.edges[:, 0]] == labels[graph.edges[:, 1]]
    sizes = np.bincount(labels)
    return same.sum(), int(np.sum(sizes * (sizes - 1) // 2))


def test_block_graph_limits():
    g, labels = gen_block_graph((3, 4), 1.0, 1.0, 0)
    assert g.n_edges == 7 * 6 // 2
    np.testing.assert_array_equal(labels, [0, 0, 0, 1, 1, 1, 1])
    g, _ = gen_block_graph((3, 4), 0.0, 0.0, 0)
    assert g.n_edges == 0
    g, labels = gen_block_graph((3, 4), 1.0, 0.0, 0)
    assert g.n_edges == 3 + 6 and np.all(labels[g.edges[:, 0]] == labels[g.edges[:, 1]])


def test_block_graph_within_frequency():
    hits = pairs = 0
    for seed in range(200):
        g, labels = gen_block_graph((30, 40, 50), 0.30, 0.15, seed)
        h, p = within_frequency(g, labels)
        hits, pairs = hits + h, pairs + p
    assert abs(hits / pairs - 0.30) <= 0.02


def test_block_graph_validation():
    with pytest.raises(ValueError):
        gen_block_graph((3, 3), 1.2, 0.1, 0)


def test_grid_smallest():
    g, labels = gen_grid_graph(2, 2, 1, 1)
    assert g.n_nodes == 4 and g.n_edges == 4
    np.testing.assert_array_equal(labels, [0, 1, 2, 3])


@pytest.mark.parametrize("rows,cols", [(2, 3), (12, 12), (14, 14), (5, 9)])
def test_grid_edge_count(rows, cols):
    g, _ = gen_grid_graph(rows, cols, 1, 1)
    assert g.n_edges == rows * (cols - 1) + cols * (rows - 1)
    assert g.degrees().max() <= 4


def test_grid_rectangular_quadrants():
    _, labels = gen_grid_graph(12, 12, 5, 5)
    np.testing.assert_array_equal(np.bincount(labels), [25, 35, 35, 49])
    lab = labels.reshape(12, 12)
    assert np.all(lab[:5, :5] == 0) and np.all(lab[:5, 5:] == 1)
    assert np.all(lab[5:, :5] == 2) and np.all(lab[5:, 5:] == 3)


@pytest.mark.parametrize("grid,sizes", [((12, 12), (25, 30, 42, 47)), ((14, 14), (35, 40, 42, 79))])
def test_grid_unbalanced_sizes(grid, sizes):
    g, labels = gen_grid_graph(*grid, sizes=sizes)
    np.testing.assert_array_equal(np.bincount(labels), sizes)
    lab = labels.reshape(grid)
    assert lab[0, 0] == 0 and lab[0, -1] == 1 and lab[-1, 0] == 2 and lab[-1, -1] == 3
    # every region is connected in the lattice
    for c in range(4):
        members = set(np.flatnonzero(labels == c))
        seen, stack = set(), [min(members)]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(u for u in g.neighbors(v) if u in members)
        assert seen == members


def test_grid_validation():
    with pytest.raises(ValueError):
        gen_grid_graph(4, 4, 0, 2)
    with pytest.raises(ValueError):
        grid_labels(4, 4, (4, 4, 4, 5))


def test_ar_white_noise():
    Y = gen_ar_series([0], [5.0], [0.0], [1.0], 10_000, 0).values[0]
    assert abs(Y.mean() - 5.0) < 4 / 100
    assert Y.var(ddof=1) == pytest.approx(1.0, rel=0.05)


def test_ar_stationary_start():
    first = np.array([gen_ar_series([0], [0.0], [0.5], [1.0], 2, seed).values[0, 0] for seed in range(10_000)])
    assert first.var(ddof=1) == pytest.approx(4 / 3, rel=0.05)


def test_ar_autocorrelation_and_no_drift():
    Y = gen_ar_series(np.zeros(20, int), [1.0], [0.5], [1.0], 5000, 1).values
    x = Y - Y.mean(axis=1, keepdims=True)
    acf = np.sum(x[:, 1:] * x[:, :-1]) / np.sum(x * x)
    assert abs(acf - 0.5) <= 0.03
    last = gen_ar_series(np.zeros(20_000, int), [1.0], [0.5], [1.0], 100, 2).values[:, -1]
    assert abs(last.mean() - 1.0) < 4 * np.sqrt(4 / 3 / 20_000)
    assert last.var(ddof=1) == pytest.approx(4 / 3, rel=0.05)


def test_ar_validation():
    with pytest.raises(ValueError):
        gen_ar_series([0], [0.0], [1.0], [1.0], 10, 0)
    with pytest.raises(ValueError):
        gen_ar_series([0], [0.0], [0.5], [0.0], 10, 0)


def test_var_rho_zero_is_ar():
    labels = np.array([0, 0, 1, 1, 1])
    Y = gen_var_series(labels, [0.0, 0.0], 0.5, 0.0, 20_000, 100, 3).values
    x = Y - Y.mean(axis=1, keepdims=True)
    acf = np.sum(x[:, 1:] * x[:, :-1], axis=1) / np.sum(x * x, axis=1)
    assert np.all(np.abs(acf - 0.5) < 0.03)
    C = np.corrcoef(Y)
    assert np.max(np.abs(C - np.eye(5))) < 0.05


def test_var_innovation_correlation():
    labels = np.array([0, 0, 0, 1, 1])
    xi = equicorrelated_noise(labels, 0.3, 100_000, np.random.default_rng(0))
    cov = np.cov(xi, rowvar=False)
    same = labels[:, None] == labels[None, :]
    sigma = np.where(same, 0.3, 0.0)
    np.fill_diagonal(sigma, 1.0)
    assert np.max(np.abs(cov - sigma)) < 0.02
    assert abs(np.corrcoef(xi[:, 0], xi[:, 1])[0, 1] - 0.3) <= 0.03


def test_var_series_cross_cluster_independent():
    labels = np.array([0, 0, 1, 1])
    Y = gen_var_series(labels, [-1.0, 1.0], 0.5, 0.3, 20_000, 100, 4).values
    C = np.corrcoef(Y)
    assert abs(C[0, 2]) < 0.05 and abs(C[1, 3]) < 0.05
    assert C[0, 1] > 0.2
    np.testing.assert_allclose(Y.mean(axis=1), [-1, -1, 1, 1], atol=0.05)


def test_var_validation():
    with pytest.raises(ValueError):
        gen_var_series([0, 1], [0, 0], 1.0, 0.3, 10, 10, 0)
    with pytest.raises(ValueError):
        gen_var_series([0, 1], [0, 0], 0.5, 1.0, 10, 10, 0)


def test_scenario_defaults():
    s1 = ScenarioSpec.default(1, 120)
    assert s1.cluster_sizes == (30, 40, 50) and s1.means == (-1.0, 0.0, 1.0)
    assert (s1.psi, s1.sigma2, s1.n) == (0.5, 1.0, 100)
    s2 = ScenarioSpec.default(2, 196)
    assert s2.cluster_sizes == (35, 40, 42, 79) and s2.means == (-0.8, 0.0, 0.8, 1.6)
    assert s2.grid == (14, 14)
    s3 = ScenarioSpec.default(3, 210)
    assert s3.cluster_sizes == (60, 70, 80)
    assert (s3.phi_scale, s3.rho, s3.burn_in) == (0.5, 0.3, 100)
    with pytest.raises(ValueError):
        ScenarioSpec.default(1, 100)
    with pytest.raises(ValueError):
        ScenarioSpec(scenario=4, cluster_sizes=(1,), means=(0.0,))


@pytest.mark.parametrize("scenario,n_nodes", [(1, 120), (2, 144), (3, 120)])
def test_run_scenario_deterministic(scenario, n_nodes):
    spec = ScenarioSpec.default(scenario, n_nodes, seed=11)
    g1, y1, l1 = run_scenario(spec)
    g2, y2, l2 = run_scenario(spec)
    assert g1 == g2
    np.testing.assert_array_equal(y1.values, y2.values)
    np.testing.assert_array_equal(l1, l2)
    assert y1.values.shape == (n_nodes, 100)
    np.testing.assert_array_equal(np.bincount(l1), spec.cluster_sizes)
    _, y3, _ = run_scenario(ScenarioSpec.default(scenario, n_nodes, seed=12))
    assert not np.array_equal(y1.values, y3.values)
