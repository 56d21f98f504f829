import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import special_ortho_group

from latentgfl.clustering import kmeans, select_k, silhouette
from latentgfl.metrics import evaluate
from oracles import best_partition_cost


def blobs(centers, per, scale, seed):
    rng = np.random.default_rng(seed)
    centers = np.asarray(centers, dtype=float)
    X = np.concatenate([c + scale * rng.standard_normal((per, centers.shape[1])) for c in centers])
    return X, np.repeat(np.arange(len(centers)), per)


def test_kmeans_separates_tight_groups():
    X, y = blobs([[0, 0, 0], [10, 10, 10]], 10, 0.01, 0)
    res = kmeans(X, 2)
    assert evaluate(y, res.labels)["ACC"] == 1.0
    assert res.k == 2 and set(res.labels) == {0, 1}


def test_kmeans_n_equals_k():
    X = np.random.default_rng(1).standard_normal((5, 2))
    res = kmeans(X, 5)
    assert res.inertia == 0.0
    assert sorted(res.labels) == list(range(5))


def test_kmeans_errors():
    X = np.zeros((4, 2))
    with pytest.raises(ValueError):
        kmeans(X, 5)
    with pytest.raises(ValueError):
        kmeans(X, 1)


def test_kmeans_exhaustive_oracle():
    hits = 0
    seeds = range(200)
    for seed in seeds:
        X = np.random.default_rng(seed).standard_normal((8, 2))
        if kmeans(X, 2, seed=seed).inertia <= best_partition_cost(X) + 1e-9:
            hits += 1
    assert hits >= 0.95 * len(seeds)


def test_kmeans_duplicate_points_no_empty_cluster():
    X = np.array([[0.0, 0.0]] * 6 + [[1.0, 1.0]])
    res = kmeans(X, 3)
    assert set(res.labels) == {0, 1, 2}


def test_kmeans_deterministic():
    X, _ = blobs([[0, 0], [3, 3], [0, 4]], 15, 1.0, 2)
    a, b = kmeans(X, 3, seed=7), kmeans(X, 3, seed=7)
    np.testing.assert_array_equal(a.labels, b.labels)


def test_kmeans_rigid_motion_invariance():
    X, y = blobs([[0, 0, 0], [6, 0, 0], [0, 6, 0]], 12, 0.5, 3)
    R = special_ortho_group.rvs(3, random_state=0)
    moved = X @ R.T + np.array([5.0, -2.0, 1.0])
    a, b = kmeans(X, 3, seed=0), kmeans(moved, 3, seed=1)
    assert evaluate(a.labels, b.labels)["ACC"] == 1.0
    assert a.inertia == pytest.approx(b.inertia, rel=1e-9)


def test_silhouette_examples():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [10.0, 10.0], [10.0, 10.0]])
    assert silhouette(X, [0, 0, 1, 1]) == 1.0
    assert silhouette(X, [0, 1, 0, 1]) <= 0.0
    with pytest.raises(ValueError):
        silhouette(X, [0, 0, 0, 0])


def test_silhouette_hand_value():
    X = np.array([[0.0], [1.0], [5.0]])
    # point 0: a=1, b=5 -> 0.8; point 1: a=1, b=4 -> 0.75; point 2 is a singleton -> 0
    assert silhouette(X, [0, 0, 1]) == pytest.approx((0.8 + 0.75) / 3, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 5))
def test_silhouette_bounds_and_invariances(seed, k):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((20, 3))
    labels = np.concatenate([np.arange(k), rng.integers(0, k, 20 - k)])
    s = silhouette(X, labels)
    assert -1.0 <= s <= 1.0
    relabeled = rng.permutation(k)[labels] + 10
    assert silhouette(X, relabeled) == pytest.approx(s, abs=1e-10)
    R = special_ortho_group.rvs(3, random_state=seed)
    assert silhouette(X @ R.T + 3.0, labels) == pytest.approx(s, abs=1e-10)


def test_silhouette_matches_reference():
    skm = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(0)
    for _ in range(10):
        X = rng.standard_normal((25, 2))
        labels = rng.integers(0, 3, 25)
        assert silhouette(X, labels) == pytest.approx(skm.silhouette_score(X, labels), abs=1e-12)


def test_select_k_three_blobs():
    X, y = blobs([[0, 0], [8, 0], [4, 7]], 20, 0.6, 5)
    res = select_k(X, k_max=6)
    assert res.k == 3
    assert set(res.scores) == set(range(2, 7))
    assert res.scores[3] == max(res.scores.values())
    assert evaluate(y, res.labels)["ACC"] == 1.0


def test_select_k_single_candidate_and_errors():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [10.0, 10.0], [10.0, 10.0]])
    res = select_k(X, k_max=2)
    assert res.k == 2 and res.silhouette == 1.0
    with pytest.raises(ValueError):
        select_k(X, k_max=5)
    with pytest.raises(ValueError):
        select_k(X, k_max=1)
