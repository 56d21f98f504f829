"""k-means with k-means++ seeding, silhouette score and silhouette-based choice of k."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

MAX_ITER = 300


@dataclass(frozen=True)
class ClusterResult:
    labels: np.ndarray
    centroids: np.ndarray
    inertia: float
    silhouette: float
    scores: dict | None = None  # k -> silhouette, filled by select_k

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


def _plusplus(X, k, rng):
    # greedy k-means++: draw several D^2-weighted candidates per center, keep the best
    N = X.shape[0]
    trials = 2 + int(np.log(k))
    centers = [X[rng.integers(N)]]
    d2 = np.sum((X - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            cand = rng.integers(N, size=trials)
        else:
            cand = rng.choice(N, size=trials, p=d2 / total)
        new_d2 = np.minimum(d2[None, :], cdist(X[cand], X, "sqeuclidean"))
        best = int(np.argmin(new_d2.sum(axis=1)))
        centers.append(X[cand[best]])
        d2 = new_d2[best]
    return np.array(centers)


def _inertia(X, labels, centroids):
    return float(np.sum((X - centroids[labels]) ** 2))


def _lloyd(X, centroids, check_monotone=True):
    prev = None
    labels = None
    last = np.inf
    for _ in range(MAX_ITER):
        d2 = cdist(X, centroids, "sqeuclidean")
        labels = np.argmin(d2, axis=1)
        # repair empty clusters with the point farthest from its centroid
        counts = np.bincount(labels, minlength=len(centroids))
        for c in np.flatnonzero(counts == 0):
            far = np.argmax(d2[np.arange(len(X)), labels])
            labels[far] = c
            centroids[c] = X[far]
            d2[far] = 0.0
        if prev is not None and np.array_equal(labels, prev):
            break
        centroids = np.array([X[labels == c].mean(axis=0) for c in range(len(centroids))])
        cur = _inertia(X, labels, centroids)
        if check_monotone:
            assert cur <= last + 1e-9 * max(1.0, last), "Lloyd step increased inertia"
        last = cur
        prev = labels
    return labels, centroids


def kmeans(points, k: int, restarts: int = 10, seed: int = 0) -> ClusterResult:
    """Best-of-``restarts`` Lloyd iterations from k-means++ seeds."""
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    N = X.shape[0]
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if k > N:
        raise ValueError(f"k={k} exceeds number of points {N}")
    best = None
    for r in range(max(1, restarts)):
        rng = np.random.default_rng([seed, r])
        labels, cents = _lloyd(X, _plusplus(X, k, rng))
        inertia = _inertia(X, labels, cents)
        if best is None or inertia < best[2] - 1e-12:
            best = (labels, cents, inertia)
    labels, cents, inertia = best
    sil = silhouette(X, labels) if len(np.unique(labels)) > 1 and N > k else 0.0
    return ClusterResult(labels=labels, centroids=cents, inertia=inertia, silhouette=sil)


def silhouette(points, labels) -> float:
    """Mean silhouette width with Euclidean distances.

    The within-cluster distance excludes the point itself; points in
    singleton clusters contribute 0.
    """
    X = np.asarray(points, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    _, lab = np.unique(np.asarray(labels), return_inverse=True)
    k = lab.max() + 1
    if k < 2:
        raise ValueError("silhouette needs at least two clusters")
    D = cdist(X, X)
    onehot = np.eye(k)[lab]
    sizes = onehot.sum(axis=0)
    sums = D @ onehot  # (N, k) total distance to each cluster
    own = sizes[lab]
    rows = np.arange(len(lab))
    with np.errstate(divide="ignore", invalid="ignore"):
        d_in = sums[rows, lab] / (own - 1)
        mean_other = sums / sizes
    mean_other[rows, lab] = np.inf
    d_out = mean_other.min(axis=1)
    denom = np.maximum(d_in, d_out)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(denom > 0, (d_out - d_in) / denom, 0.0)
    s[own == 1] = 0.0
    return float(np.clip(s.mean(), -1.0, 1.0))


def select_k(points, k_max: int = 10, restarts: int = 10, seed: int = 0) -> ClusterResult:
    """Run k-means for ``k = 2..k_max`` and keep the highest silhouette (smallest k on ties)."""
    X = np.asarray(points, dtype=np.float64)
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    if k_max > X.shape[0]:
        raise ValueError(f"k_max={k_max} exceeds number of points {X.shape[0]}")
    best, scores = None, {}
    for k in range(2, k_max + 1):
        res = kmeans(X, k, restarts, seed)
        scores[k] = res.silhouette
        if best is None or res.silhouette > best.silhouette:
            best = res
    return ClusterResult(best.labels, best.centroids, best.inertia, best.silhouette, scores)
