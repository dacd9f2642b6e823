"""k-means under the cityblock metric on surface mean features.

With the L1 metric the cost-minimising centroid of a cluster is its
component-wise median, so the update step takes medians (the lower middle
element for even counts). Replicates are independent runs with their own
random initialisation; the cheapest one wins.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ClusterParams",
    "ClusterResult",
    "lower_median",
    "l1_cost",
    "run_replicate",
    "kmeans_l1",
    "paint_labels",
]

_U64 = 2 ** 64


@dataclass(frozen=True)
class ClusterParams:
    k: int
    replicates: int = 100
    max_iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        for name in ("k", "replicates", "max_iterations"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < _U64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class ClusterResult:
    assignments: np.ndarray  # (n,) labels in [0, k)
    centroids: np.ndarray  # (k, N)
    cost: float
    winning_replicate: int
    n_iterations: int

    @property
    def k(self):
        return self.centroids.shape[0]


def lower_median(a, axis=0):
    """Median that picks the lower middle element for even counts."""
    a = np.asarray(a)
    m = a.shape[axis]
    return np.take(np.sort(a, axis=axis), (m - 1) // 2, axis=axis)


def l1_cost(points, centroids, labels):
    """Exactly rounded total L1 distance of ``points`` (n, N) to their centroids."""
    diff = np.abs(np.asarray(points, dtype=float) - np.asarray(centroids)[labels])
    return math.fsum(diff.ravel().tolist())


def _assign(x, centroids):
    dist = np.abs(x[:, None, :] - centroids[None, :, :]).sum(axis=2)
    return np.argmin(dist, axis=1), dist


def _repair_empty(x, centroids, labels, dist):
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    if counts.all():
        return
    own = dist[np.arange(len(labels)), labels]
    for c in np.flatnonzero(counts == 0):
        movable = counts[labels] > 1
        j = int(np.argmax(np.where(movable, own, -1.0)))
        counts[labels[j]] -= 1
        labels[j] = c
        counts[c] = 1
        centroids[c] = x[j]
        own[j] = 0.0


def run_replicate(x, k, max_iterations, seed, replicate=0):
    """One seeded k-medians run on ``x`` of shape ``(n, N)``.

    Returns ``(labels, centroids, cost, n_iterations, cost_history)``; the
    history holds the cost after every centroid update.
    """
    n = x.shape[0]
    rng = np.random.default_rng(seed + replicate)
    centroids = x[rng.choice(n, size=k, replace=False)].copy()
    labels = None
    history = []
    it = 0
    for it in range(1, max_iterations + 1):
        new, dist = _assign(x, centroids)
        _repair_empty(x, centroids, new, dist)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            centroids[c] = lower_median(x[labels == c], axis=0)
        history.append(float(np.abs(x - centroids[labels]).sum()))
    return labels, centroids, l1_cost(x, centroids, labels), it, history


def kmeans_l1(features, params, n_jobs=1):
    """Cluster the columns of an ``(N, n)`` feature matrix.

    Replicate ``r`` draws its initial centroids (``k`` distinct columns)
    from a generator seeded with ``params.seed + r``. The result is the
    lowest-cost replicate, ties going to the lowest replicate index, so the
    outcome does not depend on ``n_jobs``.
    """
    f = np.asarray(features, dtype=float)
    if f.ndim == 1:
        f = f[None, :]
    x = np.ascontiguousarray(f.T)
    n = x.shape[0]
    if params.k > n:
        raise ValueError(f"cannot form k={params.k} clusters from {n} feature columns")

    def job(r):
        return run_replicate(x, params.k, params.max_iterations, params.seed, r)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            runs = list(pool.map(job, range(params.replicates)))
    else:
        runs = [job(r) for r in range(params.replicates)]
    best = min(range(len(runs)), key=lambda r: (runs[r][2], r))
    labels, centroids, cost, iters, _ = runs[best]
    return ClusterResult(assignments=labels.astype(np.int64), centroids=centroids,
                         cost=cost, winning_replicate=best, n_iterations=iters)


def paint_labels(d, result):
    """Give every pixel the cluster label of its surface.

    ``result`` is a :class:`ClusterResult` or a plain sequence with one
    label per surface.
    """
    labels = result.assignments if isinstance(result, ClusterResult) else result
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (len(d.surfaces),):
        raise ValueError(f"{labels.size} assignments for {len(d.surfaces)} surfaces")
    return labels[d.surface_index_map()]
