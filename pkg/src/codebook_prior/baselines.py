"""Comparison and ablation clustering algorithms.

k-means (Lloyd, with random-token or ++ seeding), the capacity-balanced
variant, centroid-linkage agglomerative clustering, and a Lloyd-style loop
that scores tokens by mean instance distance to cluster members instead of
centroid distance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clusters import ClusterAssignment, MergeStep, MergeTrace
from .codebook import Codebook
from .distances import pairwise_distances
from .errors import DataError

INITS = ("random-tokens", "plusplus")


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iters: int = 100
    seed: int = 0
    init: str = "random-tokens"
    tol: float = 0.0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise DataError(f"k must be positive, got {self.k}")
        if self.max_iters < 1:
            raise DataError(f"max_iters must be positive, got {self.max_iters}")
        if self.init not in INITS:
            raise DataError(f"unknown init {self.init!r}; expected one of {INITS}")
        if self.tol < 0:
            raise DataError(f"tol must be nonnegative, got {self.tol}")


def _init_centroids(x: np.ndarray, config: KMeansConfig) -> np.ndarray:
    n = x.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    if config.init == "random-tokens":
        return x[rng.choice(n, size=config.k, replace=False)].copy()
    # kmeans++: squared-distance-proportional sampling
    chosen = [int(rng.integers(n))]
    d2 = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    for _ in range(config.k - 1):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            remaining = np.setdiff1d(np.arange(n), np.array(chosen))
            nxt = int(remaining[0]) if remaining.size else int(rng.integers(n))
        chosen.append(nxt)
        d2 = np.minimum(d2, np.sum((x - x[nxt]) ** 2, axis=1))
    return x[np.array(chosen)].copy()


def _sq_dist_to_centroids(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    d2 = (
        np.einsum("ij,ij->i", x, x)[:, None]
        - 2.0 * (x @ centroids.T)
        + np.einsum("ij,ij->i", centroids, centroids)[None, :]
    )
    return np.maximum(d2, 0.0, out=d2)


def _repair_empty(labels: np.ndarray, centroids: np.ndarray, x: np.ndarray,
                  cost: np.ndarray) -> None:
    """Re-seed each empty cluster with the worst-fit token (in place)."""
    k = centroids.shape[0]
    counts = np.bincount(labels, minlength=k)
    while True:
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return
        c = int(empty[0])
        # never steal from a singleton, or we just move the hole around
        candidates = np.flatnonzero(counts[labels] > 1)
        idx = int(candidates[np.argmax(cost[candidates])])
        counts[labels[idx]] -= 1
        labels[idx] = c
        counts[c] = 1
        centroids[c] = x[idx]
        cost[idx] = 0.0


def kmeans(
    codebook: Codebook, config: KMeansConfig, cost_history: list | None = None
) -> ClusterAssignment:
    """Lloyd iterations until stable labels, centroid shift < tol, or max_iters.

    `cost_history`, if given, collects the within-cluster sum of squared
    distances after each assignment step.
    """
    x = codebook.vectors
    n = codebook.n_tokens
    if config.k > n:
        raise DataError(f"k = {config.k} exceeds number of tokens {n}")
    centroids = _init_centroids(x, config)
    prev = None
    for _ in range(config.max_iters):
        d2 = _sq_dist_to_centroids(x, centroids)
        labels = np.argmin(d2, axis=1)
        cost = d2[np.arange(n), labels]
        _repair_empty(labels, centroids, x, cost)
        if cost_history is not None:
            cost_history.append(float(np.sum((x - centroids[labels]) ** 2)))
        new_centroids = np.stack(
            [x[labels == c].mean(axis=0) for c in range(config.k)]
        )
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if prev is not None and np.array_equal(labels, prev):
            break
        if config.tol > 0 and shift < config.tol:
            break
        prev = labels
    return ClusterAssignment.from_labels(labels)


def kmeans_balanced(codebook: Codebook, config: KMeansConfig) -> ClusterAssignment:
    """Capacity-constrained k-means: every cluster ends with floor(N/k) or ceil(N/k) tokens.

    Assignment is greedy over all (token, centroid) pairs sorted by distance;
    only N mod k clusters may exceed the floor capacity.
    """
    x = codebook.vectors
    n = codebook.n_tokens
    k = config.k
    if k > n:
        raise DataError(f"k = {k} exceeds number of tokens {n}")
    lo, extra = divmod(n, k)
    centroids = _init_centroids(x, config)
    prev = None
    for _ in range(config.max_iters):
        d2 = _sq_dist_to_centroids(x, centroids)
        order = np.argsort(d2, axis=None, kind="stable")
        labels = np.full(n, -1, dtype=np.int64)
        counts = np.zeros(k, dtype=np.int64)
        assigned = 0
        # pass 1: fill every cluster to the floor capacity
        if lo > 0:
            for flat in order:
                t, c = divmod(int(flat), k)
                if labels[t] < 0 and counts[c] < lo:
                    labels[t] = c
                    counts[c] += 1
                    assigned += 1
                    if assigned == lo * k:
                        break
        # pass 2: hand the N mod k leftovers one extra slot each
        if extra:
            for flat in order:
                t, c = divmod(int(flat), k)
                if labels[t] < 0 and counts[c] == lo:
                    labels[t] = c
                    counts[c] += 1
                    assigned += 1
                    if assigned == n:
                        break
        centroids = np.stack([x[labels == c].mean(axis=0) for c in range(k)])
        if prev is not None and np.array_equal(labels, prev):
            break
        prev = labels
    return ClusterAssignment.from_labels(labels)


def agglomerative_centroid(
    codebook: Codebook, k: int, metric: str = "euclidean"
) -> tuple[ClusterAssignment, MergeTrace]:
    """Same greedy loop and tie-break as the average-linkage clusterer, but
    inter-cluster distance is the distance between cluster centroids."""
    x = codebook.vectors
    n = codebook.n_tokens
    if not 1 <= k <= n:
        raise DataError(f"k must be in [1, {n}], got {k}")
    members = [np.array([i], dtype=np.int64) for i in range(n)]
    centroids = np.array(x, dtype=np.float64)
    sizes = np.ones(n, dtype=np.float64)
    steps = []
    for _ in range(n - k):
        dist = pairwise_distances(centroids, metric=metric)
        np.fill_diagonal(dist, np.inf)
        # rows ordered by representative; upper twin precedes its bitwise-equal
        # lower twin row-major, so argmin + normalization is the usual tie-break
        i, j = divmod(int(np.argmin(dist)), len(members))
        if i > j:
            i, j = j, i
        steps.append(MergeStep(int(members[i][0]), int(members[j][0]), float(dist[i, j])))
        # merged centroid is the exact arithmetic mean of the combined members
        centroids[i] = (sizes[i] * centroids[i] + sizes[j] * centroids[j]) / (sizes[i] + sizes[j])
        sizes[i] += sizes[j]
        centroids = np.delete(centroids, j, axis=0)
        sizes = np.delete(sizes, j)
        members[i] = np.sort(np.concatenate([members[i], members[j]]))
        del members[j]
    labels = np.empty(n, dtype=np.int64)
    for ci, m in enumerate(members):
        labels[m] = ci
    return ClusterAssignment(labels), MergeTrace(tuple(steps))


def kmeans_instance_distance(codebook: Codebook, config: KMeansConfig) -> ClusterAssignment:
    """Lloyd-style loop where a token's cost against a cluster is the mean
    Euclidean distance to all current members (self included, at distance 0)."""
    x = codebook.vectors
    n = codebook.n_tokens
    k = config.k
    if k > n:
        raise DataError(f"k = {k} exceeds number of tokens {n}")
    dist = pairwise_distances(x)
    centroids = _init_centroids(x, config)
    labels = np.argmin(_sq_dist_to_centroids(x, centroids), axis=1)
    _repair_empty(labels, centroids, x,
                  _sq_dist_to_centroids(x, centroids)[np.arange(n), labels])
    for _ in range(config.max_iters):
        cost = np.empty((n, k), dtype=np.float64)
        for c in range(k):
            mem = labels == c
            cost[:, c] = dist[:, mem].mean(axis=1) if mem.any() else np.inf
        new_labels = np.argmin(cost, axis=1)
        own = cost[np.arange(n), new_labels]
        counts = np.bincount(new_labels, minlength=k)
        for c in np.flatnonzero(counts == 0):
            idx = int(np.argmax(own))
            counts[new_labels[idx]] -= 1
            new_labels[idx] = c
            counts[c] = 1
            own[idx] = 0.0
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return ClusterAssignment.from_labels(labels)
