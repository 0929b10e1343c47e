"""Greedy average-linkage agglomerative clustering of a codebook.

Two interchangeable implementations:

* `dcpe_naive` re-derives every inter-cluster average from raw token vectors
  at every step (O(N^3 d) work) and serves as the reference.
* `dcpe_optimized` initializes a pairwise-distance-sum matrix once and merges
  clusters by summing rows/columns, so each average is available in O(1);
  total work after initialization is O(N^3) scalar operations independent
  of d, and in practice far less via cached per-row minima.

Both use the same deterministic tie-break: among minimal-distance pairs,
pick the pair (a, b), a < b, with smallest a then smallest b, where a and b
are cluster representatives (smallest member token index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clusters import ClusterAssignment, MergeStep, MergeTrace
from .codebook import Codebook
from .distances import pairwise_distances
from .errors import DataError


@dataclass
class DistanceState:
    """Live bookkeeping of the incremental algorithm.

    sum_matrix[a, b] is the SUM of all pairwise token distances between
    clusters a and b (average = sum / (sizes[a] * sizes[b])); slot index
    doubles as the cluster representative. Diagonal entries are +inf.
    """

    sum_matrix: np.ndarray
    sizes: np.ndarray
    active: np.ndarray


def _validate_k(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise DataError(f"k must be in [1, {n}], got {k}")


def dcpe_naive(
    codebook: Codebook, k: int, metric: str = "euclidean"
) -> tuple[ClusterAssignment, MergeTrace]:
    """Reference implementation: every step recomputes all averages from raw vectors."""
    x = codebook.vectors
    n = codebook.n_tokens
    _validate_k(n, k)
    members = [np.array([i], dtype=np.int64) for i in range(n)]
    steps = []
    for _ in range(n - k):
        sizes = np.array([m.shape[0] for m in members], dtype=np.float64)
        starts = np.concatenate([[0], np.cumsum(sizes[:-1])]).astype(np.int64)
        order = np.concatenate(members)
        dist = pairwise_distances(x[order], metric=metric)
        row_sums = np.add.reduceat(dist, starts, axis=0)
        pair_sums = np.add.reduceat(row_sums, starts, axis=1)
        avg = pair_sums / np.outer(sizes, sizes)
        np.fill_diagonal(avg, np.inf)
        # members stay ordered by representative, so row-major argmin implements
        # the (smallest a, then smallest b) tie-break: an upper-triangle entry
        # always precedes its bitwise-equal lower twin in row-major order
        i, j = divmod(int(np.argmin(avg)), len(members))
        if i > j:
            i, j = j, i
        steps.append(MergeStep(int(members[i][0]), int(members[j][0]), float(avg[i, j])))
        members[i] = np.sort(np.concatenate([members[i], members[j]]))
        del members[j]
    return _assignment_from_members(members, n), MergeTrace(tuple(steps))


def dcpe_optimized(
    codebook: Codebook,
    k: int,
    max_cluster_size: int | None = None,
    metric: str = "euclidean",
    literal_sum_argmin: bool = False,
) -> tuple[ClusterAssignment, MergeTrace]:
    """Incremental-sum-matrix implementation; identical output to `dcpe_naive` when uncapped.

    With `max_cluster_size` set, pairs whose combined size would exceed the cap
    are skipped during the argmin (feasibility requires max_cluster_size * k >= N).
    `literal_sum_argmin` selects pairs by minimal summed (unnormalized) distance
    instead of the average, for comparison; recorded trace distances are always
    the averages.
    """
    n = codebook.n_tokens
    _validate_k(n, k)
    if max_cluster_size is not None:
        if max_cluster_size < 1:
            raise DataError(f"max_cluster_size must be positive, got {max_cluster_size}")
        if max_cluster_size * k < n:
            raise DataError(
                f"infeasible cap: max_cluster_size * k = {max_cluster_size * k} < N = {n}"
            )
    state = _init_state(codebook, metric)
    if max_cluster_size is None and not literal_sum_argmin:
        steps, labels = _merge_loop_cached(state, n - k)
    else:
        steps, labels = _merge_loop_scan(state, n - k, max_cluster_size, literal_sum_argmin)
    return ClusterAssignment.from_labels(labels), MergeTrace(tuple(steps))


def cut_trace(trace: MergeTrace, n_tokens: int, k: int) -> ClusterAssignment:
    """Replay the first n_tokens - k merges from singletons."""
    reachable_min = n_tokens - len(trace)
    if not reachable_min <= k <= n_tokens:
        raise DataError(f"k must be in [{reachable_min}, {n_tokens}] for this trace, got {k}")
    labels = np.arange(n_tokens, dtype=np.int64)
    for step in trace.steps[: n_tokens - k]:
        labels[labels == step.b] = step.a
    return ClusterAssignment.from_labels(labels)


def _init_state(codebook: Codebook, metric: str) -> DistanceState:
    n = codebook.n_tokens
    sums = pairwise_distances(codebook.vectors, metric=metric)
    np.fill_diagonal(sums, np.inf)
    return DistanceState(
        sum_matrix=sums,
        sizes=np.ones(n, dtype=np.int64),
        active=np.ones(n, dtype=bool),
    )


def _merge_loop_cached(state: DistanceState, n_merges: int):
    """Uncapped fast path: per-row cached minima of the averaged matrix.

    Average linkage guarantees the merged cluster is never closer to a third
    cluster than the nearer of its two parts, so a row's cached minimum can
    only be invalidated (never improved) by a merge; equality cases are
    rescanned too so the index tie-break stays exact.
    """
    sums = state.sum_matrix
    sizes = state.sizes
    active = state.active
    n = sums.shape[0]
    fsizes = sizes.astype(np.float64)
    nn_idx = np.argmin(sums, axis=1)
    nn_val = sums[np.arange(n), nn_idx].astype(np.float64)
    labels = np.arange(n, dtype=np.int64)
    steps = []

    def rescan(i: int) -> None:
        row = sums[i] / (fsizes[i] * fsizes)
        row[~active] = np.inf
        j = int(np.argmin(row))
        nn_idx[i] = j
        nn_val[i] = row[j]

    for _ in range(n_merges):
        a = int(np.argmin(nn_val))
        b = int(nn_idx[a])
        d = float(nn_val[a])
        if not np.isfinite(d):
            raise DataError("no active pair available to merge")
        if b < a:  # cannot happen with an exact cache; kept as a safeguard
            a, b = b, a
        steps.append(MergeStep(a, b, d))
        sums[a, :] += sums[b, :]
        sums[:, a] = sums[a, :]
        sizes[a] += sizes[b]
        fsizes[a] = sizes[a]
        active[b] = False
        nn_val[b] = np.inf
        labels[labels == b] = a
        rescan(a)
        # rows whose cached pair involved a or b, or that now tie with the merged cluster
        col = sums[:, a] / (fsizes * fsizes[a])
        stale = active & ((nn_idx == a) | (nn_idx == b) | (col <= nn_val))
        stale[a] = False
        for i in np.flatnonzero(stale):
            rescan(int(i))
    return steps, labels


def _merge_loop_scan(
    state: DistanceState,
    n_merges: int,
    max_cluster_size: int | None,
    literal_sum_argmin: bool,
):
    """Full matrix scan per step; handles the size cap and the literal-sum variant."""
    sums = state.sum_matrix
    sizes = state.sizes
    active = state.active
    n = sums.shape[0]
    labels = np.arange(n, dtype=np.int64)
    steps = []
    for _ in range(n_merges):
        idx = np.flatnonzero(active)
        sub = sums[np.ix_(idx, idx)]
        if not literal_sum_argmin:
            sz = sizes[idx].astype(np.float64)
            sub = sub / np.outer(sz, sz)
        if max_cluster_size is not None:
            combined = sizes[idx][:, None] + sizes[idx][None, :]
            sub = np.where(combined > max_cluster_size, np.inf, sub)
        sub[np.tril_indices(idx.shape[0])] = np.inf
        i, j = divmod(int(np.argmin(sub)), idx.shape[0])
        if not np.isfinite(sub[i, j]):
            raise DataError(
                "no feasible merge pair under the cluster-size cap before reaching k "
                f"({idx.shape[0]} clusters remain)"
            )
        a, b = int(idx[i]), int(idx[j])
        avg = float(sums[a, b] / (sizes[a] * sizes[b]))
        steps.append(MergeStep(a, b, avg))
        sums[a, :] += sums[b, :]
        sums[:, a] = sums[a, :]
        sizes[a] += sizes[b]
        active[b] = False
        labels[labels == b] = a
    return steps, labels


def _assignment_from_members(members, n: int) -> ClusterAssignment:
    labels = np.empty(n, dtype=np.int64)
    for ci, m in enumerate(members):
        labels[m] = ci
    return ClusterAssignment(labels)
