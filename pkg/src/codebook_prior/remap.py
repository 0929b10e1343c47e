"""Token-sequence utilities for working with a clustered codebook."""

from __future__ import annotations

import numpy as np

from .clusters import ClusterAssignment
from .errors import DataError
from .seeding import position_stream

AGGREGATE_MODES = ("mean", "sum")


def remap_to_clusters(seq: np.ndarray, assignment: ClusterAssignment) -> np.ndarray:
    """Elementwise token-index -> cluster-index lookup."""
    seq = np.asarray(seq, dtype=np.int64)
    if seq.ndim != 1:
        raise DataError(f"token sequence must be rank-1, got rank {seq.ndim}")
    if seq.size and (seq.min() < 0 or seq.max() >= assignment.n_tokens):
        bad = int(np.flatnonzero((seq < 0) | (seq >= assignment.n_tokens))[0])
        raise DataError(
            f"token index {seq[bad]} at position {bad} out of range [0, {assignment.n_tokens})"
        )
    return assignment.labels[seq]


def decode_random_selection(
    cluster_seq: np.ndarray, assignment: ClusterAssignment, seed: int
) -> np.ndarray:
    """Replace each cluster index with a uniformly drawn member token.

    Position i uses its own random stream derived from (seed, i), so the
    result is independent of chunking and deterministic for a fixed seed.
    """
    cluster_seq = np.asarray(cluster_seq, dtype=np.int64)
    if cluster_seq.ndim != 1:
        raise DataError(f"cluster sequence must be rank-1, got rank {cluster_seq.ndim}")
    k = assignment.n_clusters
    if cluster_seq.size and (cluster_seq.min() < 0 or cluster_seq.max() >= k):
        bad = int(np.flatnonzero((cluster_seq < 0) | (cluster_seq >= k))[0])
        raise DataError(
            f"cluster index {cluster_seq[bad]} at position {bad} out of range [0, {k})"
        )
    draws = position_stream(seed, cluster_seq.shape[0])
    out = np.empty_like(cluster_seq)
    for c in np.unique(cluster_seq):
        pos = np.flatnonzero(cluster_seq == c)
        mem = assignment.members[c]
        out[pos] = mem[(draws[pos] % np.uint64(mem.shape[0])).astype(np.int64)]
    return out


def aggregate_cluster_logits(
    token_logits: np.ndarray, assignment: ClusterAssignment, mode: str = "mean"
) -> np.ndarray:
    """Per-cluster mean (or sum) of token logits."""
    if mode not in AGGREGATE_MODES:
        raise DataError(f"unknown mode {mode!r}; expected one of {AGGREGATE_MODES}")
    logits = np.asarray(token_logits, dtype=np.float64)
    if logits.ndim != 1 or logits.shape[0] != assignment.n_tokens:
        raise DataError(
            f"logits must be a length-{assignment.n_tokens} vector, got shape {logits.shape}"
        )
    if not np.all(np.isfinite(logits)):
        raise DataError("logits must be finite")
    sums = np.bincount(assignment.labels, weights=logits, minlength=assignment.n_clusters)
    if mode == "sum":
        return sums
    return sums / assignment.sizes()
