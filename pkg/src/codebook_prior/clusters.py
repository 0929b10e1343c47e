"""Cluster assignment and merge-trace domain types.

Canonical labeling convention used across the whole package: clusters are
numbered by ascending smallest member token index, so the cluster containing
token 0 is always cluster 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError


def canonicalize_labels(labels: np.ndarray) -> np.ndarray:
    """Renumber arbitrary labels so clusters are ordered by smallest member index."""
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise DataError(f"labels must be a rank-1 array, got rank {labels.ndim}")
    uniq, first = np.unique(labels, return_index=True)
    order = np.argsort(first, kind="stable")
    remap = np.empty(uniq.shape[0], dtype=np.int64)
    remap[order] = np.arange(uniq.shape[0])
    return remap[np.searchsorted(uniq, labels)]


@dataclass(frozen=True)
class ClusterAssignment:
    """A partition of tokens [0, N) into k non-empty clusters."""

    labels: np.ndarray
    n_clusters: int = field(init=False)
    members: tuple = field(init=False)

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] < 1:
            raise DataError("labels must be a non-empty rank-1 integer array")
        k = int(labels.max()) + 1
        if labels.min() < 0:
            raise DataError("cluster labels must be nonnegative")
        counts = np.bincount(labels, minlength=k)
        if np.any(counts == 0):
            empty = int(np.flatnonzero(counts == 0)[0])
            raise DataError(f"cluster {empty} is empty; labels must cover [0, k)")
        order = np.argsort(labels, kind="stable")
        bounds = np.cumsum(counts)[:-1]
        members = tuple(np.sort(m) for m in np.split(order, bounds))
        # enforce canonical numbering
        firsts = np.array([m[0] for m in members])
        if np.any(np.diff(firsts) < 0):
            raise DataError("labels are not canonical (clusters not ordered by smallest member)")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_clusters", k)
        object.__setattr__(self, "members", members)

    @classmethod
    def from_labels(cls, labels: np.ndarray) -> "ClusterAssignment":
        """Build an assignment from arbitrary labels, canonicalizing the numbering."""
        return cls(canonicalize_labels(labels))

    @property
    def n_tokens(self) -> int:
        return self.labels.shape[0]

    def sizes(self) -> np.ndarray:
        return np.array([m.shape[0] for m in self.members], dtype=np.int64)


@dataclass(frozen=True)
class MergeStep:
    """One greedy merge: cluster with representative `b` absorbed into `a` (a < b).

    Representatives are smallest member token indices; `dist` is the
    average inter-cluster distance at the moment of the merge.
    """

    a: int
    b: int
    dist: float


@dataclass(frozen=True)
class MergeTrace:
    """Ordered record of the N - k merges performed by an agglomerative run."""

    steps: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))
        for s in self.steps:
            if not (0 <= s.a < s.b):
                raise DataError(f"malformed merge step ({s.a}, {s.b})")
            if not (np.isfinite(s.dist) and s.dist >= 0):
                raise DataError(f"merge distance must be finite and nonnegative, got {s.dist}")

    def __len__(self) -> int:
        return len(self.steps)
