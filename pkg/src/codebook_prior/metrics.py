"""Cluster-quality metrics and the embedding-space replacement-distortion probe."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .clusters import ClusterAssignment
from .codebook import Codebook
from .distances import pairwise_distances
from .errors import DataError
from .quantize import quantize
from .remap import decode_random_selection, remap_to_clusters
from .seeding import derive_seed


@dataclass(frozen=True)
class ClusterQualityReport:
    mean_intra_pairwise: float
    size_histogram: dict
    size_std: float
    n_clusters: int
    n_tokens: int

    def to_dict(self) -> dict:
        return {
            "mean_intra_pairwise": self.mean_intra_pairwise,
            "size_histogram": {str(s): c for s, c in sorted(self.size_histogram.items())},
            "size_std": self.size_std,
            "n_clusters": self.n_clusters,
            "n_tokens": self.n_tokens,
        }


def quality_report(codebook: Codebook, assignment: ClusterAssignment) -> ClusterQualityReport:
    """Mean over clusters of mean pairwise member distance (singletons count 0),
    plus the cluster-size histogram and population std of sizes."""
    if assignment.n_tokens != codebook.n_tokens:
        raise DataError(
            f"assignment covers {assignment.n_tokens} tokens, codebook has {codebook.n_tokens}"
        )
    x = codebook.vectors
    intra = []
    for mem in assignment.members:
        s = mem.shape[0]
        if s == 1:
            intra.append(0.0)
            continue
        d = pairwise_distances(x[mem])
        intra.append(float(d.sum() / (s * (s - 1))))
    sizes = assignment.sizes()
    return ClusterQualityReport(
        mean_intra_pairwise=float(np.mean(intra)),
        size_histogram=dict(Counter(sizes.tolist())),
        size_std=float(np.std(sizes)),
        n_clusters=assignment.n_clusters,
        n_tokens=assignment.n_tokens,
    )


def replacement_distortion(
    codebook: Codebook,
    assignment: ClusterAssignment,
    queries: np.ndarray,
    seed: int = 0,
    trials: int = 1,
) -> float:
    """Mean embedding-space error from swapping each query's quantized token
    for a random token of the same cluster, averaged over `trials` draws."""
    if trials < 1:
        raise DataError(f"trials must be positive, got {trials}")
    if assignment.n_tokens != codebook.n_tokens:
        raise DataError(
            f"assignment covers {assignment.n_tokens} tokens, codebook has {codebook.n_tokens}"
        )
    result = quantize(queries, codebook)
    cluster_seq = remap_to_clusters(result.indices, assignment)
    original = codebook.vectors[result.indices]
    total = 0.0
    for t in range(trials):
        replacement = decode_random_selection(cluster_seq, assignment, derive_seed(seed, t))
        total += float(np.mean(np.linalg.norm(original - codebook.vectors[replacement], axis=1)))
    return total / trials
