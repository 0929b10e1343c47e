"""Exact nearest-codebook-token lookup."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codebook import Codebook
from .errors import DataError


@dataclass(frozen=True)
class QuantizeResult:
    """Per-query nearest token index and its Euclidean distance."""

    indices: np.ndarray
    distances: np.ndarray


def quantize(queries: np.ndarray, codebook: Codebook, block: int = 4096) -> QuantizeResult:
    """Map each query row to the index of its nearest codebook token.

    Exact brute-force search; ties resolve to the lowest token index.
    """
    q = np.asarray(queries, dtype=np.float64)
    if q.ndim != 2:
        raise DataError(f"queries must be a rank-2 array, got rank {q.ndim}")
    if not np.all(np.isfinite(q)):
        raise DataError("queries contain non-finite entries")
    cb = codebook.vectors
    if q.shape[1] != cb.shape[1]:
        raise DataError(f"query dim {q.shape[1]} != codebook dim {cb.shape[1]}")
    csq = np.einsum("ij,ij->i", cb, cb)
    indices = np.empty(q.shape[0], dtype=np.int64)
    distances = np.empty(q.shape[0], dtype=np.float64)
    for lo in range(0, q.shape[0], block):
        hi = min(lo + block, q.shape[0])
        chunk = q[lo:hi]
        # argmin over squared distances; ||q||^2 omitted (constant per row)
        scores = csq[None, :] - 2.0 * (chunk @ cb.T)
        idx = np.argmin(scores, axis=1)
        indices[lo:hi] = idx
        distances[lo:hi] = np.linalg.norm(chunk - cb[idx], axis=1)
    return QuantizeResult(indices=indices, distances=distances)
