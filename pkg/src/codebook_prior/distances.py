"""Dense pairwise-distance kernels shared by the clustering and quantization code."""

from __future__ import annotations

import numpy as np

from .errors import DataError

METRICS = ("euclidean", "cosine")


def pairwise_distances(
    x: np.ndarray,
    y: np.ndarray | None = None,
    metric: str = "euclidean",
    out: np.ndarray | None = None,
    block: int = 4096,
) -> np.ndarray:
    """All-pairs distance matrix between rows of `x` and rows of `y` (default: x vs x).

    Computed blockwise in float64 so an N x N result never needs more than one
    N x N buffer plus O(block * N) scratch.
    """
    if metric not in METRICS:
        raise DataError(f"unknown metric {metric!r}; expected one of {METRICS}")
    x = np.asarray(x, dtype=np.float64)
    y = x if y is None else np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or y.ndim != 2 or x.shape[1] != y.shape[1]:
        raise DataError(f"incompatible shapes for pairwise distances: {x.shape} vs {y.shape}")
    m, n = x.shape[0], y.shape[0]
    if out is None:
        out = np.empty((m, n), dtype=np.float64)

    self_pair = y is x

    if metric == "cosine":
        xn = x / np.maximum(np.linalg.norm(x, axis=1, keepdims=True), 1e-300)
        yn = y / np.maximum(np.linalg.norm(y, axis=1, keepdims=True), 1e-300)
        np.matmul(xn, yn.T, out=out)
        np.subtract(1.0, out, out=out)
        np.clip(out, 0.0, 2.0, out=out)
        if self_pair:
            _mirror_upper(out, block)
        return out

    ysq = np.einsum("ij,ij->i", y, y)
    for lo in range(0, m, block):
        hi = min(lo + block, m)
        chunk = out[lo:hi]
        np.matmul(x[lo:hi], y.T, out=chunk)
        chunk *= -2.0
        chunk += np.einsum("ij,ij->i", x[lo:hi], x[lo:hi])[:, None]
        chunk += ysq[None, :]
        np.maximum(chunk, 0.0, out=chunk)
        np.sqrt(chunk, out=chunk)
    if self_pair:
        _mirror_upper(out, block)
    return out


def _mirror_upper(out: np.ndarray, block: int) -> None:
    """Copy the upper triangle onto the lower so the matrix is bitwise symmetric.

    BLAS-backed x @ x.T is only symmetric up to rounding, which would make
    argmin tie-breaking depend on which triangle holds the minimum.
    """
    n = out.shape[0]
    for lo in range(0, n, block):
        hi = min(lo + block, n)
        out[hi:, lo:hi] = out[lo:hi, hi:].T
        blk = out[lo:hi, lo:hi]
        iu = np.triu_indices(hi - lo, 1)
        blk.T[iu] = blk[iu]

