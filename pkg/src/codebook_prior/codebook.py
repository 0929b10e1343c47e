"""Codebook domain type, NPY/CSV ingestion and emission, synthetic generator."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

FORMATS = ("npy", "csv")


@dataclass(frozen=True)
class Codebook:
    """An N x d matrix of token embedding vectors; row i is token i."""

    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vectors)
        if v.ndim != 2:
            raise DataError(f"codebook must be a rank-2 array, got rank {v.ndim}")
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise DataError(f"codebook must be at least 1x1, got shape {v.shape}")
        if not np.issubdtype(v.dtype, np.floating):
            v = v.astype(np.float64)
        if not np.all(np.isfinite(v)):
            bad = np.argwhere(~np.isfinite(v))[0]
            raise DataError(f"non-finite codebook entry at row {bad[0]}, column {bad[1]}")
        object.__setattr__(self, "vectors", v)
        self.vectors.setflags(write=False)

    @property
    def n_tokens(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class SyntheticSpec:
    """Mixture-of-isotropic-Gaussians recipe for a non-uniform-density codebook.

    components: (center, scale, count) triples; blocks are emitted in
    component order, so component j occupies a contiguous row range.
    """

    components: tuple = field()
    seed: int = 0
    dim: int = 2

    def __post_init__(self) -> None:
        comps = []
        for center, scale, count in self.components:
            center = np.asarray(center, dtype=np.float64).reshape(-1)
            if center.shape[0] != self.dim:
                raise DataError(
                    f"component center has dim {center.shape[0]}, spec dim is {self.dim}"
                )
            if not scale > 0:
                raise DataError(f"component scale must be positive, got {scale}")
            if int(count) < 1:
                raise DataError(f"component count must be positive, got {count}")
            comps.append((center, float(scale), int(count)))
        if not comps:
            raise DataError("synthetic spec needs at least one component")
        object.__setattr__(self, "components", tuple(comps))

    @property
    def n_tokens(self) -> int:
        return sum(count for _, _, count in self.components)


def generate_synthetic(spec: SyntheticSpec) -> Codebook:
    """Deterministic (spec, seed) -> codebook draw from the Gaussian mixture."""
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    blocks = [
        center + scale * rng.standard_normal((count, spec.dim))
        for center, scale, count in spec.components
    ]
    return Codebook(np.concatenate(blocks, axis=0))


def load_codebook(path: str | os.PathLike, format: str | None = None) -> Codebook:
    """Read a codebook from an NPY or CSV file (format inferred from suffix if omitted)."""
    path = os.fspath(path)
    fmt = format or _infer_format(path)
    if not os.path.exists(path):
        raise DataError(f"codebook file not found: {path}")
    if fmt == "npy":
        try:
            arr = np.load(path, allow_pickle=False)
        except (ValueError, OSError) as exc:
            raise DataError(f"{path}: malformed NPY file: {exc}") from exc
        if arr.ndim != 2:
            raise DataError(f"{path}: rank != 2 (got rank {arr.ndim})")
        if not np.issubdtype(arr.dtype, np.floating):
            raise DataError(f"{path}: expected float32/float64 payload, got {arr.dtype}")
        try:
            return Codebook(arr.astype(np.float64))
        except DataError as exc:
            raise DataError(f"{path}: {exc}") from exc
    elif fmt == "csv":
        try:
            arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
        except ValueError as exc:
            raise DataError(f"{path}: malformed CSV: {exc}") from exc
        if arr.size == 0:
            raise DataError(f"{path}: empty CSV file")
        try:
            return Codebook(arr)
        except DataError as exc:
            raise DataError(f"{path}: {exc}") from exc
    raise DataError(f"unknown codebook format {fmt!r}; expected one of {FORMATS}")


def save_codebook(
    codebook: Codebook,
    path: str | os.PathLike,
    format: str | None = None,
    float64: bool = False,
    make_parents: bool = False,
) -> None:
    """Write a codebook as NPY (f4 by default, f8 with float64=True) or CSV."""
    path = os.fspath(path)
    fmt = format or _infer_format(path)
    parent = os.path.dirname(path)
    if parent and not os.path.isdir(parent):
        if make_parents:
            os.makedirs(parent, exist_ok=True)
        else:
            raise DataError(f"destination directory does not exist: {parent}")
    if fmt == "npy":
        dtype = np.float64 if float64 else np.float32
        np.save(path, codebook.vectors.astype(dtype))
    elif fmt == "csv":
        np.savetxt(path, codebook.vectors, delimiter=",", fmt="%.10e")
    else:
        raise DataError(f"unknown codebook format {fmt!r}; expected one of {FORMATS}")


def _infer_format(path: str) -> str:
    ext = os.path.splitext(path)[1].lower().lstrip(".")
    return ext if ext in FORMATS else "npy"
