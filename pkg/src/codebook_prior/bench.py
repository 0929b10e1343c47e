"""Wall-clock benchmark harness over the registered clustering algorithms."""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass

from .baselines import (
    KMeansConfig,
    agglomerative_centroid,
    kmeans,
    kmeans_balanced,
    kmeans_instance_distance,
)
from .codebook import Codebook
from .dcpe import dcpe_naive, dcpe_optimized
from .errors import DataError


def _config(k: int, seed: int, init: str = "random-tokens") -> KMeansConfig:
    return KMeansConfig(k=k, seed=seed, init=init)


ALGORITHMS = {
    "dcpe": lambda cb, k, seed: dcpe_optimized(cb, k)[0],
    "dcpe-naive": lambda cb, k, seed: dcpe_naive(cb, k)[0],
    "kmeans": lambda cb, k, seed: kmeans(cb, _config(k, seed)),
    "kmeanspp": lambda cb, k, seed: kmeans(cb, _config(k, seed, "plusplus")),
    "kmeans-balanced": lambda cb, k, seed: kmeans_balanced(cb, _config(k, seed)),
    "agg-centroid": lambda cb, k, seed: agglomerative_centroid(cb, k)[0],
    "kmeans-instance": lambda cb, k, seed: kmeans_instance_distance(cb, _config(k, seed)),
}


@dataclass(frozen=True)
class BenchResult:
    algo: str
    n_tokens: int
    dim: int
    k: int
    wall_time: float
    peak_matrix_bytes: int

    def to_dict(self) -> dict:
        return {
            "algo": self.algo,
            "n_tokens": self.n_tokens,
            "dim": self.dim,
            "k": self.k,
            "wall_time": self.wall_time,
            "peak_matrix_bytes": self.peak_matrix_bytes,
        }


def _peak_matrix_bytes(algo: str, n: int, d: int, k: int) -> int:
    if algo in ("dcpe", "dcpe-naive", "kmeans-instance"):
        return n * n * 8
    if algo == "agg-centroid":
        return n * n * 8
    return n * k * 8


def run_bench(
    codebook: Codebook, k: int, algos: list, repeats: int = 3, seed: int = 0
) -> list:
    """Run each algorithm `repeats` times on the same inputs; report median wall time."""
    if repeats < 1:
        raise DataError(f"repeats must be positive, got {repeats}")
    unknown = [a for a in algos if a not in ALGORITHMS]
    if unknown:
        raise DataError(
            f"unknown algorithm id(s) {unknown}; registered: {sorted(ALGORITHMS)}"
        )
    results = []
    for algo in algos:
        fn = ALGORITHMS[algo]
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            fn(codebook, k, seed)
            times.append(time.perf_counter() - t0)
        results.append(
            BenchResult(
                algo=algo,
                n_tokens=codebook.n_tokens,
                dim=codebook.dim,
                k=k,
                wall_time=statistics.median(times),
                peak_matrix_bytes=_peak_matrix_bytes(algo, codebook.n_tokens, codebook.dim, k),
            )
        )
    return results
