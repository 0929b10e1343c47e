"""Codebook-prior extraction toolkit.

Clusters vector-quantization codebooks with a greedy average-linkage
agglomerative algorithm (plus k-means-family baselines), and provides the
surrounding utilities: exact quantization, token/cluster remapping, seeded
random-selection decoding, quality metrics, and a benchmark harness.
"""

__version__ = "0.1.0"

from .baselines import (
    KMeansConfig,
    agglomerative_centroid,
    kmeans,
    kmeans_balanced,
    kmeans_instance_distance,
)
from .bench import ALGORITHMS, BenchResult, run_bench
from .clusters import ClusterAssignment, MergeStep, MergeTrace, canonicalize_labels
from .codebook import (
    Codebook,
    SyntheticSpec,
    generate_synthetic,
    load_codebook,
    save_codebook,
)
from .dcpe import DistanceState, cut_trace, dcpe_naive, dcpe_optimized
from .errors import DataError
from .metrics import ClusterQualityReport, quality_report, replacement_distortion
from .quantize import QuantizeResult, quantize
from .remap import aggregate_cluster_logits, decode_random_selection, remap_to_clusters

__all__ = [
    "ALGORITHMS",
    "BenchResult",
    "ClusterAssignment",
    "ClusterQualityReport",
    "Codebook",
    "DataError",
    "DistanceState",
    "KMeansConfig",
    "MergeStep",
    "MergeTrace",
    "QuantizeResult",
    "SyntheticSpec",
    "agglomerative_centroid",
    "aggregate_cluster_logits",
    "canonicalize_labels",
    "cut_trace",
    "dcpe_naive",
    "dcpe_optimized",
    "decode_random_selection",
    "generate_synthetic",
    "kmeans",
    "kmeans_balanced",
    "kmeans_instance_distance",
    "load_codebook",
    "quality_report",
    "quantize",
    "remap_to_clusters",
    "replacement_distortion",
    "run_bench",
    "save_codebook",
]
