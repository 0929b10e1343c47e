"""Command-line entry point.

Every subcommand writes a `<output>.manifest.json` sidecar next to each
output file recording the resolved parameters, tool version, and content
digests of the inputs, so any run can be reproduced exactly. Progress and
diagnostics go to stderr; data files stay machine-parseable.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

import numpy as np

from . import __version__
from .baselines import (
    KMeansConfig,
    agglomerative_centroid,
    kmeans,
    kmeans_balanced,
    kmeans_instance_distance,
)
from .bench import ALGORITHMS, run_bench
from .clusters import ClusterAssignment, MergeStep, MergeTrace
from .codebook import Codebook, SyntheticSpec, generate_synthetic, load_codebook, save_codebook
from .dcpe import cut_trace, dcpe_naive, dcpe_optimized
from .errors import DataError
from .metrics import quality_report
from .quantize import quantize
from .remap import decode_random_selection, remap_to_clusters

CLUSTER_ALGOS = ("dcpe", "dcpe-naive", "kmeans", "kmeanspp", "kmeans-balanced",
                 "agg-centroid", "kmeans-instance")


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return value


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_path: str, subcommand: str, params: dict, inputs: list) -> None:
    manifest = {
        "subcommand": subcommand,
        "params": params,
        "tool_version": __version__,
        "input_digests": {p: _sha256(p) for p in inputs},
    }
    with open(out_path + ".manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _ensure_parent(path: str, make_parents: bool) -> None:
    parent = os.path.dirname(path)
    if parent and not os.path.isdir(parent):
        if make_parents:
            os.makedirs(parent, exist_ok=True)
        else:
            raise DataError(f"destination directory does not exist: {parent}")


def _save_int32(path: str, values: np.ndarray, make_parents: bool) -> None:
    _ensure_parent(path, make_parents)
    np.save(path, np.asarray(values, dtype=np.int32))


def _load_int_vector(path: str, what: str) -> np.ndarray:
    if not os.path.exists(path):
        raise DataError(f"{what} file not found: {path}")
    try:
        arr = np.load(path, allow_pickle=False)
    except (ValueError, OSError) as exc:
        raise DataError(f"{path}: malformed NPY file: {exc}") from exc
    if arr.ndim != 1 or not np.issubdtype(arr.dtype, np.integer):
        raise DataError(f"{path}: expected a rank-1 integer array, got {arr.dtype} rank {arr.ndim}")
    return arr.astype(np.int64)


def _load_assignment(path: str) -> ClusterAssignment:
    return ClusterAssignment.from_labels(_load_int_vector(path, "labels"))


def _load_trace(path: str) -> MergeTrace:
    if not os.path.exists(path):
        raise DataError(f"trace file not found: {path}")
    steps = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line)
                steps.append(MergeStep(int(rec["a"]), int(rec["b"]), float(rec["dist"])))
            except (ValueError, KeyError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: malformed trace record: {exc}") from exc
    return MergeTrace(tuple(steps))


def _parse_component(text: str):
    # "c1,c2,...:scale:count"
    parts = text.rsplit(":", 2)
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"component must look like 'c1,c2,...:scale:count', got {text!r}"
        )
    try:
        center = [float(v) for v in parts[0].split(",")]
        return (center, float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _apply_thread_cap(threads: int | None) -> None:
    if threads is None:
        env = os.environ.get("CODEBOOK_PRIOR_THREADS")
        threads = int(env) if env else None
    if threads is None:
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(limits=threads)
    except ImportError:
        print("warning: threadpoolctl unavailable, --threads ignored", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="codebook-prior",
                     description="Codebook clustering and token-remapping toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--threads", type=_positive_int, default=None,
                       help="cap internal parallelism (default: hardware / env)")
        p.add_argument("--make-parents", action="store_true",
                       help="create missing parent directories for outputs")

    p = sub.add_parser("synth", help="generate a synthetic Gaussian-mixture codebook")
    p.add_argument("--component", type=_parse_component, action="append", required=True,
                   metavar="CENTER:SCALE:COUNT", help="e.g. '0,0:0.01:100' (repeatable)")
    p.add_argument("--dim", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("npy", "csv"), default="npy")
    p.add_argument("--float64", action="store_true", help="emit f8 instead of f4")
    common(p)

    p = sub.add_parser("quantize", help="nearest-token lookup for query vectors")
    p.add_argument("--queries", required=True)
    p.add_argument("--codebook", required=True)
    p.add_argument("--indices-out", required=True)
    p.add_argument("--distances-out", default=None)
    common(p)

    p = sub.add_parser("cluster", help="cluster a codebook")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--algo", choices=CLUSTER_ALGOS, default="dcpe")
    p.add_argument("--max-cluster-size", type=_positive_int, default=None)
    p.add_argument("--labels-out", required=True)
    p.add_argument("--trace-out", default=None)
    p.add_argument("--max-iters", type=_positive_int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_nonneg_float, default=0.0)
    p.add_argument("--metric", choices=("euclidean", "cosine"), default="euclidean")
    p.add_argument("--literal-sum-argmin", action="store_true",
                   help="argmin over summed (unnormalized) inter-cluster distances")
    common(p)

    p = sub.add_parser("cut", help="derive a coarser assignment from a stored merge trace")
    p.add_argument("--trace", required=True)
    p.add_argument("--n-tokens", type=_positive_int, required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--labels-out", required=True)
    common(p)

    p = sub.add_parser("remap", help="convert token indices to cluster indices")
    p.add_argument("--input", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    common(p)

    p = sub.add_parser("decode", help="replace cluster indices with random member tokens")
    p.add_argument("--input", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    common(p)

    p = sub.add_parser("eval", help="cluster-quality report for an assignment")
    p.add_argument("--input", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--report-out", required=True)
    p.add_argument("--hist-csv-out", default=None,
                   help="optional cluster-size histogram CSV for external plotting")
    common(p)

    p = sub.add_parser("bench", help="wall-clock comparison of clustering algorithms")
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--algos", required=True,
                   help=f"comma-separated ids from {sorted(ALGORITHMS)}")
    p.add_argument("--repeats", type=_positive_int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    common(p)

    return parser


def _cmd_synth(args) -> None:
    dim = args.dim
    spec = SyntheticSpec(
        components=tuple((c, s, n) for c, s, n in args.component), seed=args.seed, dim=dim
    )
    cb = generate_synthetic(spec)
    _ensure_parent(args.out, args.make_parents)
    save_codebook(cb, args.out, format=args.format, float64=args.float64)
    _write_manifest(args.out, "synth", {
        "component": [[c, s, n] for c, s, n in args.component],
        "dim": dim, "seed": args.seed, "format": args.format, "float64": args.float64,
        "out": args.out,
    }, [])


def _cmd_quantize(args) -> None:
    cb = load_codebook(args.codebook)
    queries = load_codebook(args.queries).vectors  # same validation: rank-2 finite floats
    result = quantize(queries, cb)
    params = {"queries": args.queries, "codebook": args.codebook,
              "indices_out": args.indices_out, "distances_out": args.distances_out}
    inputs = [args.queries, args.codebook]
    _save_int32(args.indices_out, result.indices, args.make_parents)
    _write_manifest(args.indices_out, "quantize", params, inputs)
    if args.distances_out:
        _ensure_parent(args.distances_out, args.make_parents)
        np.save(args.distances_out, result.distances.astype(np.float64))
        _write_manifest(args.distances_out, "quantize", params, inputs)


def _cmd_cluster(args) -> None:
    cb = load_codebook(args.input)
    if args.k > cb.n_tokens:
        raise DataError(f"--k {args.k} exceeds codebook size {cb.n_tokens}")
    trace = None
    if args.algo == "dcpe":
        assignment, trace = dcpe_optimized(
            cb, args.k, max_cluster_size=args.max_cluster_size,
            metric=args.metric, literal_sum_argmin=args.literal_sum_argmin)
    elif args.algo == "dcpe-naive":
        assignment, trace = dcpe_naive(cb, args.k, metric=args.metric)
    elif args.algo == "agg-centroid":
        assignment, trace = agglomerative_centroid(cb, args.k, metric=args.metric)
    else:
        config = KMeansConfig(
            k=args.k, max_iters=args.max_iters, seed=args.seed,
            init="plusplus" if args.algo == "kmeanspp" else "random-tokens", tol=args.tol)
        fn = {"kmeans": kmeans, "kmeanspp": kmeans,
              "kmeans-balanced": kmeans_balanced,
              "kmeans-instance": kmeans_instance_distance}[args.algo]
        assignment = fn(cb, config)
    params = {"input": args.input, "k": args.k, "algo": args.algo,
              "max_cluster_size": args.max_cluster_size, "seed": args.seed,
              "max_iters": args.max_iters, "tol": args.tol, "metric": args.metric,
              "literal_sum_argmin": args.literal_sum_argmin,
              "labels_out": args.labels_out, "trace_out": args.trace_out}
    _save_int32(args.labels_out, assignment.labels, args.make_parents)
    _write_manifest(args.labels_out, "cluster", params, [args.input])
    if args.trace_out:
        if trace is None:
            raise DataError(f"algorithm {args.algo!r} does not produce a merge trace")
        _ensure_parent(args.trace_out, args.make_parents)
        with open(args.trace_out, "w") as fh:
            for step in trace.steps:
                fh.write(json.dumps({"a": step.a, "b": step.b, "dist": step.dist}) + "\n")
        _write_manifest(args.trace_out, "cluster", params, [args.input])


def _cmd_cut(args) -> None:
    trace = _load_trace(args.trace)
    assignment = cut_trace(trace, args.n_tokens, args.k)
    _save_int32(args.labels_out, assignment.labels, args.make_parents)
    _write_manifest(args.labels_out, "cut", {
        "trace": args.trace, "n_tokens": args.n_tokens, "k": args.k,
        "labels_out": args.labels_out,
    }, [args.trace])


def _cmd_remap(args) -> None:
    seq = _load_int_vector(args.input, "token sequence")
    assignment = _load_assignment(args.labels)
    out = remap_to_clusters(seq, assignment)
    _save_int32(args.out, out, args.make_parents)
    _write_manifest(args.out, "remap", {
        "input": args.input, "labels": args.labels, "out": args.out,
    }, [args.input, args.labels])


def _cmd_decode(args) -> None:
    seq = _load_int_vector(args.input, "cluster sequence")
    assignment = _load_assignment(args.labels)
    out = decode_random_selection(seq, assignment, args.seed)
    _save_int32(args.out, out, args.make_parents)
    _write_manifest(args.out, "decode", {
        "input": args.input, "labels": args.labels, "seed": args.seed, "out": args.out,
    }, [args.input, args.labels])


def _cmd_eval(args) -> None:
    cb = load_codebook(args.input)
    assignment = _load_assignment(args.labels)
    report = quality_report(cb, assignment)
    params = {"input": args.input, "labels": args.labels,
              "report_out": args.report_out, "hist_csv_out": args.hist_csv_out}
    inputs = [args.input, args.labels]
    _ensure_parent(args.report_out, args.make_parents)
    with open(args.report_out, "w") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args.report_out, "eval", params, inputs)
    if args.hist_csv_out:
        _ensure_parent(args.hist_csv_out, args.make_parents)
        with open(args.hist_csv_out, "w") as fh:
            fh.write("cluster_size,count\n")
            for size, count in sorted(report.size_histogram.items()):
                fh.write(f"{size},{count}\n")
        _write_manifest(args.hist_csv_out, "eval", params, inputs)


def _cmd_bench(args) -> None:
    cb = load_codebook(args.input)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    if not algos:
        raise DataError("--algos is empty")
    if args.k > cb.n_tokens:
        raise DataError(f"--k {args.k} exceeds codebook size {cb.n_tokens}")
    results = run_bench(cb, args.k, algos, repeats=args.repeats, seed=args.seed)
    _ensure_parent(args.out, args.make_parents)
    with open(args.out, "w") as fh:
        for res in results:
            fh.write(json.dumps(res.to_dict()) + "\n")
    _write_manifest(args.out, "bench", {
        "input": args.input, "k": args.k, "algos": algos,
        "repeats": args.repeats, "seed": args.seed, "out": args.out,
    }, [args.input])


_COMMANDS = {
    "synth": _cmd_synth,
    "quantize": _cmd_quantize,
    "cluster": _cmd_cluster,
    "cut": _cmd_cut,
    "remap": _cmd_remap,
    "decode": _cmd_decode,
    "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def main(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _apply_thread_cap(getattr(args, "threads", None))
    try:
        _COMMANDS[args.subcommand](args)
    except DataError as exc:
        print(f"codebook-prior {args.subcommand}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"codebook-prior {args.subcommand}: I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
