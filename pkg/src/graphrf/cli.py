"""Command-line surface: extract, bench, compare-labelings, train,
gridcheck.

Every command writes a JSON manifest (command, parameters, seed, package
version, wall-clock seconds, output paths, active kernel implementation)
so runs can be reproduced.  Reports are CSV with fixed column orders
documented per command.  Exit codes: 0 success, 1 for a failed
verification (gridcheck mismatch), 2 for usage or input errors.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import __version__, kernels
from .datasets import (
    generate_grid,
    generate_preferential_attachment,
    generate_random_powerlaw,
    load_tu_dataset,
    write_tensor_file,
)
from .errors import BadParamsError, GraphError
from .labeling import get_procedure
from .labeling_eval import compare_labelings, sample_neighborhood_collection
from .neuralnet import TrainConfig, cross_validate, save_checkpoint, train
from .patchy import graph_to_tensors, receptive_field, verify_grid_equivalence


def _write_manifest(path, command, params, outputs, seed, seconds):
    manifest = {
        "command": command,
        "params": params,
        "seed": seed,
        "version": __version__,
        "wall_clock_seconds": round(seconds, 6),
        "outputs": [str(p) for p in outputs],
        "implementation": kernels.IMPL_NAME,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _params(args):
    skip = {"func"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _open_out(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


# ---------------------------------------------------------------- extract

def cmd_extract(args):
    t0 = time.perf_counter()
    bundle = load_tu_dataset(args.data, args.name)
    if args.w == "avg":
        w = int(round(float(np.mean([g.node_count for g in bundle.graphs]))))
    else:
        w = int(args.w)
        if w < 1:
            raise BadParamsError(f"--w must be >= 1, got {w}")
    proc = get_procedure(args.labeling)
    batches = [graph_to_tensors(g, proc, w, args.stride, args.k)
               for g in bundle.graphs]
    write_tensor_file(args.out, batches)
    labels_out = args.labels_out or f"{args.out}.labels"
    with open(labels_out, "w") as fh:
        for y in bundle.class_labels:
            fh.write(f"{int(y)}\n")
    outputs = [args.out, labels_out]
    manifest = args.manifest or f"{args.out}.manifest.json"
    _write_manifest(manifest, "extract", _params(args), outputs, None,
                    time.perf_counter() - t0)
    print(f"wrote {len(batches)} graphs (w={w}, k={args.k}) to {args.out}")
    return 0


# ------------------------------------------------------------------ bench

class _TimedProc:
    """Labeling procedure wrapper accumulating call time."""

    def __init__(self, proc):
        self.proc = proc
        self.name = proc.name
        self.seconds = 0.0

    def __call__(self, g):
        t0 = time.perf_counter()
        out = self.proc(g)
        self.seconds += time.perf_counter() - t0
        return out


def _bench_graph(kind, n, seed):
    if kind in ("torus", "grid"):
        side = int(round(n ** 0.5))
        return generate_grid(side, side, torus=(kind == "torus")), side * side
    if kind == "random":
        return generate_random_powerlaw(n, 3, seed), n
    if kind == "preferential":
        return generate_preferential_attachment(n, 3, seed), n
    raise BadParamsError(f"unknown graph kind {kind!r}")


def cmd_bench(args):
    t0 = time.perf_counter()
    kernels.set_impl(args.impl)
    try:
        g, n = _bench_graph(args.graph, args.n, args.seed)
        proc = _TimedProc(get_procedure(args.labeling, seed=args.seed))
        canon_acc = [0.0]
        orig = kernels.canonical_search

        def timed_canonical(*a):
            t = time.perf_counter()
            out = orig(*a)
            canon_acc[0] += time.perf_counter() - t
            return out

        kernels.canonical_search = timed_canonical
        fields = 0
        t_start = time.perf_counter()
        try:
            while True:
                for v in range(g.node_count):
                    receptive_field(g, v, proc, args.k)
                    fields += 1
                    if fields % 256 == 0 and \
                            time.perf_counter() - t_start >= args.seconds:
                        break
                else:
                    if time.perf_counter() - t_start < args.seconds:
                        continue
                break
        finally:
            kernels.canonical_search = orig
        elapsed = time.perf_counter() - t_start
    finally:
        kernels.set_impl("auto")

    rate = fields / elapsed if elapsed > 0 else float("inf")
    out, close = _open_out(args.out)
    try:
        out.write("graph,n,k,labeling,impl,fields,seconds,fields_per_sec,"
                  "labeling_seconds,canonical_seconds\n")
        out.write(f"{args.graph},{n},{args.k},{args.labeling},"
                  f"{kernels.get_impl(args.impl).IMPL_NAME},{fields},"
                  f"{elapsed:.4f},{rate:.2f},{proc.seconds:.4f},"
                  f"{canon_acc[0]:.4f}\n")
    finally:
        if close:
            out.close()
    outputs = [args.out] if args.out and args.out != "-" else []
    manifest = args.manifest or "bench.manifest.json"
    _write_manifest(manifest, "bench", _params(args), outputs, args.seed,
                    time.perf_counter() - t0)
    return 0


# ----------------------------------------------------- compare-labelings

def cmd_compare_labelings(args):
    t0 = time.perf_counter()
    if args.pairs < 1:
        raise BadParamsError(f"--pairs must be >= 1, got {args.pairs}")
    if args.samples < 1:
        raise BadParamsError(f"--samples must be >= 1, got {args.samples}")
    bundle = load_tu_dataset(args.data, args.name)
    collection = sample_neighborhood_collection(
        bundle.graphs, args.k, args.samples, args.seed)
    procs = [get_procedure(name, seed=args.seed)
             for name in ("wl", "degree", "betweenness", "random")]
    reports = compare_labelings(collection, procs, args.pairs, args.seed)
    out, close = _open_out(args.out)
    try:
        out.write("name,theta_hat,N,seed\n")
        for r in reports:
            out.write(f"{r.labeling_name},{r.theta_hat:.6f},"
                      f"{r.pair_count},{r.seed}\n")
    finally:
        if close:
            out.close()
    outputs = [args.out] if args.out and args.out != "-" else []
    manifest = args.manifest or "compare_labelings.manifest.json"
    _write_manifest(manifest, "compare-labelings", _params(args), outputs,
                    args.seed, time.perf_counter() - t0)
    return 0


# ------------------------------------------------------------------ train

def _read_labels(path):
    labels = []
    with open(path) as fh:
        for i, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                labels.append(int(line))
            except ValueError:
                raise BadParamsError(
                    f"{path}:{i + 1}: labels must be integers, "
                    f"got {line!r}") from None
    return np.array(labels, dtype=np.int64)


def cmd_train(args):
    from .datasets import read_tensor_file
    t0 = time.perf_counter()
    batches, header = read_tensor_file(args.tensors)
    labels = _read_labels(args.labels)
    if len(labels) != len(batches):
        raise BadParamsError(
            f"{len(labels)} labels for {len(batches)} tensor graphs")
    config = TrainConfig(epochs=args.epochs, batch_size=args.batch,
                         seed=args.seed, merge_edges=args.merge_edges,
                         learning_rate=args.lr, dropout=args.dropout)
    report = cross_validate(batches, labels, config, folds=args.folds,
                            repeats=args.repeats, kind=args.model)
    model, _ = train(batches, labels, config, kind=args.model)
    checkpoint = args.checkpoint or f"{args.model}.ckpt"
    save_checkpoint(checkpoint, model)

    out, close = _open_out(args.out)
    try:
        out.write("record,repeat,fold,value\n")
        for i, acc in enumerate(report.accuracies):
            rep, fold = divmod(i, report.folds)
            out.write(f"accuracy,{rep},{fold},{acc:.6f}\n")
        out.write(f"mean,,,{report.mean:.6f}\n")
        out.write(f"std,,,{report.std:.6f}\n")
        out.write(f"seconds,,,{report.seconds:.3f}\n")
    finally:
        if close:
            out.close()
    outputs = [checkpoint] + \
        ([args.out] if args.out and args.out != "-" else [])
    manifest = args.manifest or f"{checkpoint}.manifest.json"
    _write_manifest(manifest, "train", _params(args), outputs, args.seed,
                    time.perf_counter() - t0)
    print(f"cv mean accuracy {report.mean:.4f} +/- {report.std:.4f} "
          f"({report.folds} folds x {report.repeats} repeats)",
          file=sys.stderr)
    return 0


# -------------------------------------------------------------- gridcheck

def cmd_gridcheck(args):
    t0 = time.perf_counter()
    report = verify_grid_equivalence(args.rows, args.cols, args.m,
                                     args.stride)
    manifest = args.manifest or "gridcheck.manifest.json"
    _write_manifest(manifest, "gridcheck", _params(args), [], None,
                    time.perf_counter() - t0)
    if report.match:
        perm = " ".join(str(int(x)) for x in report.permutation)
        print(f"pass: {report.field_count} fields match under slot "
              f"permutation [{perm}]")
        return 0
    print(f"fail: no single slot permutation maps all "
          f"{report.field_count} fields onto their patches")
    return 1


# ------------------------------------------------------------------ main

def build_parser():
    parser = argparse.ArgumentParser(
        prog="graphrf",
        description="Receptive-field extraction, labeling comparison, "
                    "and training on graph benchmarks.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="dataset to tensor file")
    p.add_argument("--data", required=True, help="TU dataset directory")
    p.add_argument("--name", required=True, help="dataset name prefix")
    p.add_argument("--labeling", default="wl",
                   choices=["wl", "degree", "betweenness"])
    p.add_argument("--w", default="avg",
                   help="fields per graph, or 'avg' for the rounded "
                        "mean node count")
    p.add_argument("--k", type=int, required=True, help="slots per field")
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--out", required=True, help="tensor file path")
    p.add_argument("--labels-out", default=None,
                   help="class label file (default: OUT.labels)")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("bench", help="receptive fields per second")
    p.add_argument("--graph", default="torus",
                   choices=["torus", "random", "preferential", "grid"])
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--labeling", default="wl",
                   choices=["wl", "degree", "betweenness"])
    p.add_argument("--seconds", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--impl", default="auto",
                   choices=["auto", "compiled", "python"])
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("compare-labelings",
                       help="theta-hat estimates per labeling")
    p.add_argument("--data", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_compare_labelings)

    p = sub.add_parser("train", help="cross-validate and checkpoint")
    p.add_argument("--tensors", required=True, help="tensor file")
    p.add_argument("--labels", required=True,
                   help="text file, one integer class per graph")
    p.add_argument("--model", default="pscn", choices=["pscn", "pslr"])
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch", type=int, default=25)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--dropout", type=float, default=0.5)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--merge-edges", action="store_true",
                   help="add the edge-tensor branch")
    p.add_argument("--checkpoint", default=None,
                   help="model output (default: MODEL.ckpt)")
    p.add_argument("--out", default="-", help="CV report CSV destination")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gridcheck",
                       help="receptive fields vs image patches")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_gridcheck)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GraphError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
