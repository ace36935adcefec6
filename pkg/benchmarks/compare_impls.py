"""Compare the compiled and pure-Python kernels on shared workloads.

Times the four kernel entry points in isolation and the full per-root
pipeline end to end, on a torus and a power-law graph.  Run from the
repository root:

    python3 benchmarks/compare_impls.py [--seconds 1.0]
"""

import argparse
import time

import numpy as np

from graphrf import kernels
from graphrf.datasets import generate_grid, generate_random_powerlaw
from graphrf.labeling import WlColors
from graphrf.patchy import receptive_field


def time_call(fn, seconds):
    """Repeat fn until `seconds` elapse; returns calls per second."""
    fn()  # warm up
    count = 0
    t0 = time.perf_counter()
    while True:
        fn()
        count += 1
        elapsed = time.perf_counter() - t0
        if elapsed >= seconds:
            return count / elapsed


def kernel_tasks(g, k, rng):
    impl = kernels  # resolved through the dispatch module
    roots = rng.integers(0, g.node_count, size=64)
    nodes, layers = impl.bfs_ball(g.indptr, g.indices, int(roots[0]), k)
    init = np.zeros(g.node_count, dtype=np.int64)
    sub_ip, sub_ix = impl.induced_csr(g.indptr, g.indices, nodes)
    prior = np.sort(rng.integers(0, 4, size=len(nodes)))

    def run_bfs():
        for r in roots:
            impl.bfs_ball(g.indptr, g.indices, int(r), k)

    def run_induce():
        for _ in range(64):
            impl.induced_csr(g.indptr, g.indices, nodes)

    def run_wl():
        impl.wl_refine(sub_ip, sub_ix, np.zeros(len(nodes), dtype=np.int64),
                       -1)

    def run_wl_full():
        impl.wl_refine(g.indptr, g.indices, init, 2)

    def run_canon():
        for _ in range(16):
            impl.canonical_search(g.indptr, g.indices, nodes, prior)

    return [("bfs_ball x64", run_bfs),
            ("induced_csr x64", run_induce),
            ("wl_refine ball", run_wl),
            ("wl_refine graph (2 passes)", run_wl_full),
            ("canonical_search x16", run_canon)]


def pipeline_task(g, k):
    proc = WlColors()
    roots = list(range(0, g.node_count, max(1, g.node_count // 64)))[:64]

    def run():
        for v in roots:
            receptive_field(g, v, proc, k)

    return [("receptive_field x64", run)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seconds", type=float, default=1.0,
                    help="time budget per measurement")
    ap.add_argument("--n", type=int, default=10000)
    ap.add_argument("--k", type=int, default=10)
    args = ap.parse_args()

    graphs = [("torus", generate_grid(int(round(args.n ** 0.5)),
                                      int(round(args.n ** 0.5)),
                                      torus=True)),
              ("powerlaw", generate_random_powerlaw(args.n, 3, 0))]
    impls = ["python"]
    try:
        kernels.get_impl("compiled")
        impls.append("compiled")
    except ImportError:
        print("note: compiled extension not built, timing pure only")

    print(f"{'graph':<10} {'task':<28} " +
          " ".join(f"{name + ' /s':>14}" for name in impls) +
          f" {'speedup':>8}")
    for gname, g in graphs:
        rng = np.random.default_rng(0)
        for tname, _ in kernel_tasks(g, args.k, rng):
            rates = []
            for impl_name in impls:
                kernels.set_impl(impl_name)
                rng = np.random.default_rng(0)
                tasks = dict(kernel_tasks(g, args.k, rng) +
                             pipeline_task(g, args.k))
                rates.append(time_call(tasks[tname], args.seconds))
            kernels.set_impl("auto")
            cols = " ".join(f"{r:>14.1f}" for r in rates)
            ratio = f"{rates[-1] / rates[0]:>7.1f}x" if len(rates) == 2 \
                else "      --"
            print(f"{gname:<10} {tname:<28} {cols} {ratio}")
        for tname, _ in pipeline_task(g, args.k):
            rates = []
            for impl_name in impls:
                kernels.set_impl(impl_name)
                tasks = dict(pipeline_task(g, args.k))
                rates.append(time_call(tasks[tname], args.seconds))
            kernels.set_impl("auto")
            cols = " ".join(f"{r:>14.1f}" for r in rates)
            ratio = f"{rates[-1] / rates[0]:>7.1f}x" if len(rates) == 2 \
                else "      --"
            print(f"{gname:<10} {tname:<28} {cols} {ratio}")


if __name__ == "__main__":
    main()
