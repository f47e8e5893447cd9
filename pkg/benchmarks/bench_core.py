"""Compare the compiled and pure-Python kernels on the hot paths.

    python3 benchmarks/bench_core.py [--repeat 3]
"""
import argparse
import time

import numpy as np

from palab import kernels
from palab.exact import exact_pa, exact_pa_boundary
from palab.graphs import ReplacementWorkspace, mst_edges
from palab.instances import gen_uniform


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def cases():
    dense = gen_uniform(1, 0, 1500, 2, 1.0)
    sparse = gen_uniform(2, 0, 20_000, 2, 1.0)
    small = [gen_uniform(3, k, 8, 2, 2.0) for k in range(20)]
    rep = gen_uniform(4, 0, 4096, 2, 1.0)
    rng = np.random.default_rng(0)
    swaps = [(int(v), rng.random(2)) for v in rng.choice(4096, 50, replace=False)]

    def replacement(backend):
        ws = ReplacementWorkspace(rep.points, backend=backend)
        for v, q in swaps:
            ws.totals(v, q, 1.0)

    return [
        ("prim dense, n=1500", lambda b: mst_edges(dense.points, backend=b)),
        ("prim kNN, n=20000", lambda b: mst_edges(sparse.points, backend=b)),
        ("branch and bound, 20 x n=8", lambda b: [exact_pa(i, backend=b) for i in small]),
        ("boundary b&b, 20 x n=8", lambda b: [exact_pa_boundary(i, backend=b) for i in small]),
        ("50 replacements, n=4096", replacement),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "cython" not in kernels.BACKENDS:
        print("compiled core not built; only the Python kernels are available")
    names = [b for b in ("cython", "python") if b in kernels.BACKENDS]
    print(f"{'case':32s}" + "".join(f"{n:>12s}" for n in names) + (f"{'speedup':>10s}" if len(names) == 2 else ""))
    for label, fn in cases():
        times = [best_of(lambda: fn(kernels.BACKENDS[n]), args.repeat) for n in names]
        row = f"{label:32s}" + "".join(f"{t * 1e3:10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:9.1f}x"
        print(row, flush=True)


if __name__ == "__main__":
    main()
