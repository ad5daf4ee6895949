"""Compare the compiled and numpy kernels on the largest off-diagonal search.

    python benchmarks/bench_kernel.py --sizes 100,200,500 --repeat 5
"""

import argparse
import sys
import time

import numpy as np

from corrmax import kernels
from corrmax.corr_core import standardize_rows
from corrmax.distributions import StandardNormal
from corrmax.mc_harness import McConfig, run_replications


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="100,200,500", help="n = p values")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--block", type=int, default=64)
    ap.add_argument("--reps", type=int, default=50, help="replications for the end-to-end timing")
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; only the numpy kernel is available", file=sys.stderr)
    rng = np.random.default_rng(0)
    names = sorted(backends)
    print(f"{'n=p':>6} " + " ".join(f"{k + ' ms':>14}" for k in names) + f" {'agree':>6}")
    for size in (int(s) for s in args.sizes.split(",")):
        z, _ = standardize_rows(rng.standard_normal((size, size)))
        row, results = [], []
        for name in names:
            fn = backends[name]
            results.append(fn(z, args.block))
            row.append(1e3 * best_of(lambda: fn(z, args.block), args.repeat))
        agree = all(r[1:] == results[0][1:] and abs(r[0] - results[0][0]) < 1e-12 for r in results)
        print(f"{size:>6} " + " ".join(f"{t:>14.3f}" for t in row) + f" {str(agree):>6}")

    print()
    print(f"end-to-end test_stat replications/s at n = p = 200 ({args.reps} reps)")
    cfg = McConfig(dist=StandardNormal(), n=200, p=200, reps=args.reps, seed=1)
    for name in names:
        kernels.max_abs_offdiag = backends[name]
        t = best_of(lambda: run_replications(cfg), 1)
        print(f"  {name:<10} {args.reps / t:8.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
