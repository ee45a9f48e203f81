"""Compare the numba and pure-numpy kernel paths.

Usage::

    python3 benchmarks/bench_kernels.py            # kernel micro-benchmarks
    python3 benchmarks/bench_kernels.py --mc       # plus one Monte-Carlo row per backend

The micro-benchmarks call both implementations in-process. The ``--mc``
option re-runs a scenario in a subprocess with ``MWDEP_NUMBA=1`` and
``MWDEP_NUMBA=0`` so the switch goes through the real environment flag.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from mwdep import _kernels


def best_of(fn, repeat=5):
    fn()  # warm-up (includes JIT compilation on first call)
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def kernel_cases(n):
    rng = np.random.default_rng(0)
    x = rng.normal(size=n)
    y = rng.normal(size=(2 * n) // 3)
    bits = (rng.random(n - 1) < 0.5).astype(np.float64)
    return [
        ("rank_counts", lambda: _kernels.rank_counts_numba(x, y), lambda: _kernels.rank_counts_numpy(x, y)),
        ("autocov(L=10)", lambda: _kernels.autocov_numba(x, 10), lambda: _kernels.autocov_numpy(x, 10)),
        ("ar1_chain", lambda: _kernels.ar1_chain_numba(0.3, bits), lambda: _kernels.ar1_chain_numpy(0.3, bits)),
        ("lsv_orbit", lambda: _kernels.lsv_orbit_numba(0.01, 0.25, n, 0), lambda: _kernels.lsv_orbit_numpy(0.01, 0.25, n, 0)),
    ]


MC_SNIPPET = """
import time
from mwdep import BACKEND, named_scenario, run_scenario
run_scenario(named_scenario({name!r}, trials=2, sizes=[[30, 20]]), 0)  # load compiled kernels
s = named_scenario({name!r}, trials={trials}, sizes=[[750, 500]])
t0 = time.perf_counter()
row = run_scenario(s, 7).rows[0]
print(BACKEND, round(time.perf_counter() - t0, 3), row.est_variance, row.rate_1645, row.rate_196)
"""


def run_mc(name, trials):
    for flag in ("1", "0"):
        env = dict(os.environ, MWDEP_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, "-c", MC_SNIPPET.format(name=name, trials=trials)],
            env=env, capture_output=True, text=True, check=True,
        ).stdout.split()
        backend, secs, var, r1, r2 = out
        print(f"  {backend:6s} {float(secs):8.2f} s   var={float(var):.4f} rate_1645={r1} rate_196={r2}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="750,10000,100000")
    ap.add_argument("--mc", action="store_true", help="also time a full scenario under both backends")
    ap.add_argument("--scenario", default="example2")
    ap.add_argument("--trials", type=int, default=500)
    args = ap.parse_args()

    print(f"{'kernel':15s} {'n':>8s} {'numba':>12s} {'numpy':>12s} {'speedup':>8s}")
    for n in (int(v) for v in args.sizes.split(",")):
        for name, fast, slow in kernel_cases(n):
            # the pure-python recursions are slow at large n; fewer repeats there
            t_fast = best_of(fast)
            t_slow = best_of(slow, repeat=3 if n > 50_000 else 5)
            print(f"{name:15s} {n:8d} {t_fast * 1e6:10.1f}us {t_slow * 1e6:10.1f}us {t_slow / t_fast:7.1f}x")

    if args.mc:
        print(f"\nscenario {args.scenario}, {args.trials} trials at (750, 500):")
        run_mc(args.scenario, args.trials)


if __name__ == "__main__":
    main()
