"""Compare the compiled kernels with the pure-Python fallback.

Each mode runs in its own interpreter because RECTPART_DISABLE_NUMBA is read
at import time. Usage: python benchmarks/bench_kernels.py [--n 256] [--m 256]
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
import rectpart
from rectpart import GenSpec, PrefixWorkload, build_prefix_sum, generate, nicol_plus, run_algorithm

n, m, reps = (int(v) for v in sys.argv[1:4])
ps = build_prefix_sum(generate(GenSpec("uniform", n, n, 1.2, seed=0)))
w = PrefixWorkload.from_values(np.random.default_rng(0).integers(1, 1000, size=n * n))
cases = {
    "nicol_plus 1D (n*n tasks)": lambda: nicol_plus(w, m),
    "rect-nicol": lambda: run_algorithm("rect-nicol", ps, m),
    "jag-m-heur-probe": lambda: run_algorithm("jag-m-heur-probe", ps, m),
    "hier-rb": lambda: run_algorithm("hier-rb", ps, m),
    "hier-relaxed": lambda: run_algorithm("hier-relaxed", ps, m),
}
out = {"numba": rectpart.NUMBA_ENABLED, "times": {}}
for name, fn in cases.items():
    fn()  # warm-up: JIT compile or cache load
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out["times"][name] = best
print(json.dumps(out))
"""


def run(disable: bool, n: int, m: int, reps: int) -> dict:
    env = dict(os.environ)
    env.pop("RECTPART_DISABLE_NUMBA", None)
    if disable:
        env["RECTPART_DISABLE_NUMBA"] = "1"
    r = subprocess.run([sys.executable, "-c", WORKER, str(n), str(m), str(reps)],
                       env=env, capture_output=True, text=True, check=True)
    return json.loads(r.stdout)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=128, help="matrix side")
    ap.add_argument("--m", type=int, default=256, help="processor count (a square)")
    ap.add_argument("--reps", type=int, default=3)
    args = ap.parse_args()
    fast = run(False, args.n, args.m, args.reps)
    slow = run(True, args.n, args.m, args.reps)
    print(f"{args.n}x{args.n} uniform, m={args.m}, best of {args.reps}")
    print(f"{'case':<28}{'numba s':>10}{'python s':>12}{'speedup':>10}")
    for name, t in fast["times"].items():
        s = slow["times"][name]
        print(f"{name:<28}{t:>10.4f}{s:>12.4f}{s / t:>9.1f}x")


if __name__ == "__main__":
    main()
