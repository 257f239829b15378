"""Compare the numba and numpy Newton kernels on fuzz-sized systems.

    python benchmarks/bench_newton.py [--starts 256] [--repeat 5]

Both backends run the same starts.  The "mask" column counts starts on which
they agree about convergence; far from any root, rounding differences between
the kernels can flip a few.  The "exact" column runs the full search with each
backend and checks that the verified fixed points coincide.
"""

import argparse
import random
import time

import numpy as np

from nilmap._newton import compile_system, newton_multistart, numba_enabled, random_starts
from nilmap.fixedpoints import fixed_point_search
from nilmap.fuzz import generate_nilpotent
from nilmap.polymap import PolyMap


def _systems():
    rng = random.Random("bench")
    out = []
    for family in ("strict-triangular", "conjugated-triangular", "homogeneous", "two-form"):
        for n in (2, 3, 4):
            N, _ = generate_nilpotent(family, n, 3, rng)
            out.append((f"{family} n={n}", N, compile_system(N - PolyMap.identity(N.ring))))
    return out


def _time(system, starts, backend, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = newton_multistart(system, starts, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--starts", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if numba_enabled() else [])
    if "numba" in backends:  # compile outside the timed region
        _, _, warm = _systems()[0]
        newton_multistart(warm, random_starts(0, 2, warm.n), backend="numba")
    print(f"{'system':32} " + " ".join(f"{b:>10}" for b in backends) + "   speedup     mask  exact")
    totals = dict.fromkeys(backends, 0.0)
    for label, N, system in _systems():
        starts = random_starts(1, args.starts, system.n)
        times, results = {}, {}
        for b in backends:
            times[b], results[b] = _time(system, starts, b, args.repeat)
            totals[b] += times[b]
        agree = ""
        speed = ""
        if len(backends) == 2:
            same = int(np.sum(results["numpy"][1] == results["numba"][1]))
            exact = fixed_point_search(N, backend="numpy").exact == \
                fixed_point_search(N, backend="numba").exact
            agree = f"{same:4d}/{len(starts):<4d} {'yes' if exact else 'NO'}"
            speed = f"{times['numpy'] / times['numba']:8.1f}x"
        print(f"{label:32} " + " ".join(f"{times[b] * 1e3:8.1f}ms" for b in backends) + f"  {speed}  {agree}")
    print(f"{'total':32} " + " ".join(f"{totals[b] * 1e3:8.1f}ms" for b in backends))


if __name__ == "__main__":
    main()
