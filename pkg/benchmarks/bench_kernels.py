#!/usr/bin/env python3
"""Benchmark the hot numeric kernels: numba backend vs pure-numpy fallback.

Times the three operations that dominate parameter sweeps (displacement into
the vacuum frame, vacuum pair expectation, direct coherent evaluation) on the
order-5 evolved mode polynomials, plus one end-to-end criterion evaluation.

Run:  python3 benchmarks/bench_kernels.py [--repeats N]
The numba column disappears when numba is not importable or when
TRIPHOTON_BACKEND=numpy is set.
"""

import argparse
import math
import time

import numpy as np

from triphoton.criteria import CombinationWeights, compute_S
from triphoton.evolution import EvolutionParams, evolve_mode
from triphoton.kernels import (
    available_backends,
    coherent_eval,
    combine,
    displace,
    vacuum_pair_expectation,
)
from triphoton.states import ModeMomentCache, SeedState


def bench(fn, repeats):
    fn()  # warm-up (numba compilation, caches)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    params = EvolutionParams(xi=1.75e-6, order=5)
    modes = [evolve_mode(k, params) for k in (1, 2, 3)]
    alphas = np.sqrt(4e10) * np.exp(1j * math.pi / 2) * np.ones(3)
    seed = SeedState(tuple(alphas))

    # a representative big combination: u built from all six displaced parts
    displaced = [displace(m.packed, alphas) for m in modes]
    centered = [d.drop_constant() for d in displaced]
    u = combine(centered + [c.dag() for c in centered],
                [1.0, 0.5, 0.5, 1.0, 0.5, 0.5])

    cases = {
        "displace A_k (x3)": lambda b: [displace(m.packed, alphas, backend=b)
                                        for m in modes],
        "vacuum <u u>": lambda b: vacuum_pair_expectation(u, u, backend=b),
        "coherent eval A1": lambda b: coherent_eval(modes[0].packed, alphas,
                                                    backend=b),
        "moment cache": lambda b: ModeMomentCache(modes, seed, backend=b),
    }

    backends = available_backends()
    print(f"backends available: {', '.join(backends)}")
    print(f"{'kernel':<22}" + "".join(f"{b:>14}" for b in backends)
          + (f"{'speedup':>10}" if len(backends) == 2 else ""))
    for name, fn in cases.items():
        times = [bench(lambda: fn(b), args.repeats) for b in backends]
        row = f"{name:<22}" + "".join(f"{t * 1e6:>12.1f}us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.2f}x"
        print(row)

    # end-to-end: one full criterion report (backend fixed by environment)
    w = CombinationWeights.from_beta(math.sqrt(2), thetas=(0, math.pi, math.pi))

    def full():
        from triphoton.states import _cached_moments

        _cached_moments.cache_clear()
        compute_S(w, seed, params)

    t = bench(full, max(1, args.repeats // 10))
    print(f"{'compute_S (uncached)':<22}{t * 1e3:>12.2f}ms")


if __name__ == "__main__":
    main()
