"""Benchmark the numba-jitted kernels against the pure-numpy fallback.

The hot path of a calibration run is the binomial tail evaluation inside
the bound bisection, so the comparison times (a) single tail evaluations
across sizes, (b) full bound inversions, and (c) a Monte-Carlo style burst
of inversions like the guarantee validator issues.

Run directly:  python3 benchmarks/bench_backends.py
"""

from __future__ import annotations

import time

import numpy as np

from selectrisk import _kernels


def _time(fn, repeat: int = 5) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_tail(label, coeffs_fn, tail_fn, m, k, evals=2000):
    lc = coeffs_fn(m, k)
    bs = np.linspace(0.01, 0.99, evals)

    def run():
        for b in bs:
            tail_fn(lc, m, float(b))

    secs = _time(run)
    print(f"  {label:>6}  m={m:<8} k={k:<7} {evals} evals: {secs * 1e3:8.1f} ms")
    return secs


def bench_solve(label, coeffs_fn, solve_fn, m, k, solves=500):
    lc = coeffs_fn(m, k)
    deltas = np.linspace(1e-6, 0.2, solves)

    def run():
        for d in deltas:
            solve_fn(lc, m, float(d), 1e-12, 200)

    secs = _time(run)
    print(f"  {label:>6}  m={m:<8} k={k:<7} {solves} solves: {secs * 1e3:8.1f} ms")
    return secs


def main() -> None:
    print(f"active backend: {_kernels.BACKEND}")
    pairs = [("numpy", _kernels.log_binom_coeffs_numpy,
              _kernels.binom_tail_numpy, _kernels.solve_bisect_numpy)]
    if _kernels.HAS_NUMBA:
        # trigger compilation outside the timed region
        lc = _kernels.log_binom_coeffs_numba(10, 2)
        _kernels.binom_tail_numba(lc, 10, 0.3)
        _kernels.solve_bisect_numba(lc, 10, 0.05, 1e-12, 200)
        pairs.append(("numba", _kernels.log_binom_coeffs_numba,
                      _kernels.binom_tail_numba, _kernels.solve_bisect_numba))
    else:
        print("numba unavailable; timing the numpy fallback only")

    print("\ntail evaluation")
    tails = {}
    for m, k in [(2000, 200), (100000, 5000), (1000000, 50)]:
        for label, cf, tf, _ in pairs:
            tails[(label, m)] = bench_tail(label, cf, tf, m, k)

    print("\nbound inversion (40-step bisection each)")
    solves = {}
    for m, k in [(500, 30), (2000, 200), (100000, 5000)]:
        for label, cf, _, sf in pairs:
            solves[(label, m)] = bench_solve(label, cf, sf, m, k)

    if _kernels.HAS_NUMBA:
        print("\nspeedup (numpy time / numba time)")
        for (label, m), secs in solves.items():
            if label == "numpy":
                print(f"  solve m={m:<8} {secs / solves[('numba', m)]:6.1f}x")


if __name__ == "__main__":
    main()
