"""Timing comparison of the compiled and numpy kernel backends.

Runs the two hot paths in the package -- batched 5x5 boundary solves and
wavefunction synthesis on a spatial grid -- through both kernel modules and
prints a small table.  Usage: ``python3 benchmarks/bench_backends.py``.
"""
import time

import numpy as np

from czscatter._backend import load_kernels


def bench(label, func, repeats=5):
    # one warmup, then best-of-n wall time
    func()
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    print(f"  {label:<34s} {best * 1e3:9.2f} ms")
    return best


def main():
    rng = np.random.default_rng(7)
    n = 200_000
    g1 = rng.uniform(0.0, 2.0e3, n)
    g2 = rng.uniform(0.0, 2.0e3, n)
    x2 = rng.uniform(0.3, 8.0, n)
    x3 = x2 + rng.uniform(0.3, 8.0, n)
    k = rng.uniform(0.2, 4.0, n)

    m = 2_000
    kq = np.linspace(0.7, 1.3, m)
    coeff = np.exp(1j * rng.uniform(0.0, 2 * np.pi, m)) / m
    grid = np.linspace(-140.0, 1.5 * np.pi, 4_000)

    results = {}
    for name in ("cython", "python"):
        try:
            kernels = load_kernels(name)
        except ImportError:
            print(f"{name}: extension not importable, skipped")
            continue
        print(f"{name} backend ({kernels.__name__})")
        results[name, "solve"] = bench(
            f"solve_mirrored n={n}",
            lambda: kernels.solve_mirrored(g1, g2, x2, x3, k),
        )
        ampsq, _ = kernels.solve_mirrored(
            np.full(m, 1.0e3), np.full(m, 1.0e3), np.full(m, np.pi),
            np.full(m, 1.5 * np.pi), kq,
        )
        results[name, "synthesize"] = bench(
            f"synthesize m={m} on {grid.size} pts",
            lambda: kernels.synthesize(coeff, kq, ampsq, np.pi, 1.5 * np.pi, grid),
        )

    if ("cython", "solve") in results and ("python", "solve") in results:
        for op in ("solve", "synthesize"):
            ratio = results["python", op] / results["cython", op]
            print(f"{op}: compiled backend is {ratio:.1f}x faster")


if __name__ == "__main__":
    main()
