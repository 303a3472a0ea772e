#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy/Python fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from qecauth import kernels


def timeit(fn, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_gray(backend):
    rng = np.random.default_rng(1)
    basis = [int(x) for x in rng.integers(0, 1 << 31, size=20)]
    return timeit(lambda: kernels.gray_weight_counts(basis, 31, backend=backend))


def bench_matvec(backend):
    rng = np.random.default_rng(2)
    rows = rng.integers(0, 1 << 42, size=(84, 1), dtype=np.uint64)
    vecs = rng.integers(0, 1 << 42, size=(200_000, 1), dtype=np.uint64)
    return timeit(lambda: kernels.parity_matvec(rows, vecs, backend=backend))


def bench_symplectic(backend):
    def run():
        rng = np.random.default_rng(3)
        return kernels.sample_symplectic_batch(7, 20_000, rng, backend=backend)

    return timeit(run)


def main():
    names = kernels.available_backends()
    print(f"active backend: {kernels.backend_name()}   available: {', '.join(names)}")
    benches = [
        ("gray_weight_counts (2^20 x n=31)", bench_gray),
        ("parity_matvec (200k x 84 rows)", bench_matvec),
        ("symplectic_batch (20k x Sp(14))", bench_symplectic),
    ]
    header = f"{'kernel':<36}" + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, bench in benches:
        times = {}
        outputs = {}
        for n in names:
            t, out = bench(kernels.get_backend(n))
            times[n], outputs[n] = t, out
        if len(names) == 2 and not np.array_equal(outputs[names[0]], outputs[names[1]]):
            raise AssertionError(f"backend outputs differ for {label}")
        row = f"{label:<36}" + "".join(f"{times[n] * 1e3:>10.1f}ms" for n in names)
        if len(names) == 2:
            row += f"{times['python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
