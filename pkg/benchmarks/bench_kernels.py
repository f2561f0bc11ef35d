"""Time the numba and numpy pairwise-reduction backends side by side.

Usage: python benchmarks/bench_kernels.py [--reps 50]

The numpy path multiplies through BLAS and materializes the n x n Gram
matrix; the numba path is a fused jitted loop with O(1) extra memory.
Which one wins depends on n, p and the BLAS build, so measure before
pinning SPHEREUNI_BACKEND.
"""

import argparse
import time

import numpy as np

from sphereuni._kernels import pairwise_reduce_numba, pairwise_reduce_numpy


def bench(fn, rows, reps):
    fn(rows)  # warm-up (jit compile / BLAS thread spin-up)
    start = time.perf_counter()
    for _ in range(reps):
        fn(rows)
    return (time.perf_counter() - start) / reps


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=50)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    shapes = [(100, 100), (100, 400), (200, 200), (500, 100), (1000, 50), (2000, 100)]

    print(f"{'n':>6} {'p':>6} {'numpy (ms)':>12} {'numba (ms)':>12} {'numpy/numba':>12}")
    for n, p in shapes:
        z = rng.standard_normal((n, p))
        rows = z / np.linalg.norm(z, axis=1)[:, None]
        t_np = bench(pairwise_reduce_numpy, rows, args.reps)
        a = pairwise_reduce_numpy(rows)
        if pairwise_reduce_numba is None:
            print(f"{n:>6} {p:>6} {t_np * 1e3:>12.3f} {'n/a':>12} {'n/a':>12}")
            continue
        t_nb = bench(pairwise_reduce_numba, rows, args.reps)
        b = pairwise_reduce_numba(rows)
        worst = max(
            abs(x - y) / max(1e-30, abs(x)) for x, y in zip(a, b)
        )
        assert worst < 1e-9, f"backends disagree at ({n},{p}): {worst:.2e}"
        print(
            f"{n:>6} {p:>6} {t_np * 1e3:>12.3f} {t_nb * 1e3:>12.3f} {t_np / t_nb:>12.2f}"
        )


if __name__ == "__main__":
    main()
