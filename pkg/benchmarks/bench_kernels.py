"""Benchmark the compiled stencil kernels against the NumPy fallback.

Usage: python benchmarks/bench_kernels.py [--points N] [--steps K] [--repeat R]
"""

import argparse
import time

import numpy as np

from timecloak.kernels import _fallback

try:
    from timecloak.kernels import _core
except ImportError:
    _core = None


def bench(fn, args, steps, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for _ in range(steps):
            fn(*args)
        best = min(best, (time.perf_counter() - start) / steps)
    return best


def make_cases(n):
    rng = np.random.default_rng(42)
    u1, p1, o1 = (rng.standard_normal(n) for _ in range(3))
    shape = (n, n)
    u2, p2, o2 = (rng.standard_normal(shape) for _ in range(3))
    cgx1 = 0.2 * rng.standard_normal(n)
    big_a1 = 1.0 - cgx1**2
    lapc1 = rng.standard_normal(n)
    cgx2 = 0.2 * rng.standard_normal(shape)
    cgy2 = 0.2 * rng.standard_normal(shape)
    big_a2 = 1.0 - cgx2**2 - cgy2**2
    lapc2 = rng.standard_normal(shape)
    return [
        ("leapfrog_step_1d", (o1, u1, p1, 0.81)),
        ("leapfrog_step_2d", (o2, u2, p2, 0.4, 0.4)),
        ("transformed_step_1d",
         (o1, u1, p1, big_a1, cgx1, lapc1, 1.0, 1e-3, 2.0 / n, 1)),
        ("transformed_step_2d",
         (o2, u2, p2, big_a2, cgx2, cgy2, lapc2, 1.0, 1e-3, 2.0 / n, 2.0 / n, 1)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=513)
    parser.add_argument("--steps", type=int, default=50)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _core is None:
        print("compiled backend unavailable; benchmarking fallback only")

    print(f"{'kernel':<22} {'numpy (ms)':>12} {'cython (ms)':>12} {'speedup':>9}")
    for name, call_args in make_cases(args.points):
        t_py = bench(getattr(_fallback, name), call_args, args.steps, args.repeat)
        if _core is not None:
            t_c = bench(getattr(_core, name), call_args, args.steps, args.repeat)
            print(f"{name:<22} {1e3 * t_py:>12.3f} {1e3 * t_c:>12.3f} "
                  f"{t_py / t_c:>8.1f}x")
        else:
            print(f"{name:<22} {1e3 * t_py:>12.3f} {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
