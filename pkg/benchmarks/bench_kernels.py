"""Benchmark the numba kernels against their pure NumPy/Python fallbacks.

Usage:
    python benchmarks/bench_kernels.py [--size small|large] [--repeats N]

The numba path is timed after a warmup call so compilation is excluded.
"""

import argparse
import time

import numpy as np

from panofuse import accel, kernels
from panofuse.mincut import min_cut_grid


def timeit(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(name, fn, repeats, results):
    if not accel.numba_available():
        print(f"{name}: numba unavailable, skipping comparison")
        return
    accel.set_enabled(True)
    fn()  # warm the jit cache
    t_jit = timeit(fn, repeats)
    accel.set_enabled(False)
    t_py = timeit(fn, max(1, repeats // 2))
    accel.set_enabled(True)
    results.append((name, t_py, t_jit))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", choices=("small", "large"), default="small")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    if args.size == "large":
        hw = (960, 1280)
        n_scatter = 2_000_000
        grid = (400, 600)
    else:
        hw = (240, 320)
        n_scatter = 200_000
        grid = (80, 120)

    results = []

    vi = rng.integers(0, hw[0], n_scatter).astype(np.int64)
    ui = rng.integers(0, hw[1], n_scatter).astype(np.int64)
    z = rng.uniform(0.5, 20, n_scatter)
    bench("scatter_min_depth", lambda: kernels.scatter_min_depth(vi, ui, z, hw),
          args.repeats, results)

    sums = np.zeros(hw)
    counts = np.zeros(hw, np.int64)
    bench("scatter_sum_count",
          lambda: kernels.scatter_sum_count(vi, ui, z, sums.copy(), counts.copy()),
          args.repeats, results)

    sparse = np.where(rng.random(hw) < 0.01, rng.uniform(1, 9, hw), 0.0)
    guide = rng.integers(0, 255, hw + (3,)).astype(np.float64)
    bench("guided_fill", lambda: kernels.guided_fill(sparse, guide, 8, 15, 10.0),
          args.repeats, results)

    dense = kernels.guided_fill(sparse, guide, 8, 15, 10.0)
    mask = sparse == 0
    bench("edge_aware_diffuse",
          lambda: kernels.edge_aware_diffuse(dense, guide, mask, 0.2, 10.0, 3),
          args.repeats, results)

    holey = np.where(rng.random(hw) < 0.4, rng.uniform(1, 9, hw), 0.0)
    bench("directional_min_fill",
          lambda: kernels.directional_min_fill(holey, 0, hw[0]),
          args.repeats, results)

    h, w = grid
    right_w = rng.random((h, w - 1))
    down_w = rng.random((h - 1, w))
    forced = np.zeros((h, w), np.uint8)
    forced[:, 0] = 1
    forced[:, -1] = 2
    bench("min_cut_grid", lambda: min_cut_grid(right_w, down_w, forced),
          args.repeats, results)

    print(f"\n{'kernel':24s} {'numpy/python':>14s} {'numba':>12s} {'speedup':>9s}")
    for name, t_py, t_jit in results:
        print(f"{name:24s} {t_py * 1e3:12.2f}ms {t_jit * 1e3:10.2f}ms {t_py / t_jit:8.1f}x")


if __name__ == "__main__":
    main()
