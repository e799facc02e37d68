"""Benchmark the numba hot kernels against their pure-numpy fallbacks.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from multibump import kernels
from multibump.grid import Grid
from multibump.groundstate import Nonlinearity, compute_ground_state


def timeit(fn, *args, repeat=5):
    fn(*args)                       # warm-up (JIT compilation for numba)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"active backend: {kernels.BACKEND}")
    if kernels.BACKEND != "numba":
        print("numba unavailable; timing the numpy path against itself")

    rows = []

    u1 = rng.standard_normal(200_001)
    u2 = rng.standard_normal((1501, 1501))
    rows.append(("laplacian 1d (2e5)",
                 timeit(kernels.laplacian, u1, 0.05),
                 timeit(kernels._laplacian_1d_numpy, u1, 0.05)))
    rows.append(("laplacian 2d (1501^2)",
                 timeit(kernels.laplacian, u2, 0.05),
                 timeit(kernels._laplacian_2d_numpy, u2, 0.05)))

    coords = rng.uniform(-50, 50, size=(500_000, 2))
    centers = rng.uniform(-30, 30, size=(5, 2))
    rows.append(("envelope_sum (5e5 x 5)",
                 timeit(kernels.envelope_sum, coords, centers, 0.75),
                 timeit(kernels._envelope_sum_numpy, coords, centers, 0.75)))

    gs = compute_ground_state(Nonlinearity(3.0), 1)
    grid = Grid(dim=1, half_width=60.0, spacing=0.01)
    args = (grid.coords(), centers[:, :1].copy(),
            float(gs.r_table[1] - gs.r_table[0]),
            np.ascontiguousarray(gs.spline_coefficients()), gs.r_max,
            gs.decay_amplitude, gs.decay_rate, gs.tail_exponent)
    rows.append(("radial_translate_sum (1.2e4 x 5)",
                 timeit(kernels.radial_translate_sum, *args),
                 timeit(kernels._radial_translate_sum_numpy, *args)))

    print(f"{'kernel':35s} {'active':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name, fast, slow in rows:
        print(f"{name:35s} {fast * 1e3:9.2f}ms {slow * 1e3:9.2f}ms "
              f"{slow / fast:7.1f}x")


if __name__ == "__main__":
    main()
