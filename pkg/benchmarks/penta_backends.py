"""Timing comparison of the pentadiagonal LU backends.

Runs factor + solve on identical random diagonally dominant systems with
the compiled kernels (when numba is active) and with the plain-Python
fallback, and prints the per-size timings and speedup. Invoke as

    python3 benchmarks/penta_backends.py [--sizes 1000,10000,100000]
"""

import argparse
import time

import numpy as np

from memwave._accel import (BACKEND, factor_kernel, factor_python,
                            solve_kernel, solve_python)
from memwave.linalg import PIVOT_RTOL, PentaMatrix


def random_system(rng, n):
    a = PentaMatrix.zeros(n)
    a.bands[:] = rng.uniform(-1.0, 1.0, (5, n))
    a.bands[0, :2] = 0.0
    a.bands[1, :1] = 0.0
    a.bands[3, -1:] = 0.0
    a.bands[4, -2:] = 0.0
    row_off = np.abs(a.bands[[0, 1, 3, 4]]).sum(axis=0)
    a.bands[2] = row_off + rng.uniform(0.5, 1.5, n)
    return a, rng.standard_normal(n)


def run_once(factor, solve, a, b):
    n = a.n
    w = np.zeros((n, 7))
    for o in range(-2, 3):
        w[:, o + 2] = a.bands[o + 2]
    lfac = np.zeros((n, 2))
    piv = np.arange(n, dtype=np.int64)
    tol = PIVOT_RTOL * float(np.max(np.abs(a.bands)))
    t0 = time.perf_counter()
    bad = factor(w, lfac, piv, tol)
    work = b.copy()
    x = np.empty_like(work)
    solve(w, lfac, piv, work, x)
    elapsed = time.perf_counter() - t0
    assert bad < 0
    return elapsed, x


def best_of(factor, solve, a, b, repeats):
    times = []
    result = None
    for _ in range(repeats):
        elapsed, result = run_once(factor, solve, a, b)
        times.append(elapsed)
    return min(times), result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="1000,10000,100000",
                        help="comma list of system sizes")
    parser.add_argument("--repeats", type=int, default=5,
                        help="repetitions per size (best is kept)")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(7)

    if BACKEND != "numba":
        print("note: compiled backend unavailable "
              "(numba missing or MEMWAVE_NO_NUMBA set); "
              "both columns run the Python loops")

    # warm the JIT outside the timed region
    a_small, b_small = random_system(rng, 64)
    run_once(factor_kernel, solve_kernel, a_small, b_small)

    print(f"{'n':>8}  {'python':>12}  {BACKEND:>12}  {'speedup':>8}")
    for n in sizes:
        a, b = random_system(rng, n)
        t_py, x_py = best_of(factor_python, solve_python, a, b, args.repeats)
        t_kn, x_kn = best_of(factor_kernel, solve_kernel, a, b, args.repeats)
        assert np.array_equal(x_py, x_kn), "backends disagree"
        print(f"{n:>8}  {t_py:>11.6f}s  {t_kn:>11.6f}s  {t_py / t_kn:>7.1f}x")


if __name__ == "__main__":
    main()
