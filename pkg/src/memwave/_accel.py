"""Backend selection for the banded LU hot loops.

The factorization and solve below are plain-Python loop implementations;
when numba is importable (and MEMWAVE_NO_NUMBA is unset) they are wrapped
with @njit and used as the default backend. The untouched Python versions
stay importable for the fallback path and for benchmarking.
"""

from __future__ import annotations

import os


def _factor_impl(w, lfac, piv, tol):
    # Row-aligned band layout: w[i, c] holds A[i, i - 2 + c], c = 0..6.
    # Restricted partial pivoting over the kl=2 subdiagonal rows; U fill
    # is bounded by offsets <= +4, which the 7-slot rows accommodate.
    n = w.shape[0]
    for k in range(n):
        reach = n - 1 - k
        if reach > 2:
            reach = 2
        best = abs(w[k, 2])
        d = 0
        for t in range(1, reach + 1):
            v = abs(w[k + t, 2 - t])
            if v > best:
                best = v
                d = t
        if best < tol:
            return k
        if d > 0:
            r = k + d
            for c in range(5):
                tmp = w[k, 2 + c]
                w[k, 2 + c] = w[r, 2 - d + c]
                w[r, 2 - d + c] = tmp
        piv[k] = k + d
        for t in range(1, reach + 1):
            m = w[k + t, 2 - t] / w[k, 2]
            lfac[k, t - 1] = m
            w[k + t, 2 - t] = 0.0
            for c in range(1, 5):
                w[k + t, 2 - t + c] -= m * w[k, 2 + c]
    return -1


def _solve_impl(w, lfac, piv, b, x):
    n = w.shape[0]
    for k in range(n):
        r = piv[k]
        if r != k:
            tmp = b[k]
            b[k] = b[r]
            b[r] = tmp
        reach = n - 1 - k
        if reach > 2:
            reach = 2
        for t in range(1, reach + 1):
            b[k + t] -= lfac[k, t - 1] * b[k]
    for i in range(n - 1, -1, -1):
        acc = b[i]
        cmax = n - 1 - i
        if cmax > 4:
            cmax = 4
        for c in range(1, cmax + 1):
            acc -= w[i, 2 + c] * x[i + c]
        x[i] = acc / w[i, 2]


factor_python = _factor_impl
solve_python = _solve_impl

BACKEND = "numpy"
factor_kernel = _factor_impl
solve_kernel = _solve_impl

if os.environ.get("MEMWAVE_NO_NUMBA", "") in ("", "0"):
    try:
        from numba import njit
    except ImportError:
        pass
    else:
        factor_kernel = njit(cache=True)(_factor_impl)
        solve_kernel = njit(cache=True)(_solve_impl)
        BACKEND = "numba"
