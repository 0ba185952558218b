"""Composite quadrature rules on uniform grids."""

from __future__ import annotations

import numpy as np


def simpson_uniform(y: np.ndarray, dx: float) -> float:
    """Composite Simpson rule over uniformly spaced samples.

    With an odd number of panels the last panel is integrated with the
    trapezoid rule, so any sample count >= 2 is accepted.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.size - 1  # panel count
    if n < 1:
        return 0.0
    if n == 1:
        return 0.5 * dx * (y[0] + y[1])
    m = n if n % 2 == 0 else n - 1
    total = y[0] + y[m] + 4.0 * np.sum(y[1:m:2]) + 2.0 * np.sum(y[2:m:2])
    total *= dx / 3.0
    if m != n:
        total += 0.5 * dx * (y[-2] + y[-1])
    return float(total)


def trapezoid_uniform(y: np.ndarray, dx: float) -> float:
    y = np.asarray(y, dtype=np.float64)
    if y.size < 2:
        return 0.0
    return float(dx * (np.sum(y) - 0.5 * (y[0] + y[-1])))


def cumulative_trapezoid(y: np.ndarray, dx: float) -> np.ndarray:
    """Running trapezoid integral; result[0] = 0, same length as y."""
    y = np.asarray(y, dtype=np.float64)
    out = np.empty_like(y)
    out[0] = 0.0
    np.cumsum(0.5 * dx * (y[1:] + y[:-1]), out=out[1:])
    return out


def cumulative_simpson(y: np.ndarray, dx: float) -> np.ndarray:
    """Running integral with Simpson increments over panel pairs.

    Odd-index nodes get the standard three-point half-panel correction,
    so the result is fourth-order accurate at every node. Requires at
    least 3 samples; the trapezoid rule covers a trailing odd panel.
    """
    y = np.asarray(y, dtype=np.float64)
    n = y.size - 1
    if n < 2:
        return cumulative_trapezoid(y, dx)
    out = np.zeros_like(y)
    m = n if n % 2 == 0 else n - 1
    pair = dx / 3.0 * (y[0:m - 1:2] + 4.0 * y[1:m:2] + y[2:m + 1:2])
    half = dx / 12.0 * (5.0 * y[0:m - 1:2] + 8.0 * y[1:m:2] - y[2:m + 1:2])
    out[2:m + 1:2] = np.cumsum(pair)
    out[1:m:2] = out[0:m - 1:2] + half
    if m != n:
        out[-1] = out[-2] + 0.5 * dx * (y[-2] + y[-1])
    return out
