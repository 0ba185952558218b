"""Discrete energy, decay-model fitting, and convergence diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .kernels import MemoryKernel


@dataclass
class EnergySeries:
    """Sampled energy E(t_n) on an increasing time grid."""

    times: np.ndarray
    energies: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=np.float64)
        self.energies = np.asarray(self.energies, dtype=np.float64)
        if self.times.shape != self.energies.shape or self.times.ndim != 1:
            raise ValueError("times and energies must be 1-d of equal length")
        if self.times.size >= 2 and not np.all(np.diff(self.times) > 0.0):
            raise ValueError("times must be strictly increasing")
        if np.any(self.energies < 0.0):
            raise ValueError("energies must be nonnegative")

    def __len__(self) -> int:
        return self.times.size


class DecayModel(str, Enum):
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class DecayFit:
    """Linearized least-squares fit of an energy decay law.

    Exponential: log E = log(amplitude) - rate * t.
    Polynomial:  log E = log(amplitude) - rate * log(1 + t).
    r2 is computed on the transformed (log) ordinates and clamped to
    [0, 1]; degenerate marks a constant series where r2 is undefined.
    """

    model: DecayModel
    rate: float
    amplitude: float
    r2: float
    window: tuple[float, float]
    degenerate: bool = False


def _window_slice(series: EnergySeries,
                  window: Optional[tuple[float, float]]):
    t = series.times
    if t.size < 2:
        raise ValueError("need at least two samples to fit")
    if window is None:
        span = t[-1] - t[0]
        window = (t[0] + 0.2 * span, t[0] + 0.8 * span)
    lo, hi = float(window[0]), float(window[1])
    if not lo < hi:
        raise ValueError("window must satisfy t_lo < t_hi")
    tol = 1e-9 * max(1.0, abs(t[0]), abs(t[-1]))
    if lo < t[0] - tol or hi > t[-1] + tol:
        raise ValueError("window extends beyond the series range")
    mask = (t >= lo - tol) & (t <= hi + tol)
    if np.count_nonzero(mask) < 2:
        raise ValueError("window contains fewer than two samples")
    return mask, (lo, hi)


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_res = float(np.dot(resid, resid))
    dev = y - np.mean(y)
    ss_tot = float(np.dot(dev, dev))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 0.0
    return float(slope), float(intercept), min(1.0, max(0.0, r2))


def _fit(series: EnergySeries, window, model: DecayModel,
         abscissa) -> DecayFit:
    mask, win = _window_slice(series, window)
    e = series.energies[mask]
    if np.any(e <= 0.0):
        raise ValueError("nonpositive energies in the fit window")
    y = np.log(e)
    if np.ptp(y) == 0.0:
        return DecayFit(model, 0.0, float(e[0]), 0.0, win, degenerate=True)
    slope, intercept, r2 = _line_fit(abscissa(series.times[mask]), y)
    return DecayFit(model, -slope, math.exp(intercept), r2, win)


def fit_exponential(series: EnergySeries,
                    window: Optional[tuple[float, float]] = None) -> DecayFit:
    """Least-squares line on (t, log E); rate c and amplitude from the line.

    The default window is the middle 60% of the time range, skipping the
    initial transient and any late floor.
    """
    return _fit(series, window, DecayModel.EXPONENTIAL, lambda t: t)


def fit_polynomial(series: EnergySeries,
                   window: Optional[tuple[float, float]] = None) -> DecayFit:
    """Least-squares line on (log(1+t), log E); rate is the power b1."""
    return _fit(series, window, DecayModel.POLYNOMIAL, np.log1p)


def monotonicity_defect(series: EnergySeries) -> float:
    """Largest relative uptick max_n (E_{n+1} - E_n) / max(E_n, eps).

    Nonpositive means the series never increases. A single-sample series
    has no pairs and reports 0.
    """
    e = series.energies
    if e.size < 2:
        return 0.0
    eps = np.finfo(np.float64).eps
    rel = np.diff(e) / np.maximum(e[:-1], eps)
    return float(np.max(rel))


def discrete_energy(state, kernel: MemoryKernel, dx: float,
                    beta_s: Optional[np.ndarray] = None,
                    include_half_memory: bool = False) -> float:
    """Energy of a state: interior plus near-boundary squares, plus the
    kernel-weighted square of the memory field.

    E = (dx/2) * sum_{i=1}^{M-1} y_i^2 + ds * sum_{i=0}^{L} beta(s_i) eta_i^2.
    The memory sum deliberately carries no 1/2 (that is the printed form
    the series is compared against); include_half_memory restores it.
    """
    fld = state.eta
    if beta_s is None:
        beta_s = kernel.beta(fld.s_grid)
    interior = float(np.dot(state.y, state.y))
    interior += state.y1_node**2 + state.yM1_node**2
    mem = fld.ds * float(np.dot(beta_s, fld.eta**2))
    if include_half_memory:
        mem *= 0.5
    return 0.5 * dx * interior + mem


def self_convergence(cfg, levels: Sequence[int]) -> float:
    """Observed order from a doubling refinement study.

    Each level runs with M = levels[i] and dt scaled so dt*M stays
    constant (anchored at the first level by cfg.dt). Profiles at the
    final time are compared on the nodes of the coarsest grid; the order
    is log2 of the ratio of successive differences over the finest
    triple.
    """
    from dataclasses import replace

    from .stepper import full_profile, run

    levels = [int(m) for m in levels]
    if len(levels) < 3:
        raise ValueError("need at least three refinement levels")
    for a, b in zip(levels, levels[1:]):
        if b != 2 * a:
            raise ValueError("levels must double: got "
                             f"{a} followed by {b}")

    profiles = []
    m0 = levels[0]
    for m in levels:
        cfg_m = replace(cfg, M=m, dt=cfg.dt * m0 / m)
        result = run(cfg_m, snapshot_stride=max(1, cfg_m.steps))
        stride = m // m0
        profiles.append(full_profile(result.final_state)[::stride])

    u0, u1, u2 = profiles[-3], profiles[-2], profiles[-1]
    e1 = float(np.linalg.norm(u0 - u1))
    e2 = float(np.linalg.norm(u1 - u2))
    if e2 == 0.0:
        raise ValueError("refinement differences vanished; study is degenerate")
    return math.log2(e1 / e2)
