"""Memory state: boundary-trace history, the history variable eta,
quadrature of the memory integrals, and the per-step boundary closures."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .kernels import KdvbParams, KsParams, MemoryKernel
from .quadrature import cumulative_simpson, simpson_uniform

_SIN_LABEL = re.compile(r"^sin\(t\)/(\d+(?:\.\d+)?)$")


@dataclass(eq=False)
class HistorySpec:
    """Prescribed trace history y1(t), t >= 0, with its antiderivative.

    ``exact_integral`` is the closed-form running integral of y1 when one
    is known; otherwise a fine-grid composite-Simpson table is built on
    first use over the requested range. Instances compare by label, so
    that two specs built from the same config text are equal.
    """

    label: str
    func: Callable[[np.ndarray], np.ndarray]
    exact_integral: Optional[Callable[[np.ndarray], np.ndarray]] = None
    is_zero: bool = False
    _table: Optional[tuple[np.ndarray, np.ndarray]] = field(
        default=None, repr=False, compare=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, HistorySpec) and self.label == other.label

    def __hash__(self) -> int:
        return hash(("HistorySpec", self.label))

    @classmethod
    def zero(cls) -> "HistorySpec":
        return cls("0", lambda t: np.zeros_like(np.asarray(t, dtype=np.float64)),
                   lambda t: np.zeros_like(np.asarray(t, dtype=np.float64)),
                   is_zero=True)

    @classmethod
    def sine_over(cls, denom: float) -> "HistorySpec":
        label = f"sin(t)/{denom:g}"
        return cls(label,
                   lambda t: np.sin(t) / denom,
                   lambda t: (1.0 - np.cos(t)) / denom)

    @classmethod
    def from_label(cls, label: str) -> "HistorySpec":
        text = label.strip()
        if text in ("0", "zero"):
            return cls.zero()
        m = _SIN_LABEL.match(text)
        if m:
            return cls.sine_over(float(m.group(1)))
        raise ValueError(
            f"unknown trace history {label!r}; use '0' or 'sin(t)/<denom>'")

    def ensure_range(self, s_max: float) -> None:
        if self.exact_integral is not None or self.is_zero:
            return
        if self._table is not None and self._table[0][-1] >= s_max:
            return
        n_fine = 2 * max(1, int(math.ceil(s_max / (2.0 * 2.44140625e-4))))
        grid = np.linspace(0.0, s_max, n_fine + 1)
        vals = cumulative_simpson(self.func(grid), grid[1] - grid[0])
        self._table = (grid, vals)

    def antiderivative(self, tau) -> np.ndarray:
        """Running integral of y1 from 0 to tau (tau >= 0, scalar or array)."""
        tau = np.asarray(tau, dtype=np.float64)
        if self.is_zero:
            return np.zeros_like(tau)
        if self.exact_integral is not None:
            return self.exact_integral(tau)
        self.ensure_range(float(np.max(tau, initial=0.0)))
        return np.interp(tau, self._table[0], self._table[1])


class TraceHistory:
    """Append-only series of the boundary trace d_x y(0, t_j) and its
    running trapezoidal integral A(t_j). Grows by doubling; a run of
    more than 10^6 steps is rejected upstream."""

    def __init__(self, dt: float, y1: HistorySpec, capacity: int = 256):
        if dt <= 0.0:
            raise ValueError("dt must be positive")
        self.dt = dt
        self.y1 = y1
        self._values = np.zeros(max(2, capacity))
        self._cumulative = np.zeros(max(2, capacity))
        self.count = 0

    @property
    def values(self) -> np.ndarray:
        return self._values[: self.count]

    @property
    def cumulative(self) -> np.ndarray:
        return self._cumulative[: self.count]

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.count) * self.dt

    def append(self, v: float) -> None:
        if self.count == self._values.size:
            self._values = np.concatenate([self._values,
                                           np.zeros(self._values.size)])
            self._cumulative = np.concatenate([self._cumulative,
                                               np.zeros(self._cumulative.size)])
        j = self.count
        self._values[j] = v
        if j == 0:
            self._cumulative[j] = 0.0
        else:
            self._cumulative[j] = (self._cumulative[j - 1]
                                   + 0.5 * self.dt * (self._values[j - 1] + v))
        self.count += 1


def eta_at(th: TraceHistory, t_n: float, s) -> np.ndarray:
    """History variable eta(t_n, s) = integral of the trace over [t_n - s, t_n].

    For s <= t_n this is A(t_n) - A(t_n - s) with A linearly interpolated
    between recorded times; for s > t_n the prescribed history continues
    the integral: A(t_n) + integral of y1 over [0, s - t_n].
    """
    s = np.asarray(s, dtype=np.float64)
    if np.any(s < 0.0):
        raise ValueError("s must be nonnegative")
    j = int(round(t_n / th.dt)) if th.dt > 0 else 0
    if not (0 <= j < th.count and abs(t_n - j * th.dt) <= 1e-9 * max(th.dt, 1.0)):
        raise ValueError(f"t={t_n} is not a recorded time")
    tj = th.times
    a = th.cumulative
    a_t = a[j]
    out = np.empty_like(s)
    past = s <= t_n
    out[past] = a_t - np.interp(t_n - s[past], tj, a)
    out[~past] = a_t + th.y1.antiderivative(s[~past] - t_n)
    return out


@dataclass
class EtaField:
    """Samples of eta(t, s_i) on the uniform s-grid s_i = i*ds, i = 0..L."""

    s_grid: np.ndarray
    eta: np.ndarray
    t: float

    @property
    def ds(self) -> float:
        return float(self.s_grid[1] - self.s_grid[0])

    @property
    def s_f(self) -> float:
        return float(self.s_grid[-1])


def eta_init(y1: HistorySpec, s_grid: np.ndarray) -> EtaField:
    """Initial field eta(0, s) = integral of y1 over [0, s]."""
    s_grid = np.asarray(s_grid, dtype=np.float64)
    y1.ensure_range(float(s_grid[-1]))
    eta = y1.antiderivative(s_grid)
    eta[0] = 0.0
    return EtaField(s_grid, eta, 0.0)


def update_eta(fld: EtaField, th: TraceHistory, t_new: float) -> EtaField:
    """Refresh the field in place so eta[i] = eta_at(th, t_new, s_i).

    The trace value at t_new must already be appended. eta(t, 0) = 0
    holds exactly after every update.
    """
    fld.eta = eta_at(th, t_new, fld.s_grid)
    fld.eta[0] = 0.0
    fld.t = t_new
    return fld


def memory_integrals(kernel: MemoryKernel, fld: EtaField, th: TraceHistory,
                     t_np1: float,
                     beta_s: Optional[np.ndarray] = None) -> tuple[float, float, float]:
    """The three pieces balancing the discrete memory condition at t_{n+1}.

    I_eta: composite-Simpson integral of beta(s) * eta(t_n, s) over the
    s-grid; the field is used as-is, one step behind t_{n+1} (lagged,
    explicit-in-memory evaluation).
    S_hist: sum_{i=1}^{n+1} alpha(i dt) * trace(t_{n+1} - i dt) * dt over
    recorded trace values (the i = 0 term holds the unknown and is left
    to the closures).
    I_tail: Simpson integral of alpha(s) * y1(s - t_{n+1}) over
    [t_{n+1}, s_f]; exactly zero for y1 = 0.
    """
    if beta_s is None:
        beta_s = kernel.beta(fld.s_grid)
    i_eta = simpson_uniform(beta_s * fld.eta, fld.ds)

    dt = th.dt
    n_plus_1 = int(round(t_np1 / dt))
    if not (1 <= n_plus_1 <= th.count and
            abs(t_np1 - n_plus_1 * dt) <= 1e-9 * max(dt, 1.0)):
        raise ValueError(f"t={t_np1} is not the next time level")
    i_max = min(n_plus_1, int(fld.s_f / dt + 1e-12))
    if i_max >= 1:
        i = np.arange(1, i_max + 1)
        s_hist = dt * float(np.dot(kernel.alpha(i * dt),
                                   th.values[n_plus_1 - i]))
    else:
        s_hist = 0.0

    i_tail = 0.0
    tau_max = fld.s_f - t_np1
    if not th.y1.is_zero and tau_max > 0.0:
        panels = max(2, int(math.ceil(tau_max / fld.ds)))
        tau = np.linspace(0.0, tau_max, panels + 1)
        i_tail = simpson_uniform(kernel.alpha(tau + t_np1) * th.y1.func(tau),
                                 tau_max / panels)
    return i_eta, s_hist, i_tail


def kdvb_closure(kernel: MemoryKernel, p: KdvbParams, fld: EtaField,
                 th: TraceHistory, t_np1: float, dx: float, dt: float,
                 mem: Optional[tuple[float, float, float]] = None
                 ) -> tuple[float, float]:
    """Near-boundary values (y_1, y_{M-1}) at t_{n+1} from the memory balance.

    Solving the i = 0 term of the discretized convolution for the trace
    gives y_1; substituting the reconstituted memory integral into the
    x = 1 condition gives y_{M-1}.
    """
    i_eta, s_hist, i_tail = mem if mem is not None else memory_integrals(
        kernel, fld, th, t_np1)
    a00 = kernel.d2  # alpha(0)
    y1 = (2.0 * dx) / (a00 * dt) * (i_eta - s_hist - i_tail)
    full_mem = a00 * (y1 / (2.0 * dx)) * dt + s_hist + i_tail
    y_m1 = -p.w4 * y1 - 2.0 * dx * full_mem
    return y1, y_m1


def ks_closure(kernel: MemoryKernel, p: KsParams, fld: EtaField,
               th: TraceHistory, t_np1: float, dx: float, dt: float,
               mem: Optional[tuple[float, float, float]] = None
               ) -> tuple[float, float, float]:
    """Near-boundary values (y_1, y_{-1}, y_{M-1} = 0) at t_{n+1} for KS.

    The trace jump q = y_1 - y_{-1} follows from the memory balance as in
    the KdVB case; combining it with the discrete second-derivative
    condition at x = 0 yields y_1 = ((2 + n3 dx)/4) q + (dx^2/2) I_mem,
    then y_{-1} = y_1 - q. The x = 1 conditions pin y_{M-1} = 0.
    """
    i_eta, s_hist, i_tail = mem if mem is not None else memory_integrals(
        kernel, fld, th, t_np1)
    a00 = kernel.d2
    q = (2.0 * dx) / (a00 * dt) * (i_eta - s_hist - i_tail)
    if p.n3 * dx + 2.0 == 0.0:
        raise ZeroDivisionError("degenerate closure prefactor n3*dx + 2 = 0")
    i_mem = a00 * (q / (2.0 * dx)) * dt + s_hist + i_tail
    y1 = (2.0 + p.n3 * dx) / 4.0 * q + 0.5 * dx**2 * i_mem
    y_minus1 = y1 - q
    return y1, y_minus1, 0.0


def ks_boundary_residual(p: KsParams, y1: float, y_minus1: float,
                         i_mem: float, dx: float) -> float:
    """Back-substituted residual of the discrete memory condition at x = 0."""
    return ((y_minus1 + y1) / dx**2
            - p.n3 * (y1 - y_minus1) / (2.0 * dx) - i_mem)


def boundary_vector(coeffs, n: int, y1: float, yM1: float, y_minus1: float,
                    dx: float, dt: float) -> np.ndarray:
    """Stencil taps at nodes 1 and M-1, scaled like the interior operators.

    Each derivative-order tap carries its coefficient a_j and the
    Crank-Nicolson dt/2, matching the interior blocks of the per-step
    system (the raw tap stencils alone would be inconsistent with the
    assembled operators). The ghost value y_{-1} never reaches an
    interior row; it is accepted for signature symmetry with the KS
    closure. n is the interior dimension M-3 (>= 5).
    """
    if n < 5:
        raise ValueError("interior dimension must be at least 5")
    f = np.zeros(n)
    half_dt = 0.5 * dt
    f[0] = half_dt * (coeffs.a1 * (-0.5 * y1 / dx)
                      + coeffs.a2 * (y1 / dx**2)
                      + coeffs.a3 * (y1 / dx**3)
                      + coeffs.a4 * (-4.0 * y1 / dx**4))
    f[1] = half_dt * (coeffs.a3 * (-0.5 * y1 / dx**3)
                      + coeffs.a4 * (y1 / dx**4))
    f[n - 2] = half_dt * (coeffs.a3 * (0.5 * yM1 / dx**3)
                          + coeffs.a4 * (yM1 / dx**4))
    f[n - 1] = half_dt * (coeffs.a1 * (0.5 * yM1 / dx)
                          + coeffs.a2 * (yM1 / dx**2)
                          + coeffs.a3 * (-yM1 / dx**3)
                          + coeffs.a4 * (-4.0 * yM1 / dx**4))
    return f
