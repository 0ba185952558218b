"""Crank-Nicolson time integration of the generalized model: coefficient
mapping, per-step Picard iteration with frozen boundary closures, and the
run driver that records energy, trace, and snapshot series."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .history import (EtaField, HistorySpec, TraceHistory, boundary_vector,
                      eta_init, kdvb_closure, ks_boundary_residual,
                      ks_closure, memory_integrals, update_eta)
from .kernels import (HypothesisReport, KdvbParams, KsParams, MemoryKernel,
                      check_kdvb_hypotheses, check_ks_hypotheses)
from .linalg import (PentaLU, PentaMatrix, assemble_system, build_stencils,
                     penta_factor, penta_solve)

MAX_STEPS = 1_000_000


class StepError(RuntimeError):
    """A time step failed; carries the step index and simulation time."""

    def __init__(self, message: str, step: int, t: float):
        super().__init__(message)
        self.step = step
        self.t = t


class PicardError(StepError):
    def __init__(self, step: int, t: float, iterations: int, residual: float):
        super().__init__(
            f"Picard iteration did not converge at step {step} (t={t:g}): "
            f"residual {residual:.3e} after {iterations} iterations",
            step, t)
        self.iterations = iterations
        self.residual = residual


class DivergenceError(StepError):
    def __init__(self, step: int, t: float):
        super().__init__(
            f"solution became non-finite at step {step} (t={t:g})", step, t)


class HypothesisError(RuntimeError):
    """Raised under strict mode when the model hypotheses fail."""

    def __init__(self, report: HypothesisReport):
        names = ", ".join(c.name for c in report.violations)
        super().__init__(f"hypothesis check failed: {names}")
        self.report = report


class HypothesisWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GeneralizedCoeffs:
    """Coefficients (a1..a5) of d_t y + a1 d_x y + a2 d_x^2 y + a3 d_x^3 y
    + a4 d_x^4 y + a5 y d_x y = 0."""

    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 0.0
    a5: float = 0.0


def map_coeffs(params: Union[KdvbParams, KsParams]) -> GeneralizedCoeffs:
    """Embed a model's parameters into the generalized form.

    Matching terms: the KdVB coefficients enter as (a1, a2, a3, a5) =
    (w2, -w0, w1, w3) with a4 = 0; the fourth-order model enters as
    (a2, a4, a5) = (n2, n0, n1) with a1 = a3 = 0.
    """
    if isinstance(params, KdvbParams):
        return GeneralizedCoeffs(a1=params.w2, a2=-params.w0, a3=params.w1,
                                 a4=0.0, a5=params.w3)
    if isinstance(params, KsParams):
        return GeneralizedCoeffs(a1=0.0, a2=params.n2, a3=0.0,
                                 a4=params.n0, a5=params.n1)
    raise TypeError(f"unsupported parameter set {type(params).__name__}")


_PROFILES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "0": lambda x: np.zeros_like(x),
    "1-cos(2*pi*x)": lambda x: 1.0 - np.cos(2.0 * np.pi * x),
    "sin(pi*x)": lambda x: np.sin(np.pi * x),
    "x*(1-x)": lambda x: x * (1.0 - x),
}


@dataclass(eq=False)
class InitialProfile:
    """Initial condition y(x, 0) on [0, 1], vanishing at both endpoints.

    Compares by label so two profiles built from the same config text
    are equal.
    """

    label: str
    func: Callable[[np.ndarray], np.ndarray]

    def __eq__(self, other) -> bool:
        return isinstance(other, InitialProfile) and self.label == other.label

    def __hash__(self) -> int:
        return hash(("InitialProfile", self.label))

    @classmethod
    def from_label(cls, label: str) -> "InitialProfile":
        text = label.strip()
        if text == "zero":
            text = "0"
        if text not in _PROFILES:
            known = ", ".join(sorted(_PROFILES))
            raise ValueError(f"unknown initial profile {label!r}; one of: {known}")
        return cls(text, _PROFILES[text])


@dataclass
class SimConfig:
    """Full description of one simulation.

    Space grid: M intervals on [0, 1], dx = 1/M, unknowns at interior
    nodes k = 2..M-2. Memory grid: L intervals of width ds, s_f = L*ds.
    """

    model: str
    params: Union[KdvbParams, KsParams]
    kernel: MemoryKernel
    M: int
    dt: float
    T: float
    L: int
    ds: float
    y0: InitialProfile
    y1: HistorySpec
    picard_tol: float = 1e-10
    picard_max: int = 50
    strict_hypotheses: bool = False

    def __post_init__(self):
        if self.model not in ("kdvb", "ks"):
            raise ValueError(f"unknown model {self.model!r}; use 'kdvb' or 'ks'")
        want = KdvbParams if self.model == "kdvb" else KsParams
        if not isinstance(self.params, want):
            raise ValueError(
                f"model {self.model!r} needs {want.__name__} parameters")
        self.M = int(self.M)
        self.L = int(self.L)
        self.picard_max = int(self.picard_max)
        self.dt = float(self.dt)
        self.T = float(self.T)
        self.ds = float(self.ds)
        self.picard_tol = float(self.picard_tol)
        if self.M < 8:
            raise ValueError("M must be at least 8")
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.T < 0.0:
            raise ValueError("T must be nonnegative")
        if self.L < 2:
            raise ValueError("L must be at least 2")
        if self.ds <= 0.0:
            raise ValueError("ds must be positive")
        if self.picard_tol <= 0.0:
            raise ValueError("picard_tol must be positive")
        if self.picard_max < 1:
            raise ValueError("picard_max must be at least 1")
        if self.steps > MAX_STEPS:
            raise ValueError(
                f"{self.steps} steps exceeds the cap of {MAX_STEPS}")

    @property
    def dx(self) -> float:
        return 1.0 / self.M

    @property
    def s_f(self) -> float:
        return self.L * self.ds

    @property
    def steps(self) -> int:
        """Number of time steps covering [0, T].

        T/dt is rounded when it is within 1e-9 of an integer; otherwise
        a partial final step is not taken for T < dt and the count is
        rounded up beyond that.
        """
        if self.T <= 0.0:
            return 0
        r = self.T / self.dt
        k = round(r)
        if abs(r - k) <= 1e-9 * max(1.0, r):
            return int(k)
        if r < 1.0:
            return 0
        return int(math.ceil(r))

    @property
    def s_grid(self) -> np.ndarray:
        return np.arange(self.L + 1) * self.ds

    @property
    def x_grid(self) -> np.ndarray:
        return np.arange(self.M + 1) * self.dx


@dataclass
class SimState:
    """Solution state at time level n.

    y holds the interior unknowns (nodes 2..M-2); the near-boundary
    values y1_node, yM1_node and the ghost y_minus1_node come from the
    closures. trace and eta are shared, single-writer memory state.
    """

    y: np.ndarray
    y1_node: float
    yM1_node: float
    y_minus1_node: float
    trace: TraceHistory
    eta: EtaField
    n: int = 0
    picard_iters: int = 0
    picard_residual: float = 0.0
    boundary_residual: float = 0.0

    @property
    def t(self) -> float:
        return self.n * self.trace.dt


@dataclass
class Machinery:
    """Per-run immutable solve apparatus: stencils, system, LU, kernel table."""

    coeffs: GeneralizedCoeffs
    stencils: tuple[PentaMatrix, PentaMatrix, PentaMatrix, PentaMatrix]
    lhs: PentaMatrix
    rhs: PentaMatrix
    lu: PentaLU
    beta_s: np.ndarray


def hypothesis_report(cfg: SimConfig) -> HypothesisReport:
    if cfg.model == "kdvb":
        return check_kdvb_hypotheses(cfg.kernel, cfg.params)
    return check_ks_hypotheses(cfg.kernel, cfg.params)


def build_machinery(cfg: SimConfig) -> Machinery:
    coeffs = map_coeffs(cfg.params)
    stencils = build_stencils(cfg.M, cfg.dx)
    lhs, rhs = assemble_system(coeffs, cfg.dt, stencils)
    lu = penta_factor(lhs)
    return Machinery(coeffs, stencils, lhs, rhs, lu, cfg.kernel.beta(cfg.s_grid))


def init_state(cfg: SimConfig) -> SimState:
    """State at t = 0: profile sampled on the grid, trace seeded with the
    ghost-zero difference quotient, eta seeded from the prescribed history."""
    y_all = np.asarray(cfg.y0.func(cfg.x_grid), dtype=np.float64)
    y = y_all[2:cfg.M - 1].copy()
    y1_node = float(y_all[1])
    yM1_node = float(y_all[cfg.M - 1])
    trace = TraceHistory(cfg.dt, cfg.y1)
    trace.append(y1_node / (2.0 * cfg.dx))
    eta = eta_init(cfg.y1, cfg.s_grid)
    return SimState(y=y, y1_node=y1_node, yM1_node=yM1_node,
                    y_minus1_node=0.0, trace=trace, eta=eta, n=0)


def _nonlinear_term(yh: np.ndarray, y1_half: float, yM1_half: float,
                    dx: float) -> np.ndarray:
    """Midpoint advection y * D1 y with closure values in the edge rows."""
    ext = np.empty(yh.size + 2)
    ext[0] = y1_half
    ext[1:-1] = yh
    ext[-1] = yM1_half
    return yh * (ext[2:] - ext[:-2]) / (2.0 * dx)


def step(state: SimState, cfg: SimConfig, mach: Machinery) -> SimState:
    """Advance one time level.

    The boundary closures for t_{n+1} are computed once from the lagged
    memory state and frozen; Picard then iterates the interior solve on
    w ~ y^{n+1} with the midpoint nonlinear term until the relative
    update norm drops below picard_tol.
    """
    n_new = state.n + 1
    t_new = n_new * cfg.dt
    dx, dt = cfg.dx, cfg.dt
    coeffs = mach.coeffs

    mem = memory_integrals(cfg.kernel, state.eta, state.trace, t_new,
                           mach.beta_s)
    _, s_hist, i_tail = mem
    a00 = cfg.kernel.d2
    if cfg.model == "kdvb":
        y1_new, yM1_new = kdvb_closure(cfg.kernel, cfg.params, state.eta,
                                       state.trace, t_new, dx, dt, mem)
        ym1_new = 0.0
        v_new = y1_new / (2.0 * dx)
        full_mem = a00 * v_new * dt + s_hist + i_tail
        b_res = (-yM1_new / (2.0 * dx) - cfg.params.w4 * v_new - full_mem)
    else:
        y1_new, ym1_new, yM1_new = ks_closure(cfg.kernel, cfg.params,
                                              state.eta, state.trace, t_new,
                                              dx, dt, mem)
        v_new = (y1_new - ym1_new) / (2.0 * dx)
        i_mem = a00 * v_new * dt + s_hist + i_tail
        b_res = ks_boundary_residual(cfg.params, y1_new, ym1_new, i_mem, dx)
    if not (math.isfinite(y1_new) and math.isfinite(yM1_new)
            and math.isfinite(ym1_new)):
        raise DivergenceError(n_new, t_new)

    n_int = state.y.size
    f_n = boundary_vector(coeffs, n_int, state.y1_node, state.yM1_node,
                          state.y_minus1_node, dx, dt)
    f_np1 = boundary_vector(coeffs, n_int, y1_new, yM1_new, ym1_new, dx, dt)
    rhs_const = mach.rhs.matvec(state.y) - f_n - f_np1
    y1_half = 0.5 * (state.y1_node + y1_new)
    yM1_half = 0.5 * (state.yM1_node + yM1_new)

    w = state.y.copy()
    residual = math.inf
    corrections = 0
    for solve_idx in range(1, cfg.picard_max + 1):
        if coeffs.a5 != 0.0:
            yh = 0.5 * (w + state.y)
            rhs = rhs_const - dt * coeffs.a5 * _nonlinear_term(
                yh, y1_half, yM1_half, dx)
        else:
            rhs = rhs_const
        w_new = penta_solve(mach.lu, rhs)
        if not np.all(np.isfinite(w_new)):
            raise DivergenceError(n_new, t_new)
        residual = (np.linalg.norm(w_new - w)
                    / max(np.linalg.norm(w_new), 1.0))
        w = w_new
        corrections = solve_idx - 1
        if residual <= cfg.picard_tol:
            break
    else:
        raise PicardError(n_new, t_new, cfg.picard_max, residual)

    state.trace.append(v_new)
    update_eta(state.eta, state.trace, t_new)
    return SimState(y=w, y1_node=y1_new, yM1_node=yM1_new,
                    y_minus1_node=ym1_new, trace=state.trace, eta=state.eta,
                    n=n_new, picard_iters=corrections,
                    picard_residual=residual, boundary_residual=b_res)


def full_profile(state: SimState) -> np.ndarray:
    """Solution on all M+1 nodes; the pinned endpoints are exact zeros."""
    return np.concatenate(([0.0, state.y1_node], state.y,
                           [state.yM1_node, 0.0]))


@dataclass
class RunResult:
    config: SimConfig
    times: np.ndarray
    energies: np.ndarray
    snapshots: list[tuple[float, np.ndarray]]
    trace_rows: np.ndarray
    boundary_residuals: np.ndarray
    hypothesis: HypothesisReport
    max_picard_iters: int
    final_state: SimState

    @property
    def max_boundary_residual(self) -> float:
        if self.boundary_residuals.size == 0:
            return 0.0
        return float(np.max(np.abs(self.boundary_residuals)))


def run(cfg: SimConfig, snapshot_stride: Optional[int] = None) -> RunResult:
    """Integrate from t = 0 to T, recording energy at every level.

    Snapshots are kept at multiples of snapshot_stride (default: about
    fifty per run) plus the final level. Under strict_hypotheses a failed
    hypothesis check aborts; otherwise it warns and runs anyway.
    """
    from .analysis import discrete_energy

    report = hypothesis_report(cfg)
    if not report.passed:
        if cfg.strict_hypotheses:
            raise HypothesisError(report)
        names = ", ".join(c.name for c in report.violations)
        warnings.warn(f"model hypotheses not satisfied ({names}); "
                      "decay guarantees do not apply", HypothesisWarning)

    steps = cfg.steps
    if snapshot_stride is None:
        snapshot_stride = max(1, steps // 50)
    if snapshot_stride < 1:
        raise ValueError("snapshot_stride must be at least 1")

    mach = build_machinery(cfg)
    state = init_state(cfg)

    times = np.arange(steps + 1) * cfg.dt
    energies = np.empty(steps + 1)
    residuals = np.empty(steps)
    trace_rows = np.empty((steps + 1, 4))
    snapshots: list[tuple[float, np.ndarray]] = [(0.0, full_profile(state))]
    max_iters = 0

    energies[0] = discrete_energy(state, cfg.kernel, cfg.dx,
                                  beta_s=mach.beta_s)
    trace_rows[0] = (0.0, state.trace.values[0], state.y1_node,
                     state.yM1_node)
    for n in range(steps):
        state = step(state, cfg, mach)
        energies[state.n] = discrete_energy(state, cfg.kernel, cfg.dx,
                                            beta_s=mach.beta_s)
        residuals[n] = state.boundary_residual
        trace_rows[state.n] = (state.t, state.trace.values[state.n],
                               state.y1_node, state.yM1_node)
        max_iters = max(max_iters, state.picard_iters)
        if state.n % snapshot_stride == 0 and state.n != steps:
            snapshots.append((state.t, full_profile(state)))
    if steps > 0:
        snapshots.append((times[-1], full_profile(state)))

    return RunResult(config=cfg, times=times, energies=energies,
                     snapshots=snapshots, trace_rows=trace_rows,
                     boundary_residuals=residuals, hypothesis=report,
                     max_picard_iters=max_iters, final_state=state)
