"""Finite-difference simulation of dissipative dispersive models on [0, 1]
closed by a boundary condition with fading memory, plus the energy-decay
diagnostics that go with them."""

from ._accel import BACKEND
from .analysis import (DecayFit, DecayModel, EnergySeries, discrete_energy,
                       fit_exponential, fit_polynomial, monotonicity_defect,
                       self_convergence)
from .history import (EtaField, HistorySpec, TraceHistory, boundary_vector,
                      eta_at, eta_init, kdvb_closure, ks_boundary_residual,
                      ks_closure, memory_integrals, update_eta)
from .kernels import (POINCARE_C0, HypothesisCheck, HypothesisReport,
                      KdvbParams, KernelFamily, KsParams, MemoryKernel,
                      check_kdvb_hypotheses, check_ks_hypotheses, kappa,
                      predicted_decay_rate, vartheta)
from .linalg import (PentaLU, PentaMatrix, SingularMatrixError,
                     assemble_system, build_stencils, combine_operators,
                     penta_factor, penta_solve)
from .quadrature import (cumulative_simpson, cumulative_trapezoid,
                         simpson_uniform, trapezoid_uniform)
from .stepper import (DivergenceError, GeneralizedCoeffs, HypothesisError,
                      HypothesisWarning, InitialProfile, Machinery,
                      PicardError, RunResult, SimConfig, SimState, StepError,
                      build_machinery, full_profile, hypothesis_report,
                      init_state, map_coeffs, run, step)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "POINCARE_C0", "__version__",
    "KernelFamily", "MemoryKernel", "KdvbParams", "KsParams",
    "HypothesisCheck", "HypothesisReport",
    "check_kdvb_hypotheses", "check_ks_hypotheses",
    "kappa", "vartheta", "predicted_decay_rate",
    "simpson_uniform", "trapezoid_uniform",
    "cumulative_trapezoid", "cumulative_simpson",
    "PentaMatrix", "PentaLU", "SingularMatrixError",
    "build_stencils", "combine_operators", "assemble_system",
    "penta_factor", "penta_solve",
    "HistorySpec", "TraceHistory", "EtaField",
    "eta_init", "eta_at", "update_eta", "memory_integrals",
    "kdvb_closure", "ks_closure", "ks_boundary_residual", "boundary_vector",
    "GeneralizedCoeffs", "InitialProfile", "SimConfig", "SimState",
    "Machinery", "RunResult", "map_coeffs", "build_machinery", "init_state",
    "step", "run", "full_profile", "hypothesis_report",
    "StepError", "PicardError", "DivergenceError",
    "HypothesisError", "HypothesisWarning",
    "EnergySeries", "DecayFit", "DecayModel", "discrete_energy",
    "fit_exponential", "fit_polynomial", "monotonicity_defect",
    "self_convergence",
]
