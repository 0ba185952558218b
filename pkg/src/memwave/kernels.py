"""Memory kernels, model parameters, and dissipativity constants.

The boundary damping is driven by a convolution kernel alpha(s) from one of
two families (exponential or polynomial decay). This module owns the kernel
algebra (beta = -alpha', the rate function xi, the weighted mass alpha0),
the hypothesis checks that guarantee energy decay for each model, and the
computable margins kappa (KdVB) and vartheta (KS) together with the
conservative exponential-rate predictor available in the smooth-diffusion
branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

ArrayLike = Union[float, np.ndarray]

#: Sharp Poincare constant for H_0^1(0,1): ||v||^2 <= c0 ||v_x||^2.
POINCARE_C0 = 1.0 / math.pi**2


class KernelFamily(str, Enum):
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class MemoryKernel:
    """Convolution kernel alpha(s) with closed-form derived quantities.

    Exponential family: alpha(s) = d2 * exp(-d1 * s), d1 > 0.
    Polynomial family:  alpha(s) = d2 * (1 + s)**(-d1), d1 > 1.
    Both families require d2 > 0, so alpha(0) = d2 > 0 and alpha is
    strictly decreasing to zero.
    """

    family: KernelFamily
    d1: float
    d2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.d1) and math.isfinite(self.d2)):
            raise ValueError("kernel parameters must be finite")
        if self.d2 <= 0.0:
            raise ValueError("kernel amplitude d2 must be positive")
        if self.family == KernelFamily.EXPONENTIAL:
            if self.d1 <= 0.0:
                raise ValueError("exponential kernel requires d1 > 0")
        elif self.family == KernelFamily.POLYNOMIAL:
            if self.d1 <= 1.0:
                raise ValueError("polynomial kernel requires d1 > 1")
        else:  # pragma: no cover - enum exhausts the families
            raise ValueError(f"unknown kernel family: {self.family}")

    def alpha(self, s: ArrayLike) -> ArrayLike:
        """Kernel value alpha(s) for s >= 0."""
        if self.family == KernelFamily.EXPONENTIAL:
            return self.d2 * np.exp(-self.d1 * s)
        return self.d2 * (1.0 + np.asarray(s, dtype=np.float64)) ** (-self.d1)

    def beta(self, s: ArrayLike) -> ArrayLike:
        """beta(s) = -alpha'(s), the positive history-space weight."""
        if self.family == KernelFamily.EXPONENTIAL:
            return self.d1 * self.d2 * np.exp(-self.d1 * s)
        return (
            self.d1
            * self.d2
            * (1.0 + np.asarray(s, dtype=np.float64)) ** (-self.d1 - 1.0)
        )

    def beta_prime(self, s: ArrayLike) -> ArrayLike:
        """Analytic beta'(s), used by the decay-sandwich diagnostics."""
        if self.family == KernelFamily.EXPONENTIAL:
            return -(self.d1**2) * self.d2 * np.exp(-self.d1 * s)
        return (
            -self.d1
            * (self.d1 + 1.0)
            * self.d2
            * (1.0 + np.asarray(s, dtype=np.float64)) ** (-self.d1 - 2.0)
        )

    def xi(self, s: ArrayLike) -> ArrayLike:
        """Decay-rate function xi(s) with -xi0*beta <= beta' <= -xi*beta."""
        if self.family == KernelFamily.EXPONENTIAL:
            return np.full_like(np.asarray(s, dtype=np.float64), self.d1)
        return self.d1 / (1.0 + np.asarray(s, dtype=np.float64))

    @property
    def xi0(self) -> float:
        """Uniform lower rate xi0 = d1 for both families."""
        return self.d1

    @property
    def alpha0(self) -> float:
        """Weighted kernel mass integral of -alpha'/xi, in closed form."""
        if self.family == KernelFamily.EXPONENTIAL:
            return self.d2 / self.d1
        return self.d2 / (self.d1 - 1.0)


@dataclass(frozen=True)
class KdvbParams:
    """KdVB coefficients: diffusion w0, dispersion w1, transport w2,
    nonlinearity w3, boundary proportional gain w4.

    Construction is permissive; inequality requirements are evaluated by
    :func:`check_kdvb_hypotheses` so that violating parameter sets can
    still be reported on rather than rejected.
    """

    w0: float
    w1: float
    w2: float
    w3: float
    w4: float

    def __post_init__(self) -> None:
        for name in ("w0", "w1", "w2", "w3", "w4"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class KsParams:
    """KS coefficients: fourth-order viscosity n0, nonlinearity n1,
    anti-diffusion n2, boundary gain n3. Permissive like KdvbParams."""

    n0: float
    n1: float
    n2: float
    n3: float

    def __post_init__(self) -> None:
        for name in ("n0", "n1", "n2", "n3"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class HypothesisCheck:
    name: str
    lhs: float
    rhs: float
    satisfied: bool
    note: str = ""


@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of a hypothesis evaluation.

    ``margin`` is rhs - alpha0 of the memory-smallness inequality; the
    report passes iff every individual check is satisfied.
    """

    passed: bool
    checks: tuple[HypothesisCheck, ...]
    alpha0: float
    margin: float

    @property
    def violations(self) -> tuple[HypothesisCheck, ...]:
        return tuple(c for c in self.checks if not c.satisfied)

    def as_table(self) -> str:
        width = max(len(c.name) for c in self.checks)
        lines = [f"{'check':<{width}}  {'lhs':>22}  {'rhs':>22}  ok"]
        for c in self.checks:
            rhs = "inf" if math.isinf(c.rhs) else f"{c.rhs:.15g}"
            ok = "yes" if c.satisfied else "NO"
            tail = f"  ({c.note})" if c.note else ""
            lines.append(f"{c.name:<{width}}  {c.lhs:>22.15g}  {rhs:>22}  {ok}{tail}")
        return "\n".join(lines)

    def as_key_values(self) -> list[tuple[str, str]]:
        pairs: list[tuple[str, str]] = [
            ("passed", "true" if self.passed else "false"),
            ("violations", str(len(self.violations))),
            ("alpha0", f"{self.alpha0:.17g}"),
            ("margin", f"{self.margin:.17g}"),
        ]
        for c in self.checks:
            pairs.append((f"check.{c.name}.lhs", f"{c.lhs:.17g}"))
            pairs.append((f"check.{c.name}.rhs", f"{c.rhs:.17g}"))
            pairs.append((f"check.{c.name}.ok", "true" if c.satisfied else "false"))
        return pairs


def _report(checks: list[HypothesisCheck], alpha0: float) -> HypothesisReport:
    memory = next(c for c in checks if c.name == "memory_smallness")
    return HypothesisReport(
        passed=all(c.satisfied for c in checks),
        checks=tuple(checks),
        alpha0=alpha0,
        margin=memory.rhs - alpha0,
    )


def check_kdvb_hypotheses(kernel: MemoryKernel, p: KdvbParams) -> HypothesisReport:
    """Evaluate the KdVB decay hypotheses, recording both sides of each.

    Requires w0 >= 0, w1 > 0, |w4| < 1 and the memory-smallness bound
    alpha0 < w1(1 - w4^2) / (w1^2 (1 - w4^2) + (1 + w1 w4)^2).
    Failures are reported, never raised.
    """
    a0 = kernel.alpha0
    checks = [
        HypothesisCheck("w0_nonnegative", p.w0, 0.0, p.w0 >= 0.0),
        HypothesisCheck("w1_positive", p.w1, 0.0, p.w1 > 0.0),
        HypothesisCheck("w4_magnitude", abs(p.w4), 1.0, abs(p.w4) < 1.0),
    ]
    denom = p.w1**2 * (1.0 - p.w4**2) + (1.0 + p.w1 * p.w4) ** 2
    if denom > 0.0:
        rhs = p.w1 * (1.0 - p.w4**2) / denom
    else:
        rhs = -math.inf
    checks.append(HypothesisCheck("memory_smallness", a0, rhs, a0 < rhs))
    return _report(checks, a0)


def check_ks_hypotheses(kernel: MemoryKernel, p: KsParams) -> HypothesisReport:
    """Evaluate the KS decay hypotheses.

    Requires n0 > 0, n3 > 0, 0 < n2 < pi^2 n0, and, when n0 != 1, the
    memory-smallness bound alpha0 < 2 n0 n3 / |1 - n0|^2 (vacuous at
    n0 = 1). Failures are reported, never raised.
    """
    a0 = kernel.alpha0
    checks = [
        HypothesisCheck("n0_positive", p.n0, 0.0, p.n0 > 0.0),
        HypothesisCheck("n3_positive", p.n3, 0.0, p.n3 > 0.0),
        HypothesisCheck("n2_positive", p.n2, 0.0, p.n2 > 0.0),
        HypothesisCheck("n2_below_pi2_n0", p.n2, math.pi**2 * p.n0,
                        p.n2 < math.pi**2 * p.n0),
    ]
    if p.n0 == 1.0:
        checks.append(
            HypothesisCheck("memory_smallness", a0, math.inf, True,
                            note="vacuous for n0 = 1")
        )
    else:
        rhs = 2.0 * p.n0 * p.n3 / (1.0 - p.n0) ** 2
        checks.append(HypothesisCheck("memory_smallness", a0, rhs, a0 < rhs))
    return _report(checks, a0)


def _golden_max(f, lo: float, hi: float, tol: float = 1e-13) -> float:
    """Argmax of a unimodal f on [lo, hi] by golden-section search."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol * max(1.0, abs(a) + abs(b)):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def kappa(kernel: MemoryKernel, p: KdvbParams) -> tuple[float, float]:
    """Dissipativity margin of the KdVB energy identity.

    Returns (kappa, eps) with kappa(eps) = (1/2) min{w1(1-w4^2) - eps|1+w1 w4|,
    1 - alpha0(w1 + |1+w1 w4|/eps)} maximized over the admissible eps
    interval. When w1*w4 = -1 the expression is eps-independent and eps = 1
    is returned. A nonpositive kappa signals a (marginally) violated
    hypothesis; it is returned as a value, never raised.
    """
    a0 = kernel.alpha0
    cross = abs(1.0 + p.w1 * p.w4)
    if cross == 0.0:
        return 0.5 * min(p.w1 * (1.0 - p.w4**2), 1.0 - a0 * p.w1), 1.0

    def objective(eps: float) -> float:
        return 0.5 * min(
            p.w1 * (1.0 - p.w4**2) - eps * cross,
            1.0 - a0 * (p.w1 + cross / eps),
        )

    # Positive root of the branch-crossing quadratic; coincides with the
    # admissible-interval maximizer whenever that interval is nonempty, and
    # yields the least-bad (nonpositive) value otherwise.
    b = 1.0 - a0 * p.w1 - p.w1 * (1.0 - p.w4**2)
    eps_star = (-b + math.sqrt(b * b + 4.0 * cross * cross * a0)) / (2.0 * cross)
    if 1.0 - p.w1 * a0 <= 0.0:
        return objective(eps_star), eps_star
    lo = a0 * cross / (1.0 - p.w1 * a0)
    hi = p.w1 * (1.0 - p.w4**2) / cross
    if not lo < hi:
        return objective(eps_star), eps_star
    eps = _golden_max(objective, lo, hi)
    return objective(eps), eps


def vartheta(kernel: MemoryKernel, p: KsParams) -> tuple[float, float]:
    """Dissipativity margin of the KS energy identity.

    Returns (vartheta, eps) with vartheta = min{(1/2)(1 - alpha0|1-n0|/eps),
    n0 n3 - |1-n0| eps/2, n0 - n2/pi^2} maximized over eps in
    (alpha0|1-n0|, 2 n0 n3/|1-n0|); eps := 1 when n0 = 1. Nonpositive
    values are returned, not raised.
    """
    a0 = kernel.alpha0
    cross = abs(1.0 - p.n0)
    const = p.n0 - p.n2 / math.pi**2
    if cross == 0.0:
        return min(0.5, p.n0 * p.n3, const), 1.0

    def objective(eps: float) -> float:
        return min(
            0.5 * (1.0 - a0 * cross / eps),
            p.n0 * p.n3 - 0.5 * cross * eps,
            const,
        )

    b = 1.0 - 2.0 * p.n0 * p.n3
    eps_star = (-b + math.sqrt(b * b + 4.0 * cross * cross * a0)) / (2.0 * cross)
    lo = a0 * cross
    hi = 2.0 * p.n0 * p.n3 / cross
    if not lo < hi:
        return objective(eps_star), eps_star
    eps = _golden_max(objective, lo, hi)
    return objective(eps), eps


def predicted_decay_rate(kernel: MemoryKernel, p: KdvbParams) -> Optional[float]:
    """Conservative exponential energy-decay rate for the KdVB model.

    Only available when w0 > 0 and the kernel rate is constant
    (exponential family): c = 2 w0 kappa xi0 / (w0 + c0 kappa xi0) with
    the Poincare constant c0 = 1/pi^2. Returns None in every other
    branch; callers fall back to an empirical fit.
    """
    if p.w0 <= 0.0 or kernel.family != KernelFamily.EXPONENTIAL:
        return None
    k, _ = kappa(kernel, p)
    if k <= 0.0:
        return None
    return 2.0 * p.w0 * k * kernel.xi0 / (p.w0 + POINCARE_C0 * k * kernel.xi0)
