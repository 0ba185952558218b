"""Pentadiagonal operators on the interior nodes and their banded LU.

Vectors live on interior nodes k = 2..M-2 (dimension n = M-3). Nodes 0 and
M are pinned to zero by the boundary conditions; nodes 1 and M-1 are
boundary-closure values whose stencil taps are routed through the boundary
vector, not through these matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import BACKEND, factor_kernel, solve_kernel

__all__ = [
    "BACKEND",
    "PentaMatrix",
    "PentaLU",
    "SingularMatrixError",
    "build_stencils",
    "assemble_system",
    "combine_operators",
    "penta_factor",
    "penta_solve",
]

PIVOT_RTOL = 1e-14


class SingularMatrixError(ValueError):
    """Pivot underflow during the banded factorization."""


@dataclass
class PentaMatrix:
    """Five-band matrix, row-aligned storage.

    bands[o + 2][i] = A[i, i + o] for offsets o = -2..+2; entries whose
    column falls outside 0..n-1 are zero.
    """

    n: int
    bands: np.ndarray  # shape (5, n)

    @classmethod
    def zeros(cls, n: int) -> "PentaMatrix":
        return cls(n, np.zeros((5, n)))

    @classmethod
    def identity(cls, n: int) -> "PentaMatrix":
        m = cls.zeros(n)
        m.bands[2, :] = 1.0
        return m

    @classmethod
    def from_diagonals(cls, n: int, dm2: float, dm1: float, d0: float,
                       dp1: float, dp2: float) -> "PentaMatrix":
        m = cls.zeros(n)
        m.bands[0, 2:] = dm2
        m.bands[1, 1:] = dm1
        m.bands[2, :] = d0
        m.bands[3, :-1] = dp1
        m.bands[4, :-2] = dp2
        return m

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.bands[2] * x
        y[2:] += self.bands[0, 2:] * x[:-2]
        y[1:] += self.bands[1, 1:] * x[:-1]
        y[:-1] += self.bands[3, :-1] * x[1:]
        y[:-2] += self.bands[4, :-2] * x[2:]
        return y


@dataclass
class PentaLU:
    """Banded LU with restricted partial pivoting; immutable once built."""

    n: int
    w: np.ndarray     # (n, 7) U bands at offsets -2..+4 (sub-slots zeroed)
    lfac: np.ndarray  # (n, 2) elimination multipliers
    piv: np.ndarray   # (n,) pivot row indices


def build_stencils(M: int, dx: float) -> tuple[PentaMatrix, PentaMatrix,
                                               PentaMatrix, PentaMatrix]:
    """Second-order difference operators D1..D4 of size (M-3) x (M-3).

    D1 = centered first difference / 2dx, D2 = (1,-2,1)/dx^2,
    D3 = (-1/2,1,0,-1,1/2)/dx^3, D4 = (1,-4,6,-4,1)/dx^4. Corner taps
    that leave the interior block are dropped here and reinstated by the
    boundary vector.
    """
    if M < 8:
        raise ValueError("M must be at least 8 (stencil wider than interior)")
    n = M - 3
    d1 = PentaMatrix.from_diagonals(n, 0.0, -0.5 / dx, 0.0, 0.5 / dx, 0.0)
    d2 = PentaMatrix.from_diagonals(
        n, 0.0, 1.0 / dx**2, -2.0 / dx**2, 1.0 / dx**2, 0.0)
    d3 = PentaMatrix.from_diagonals(
        n, -0.5 / dx**3, 1.0 / dx**3, 0.0, -1.0 / dx**3, 0.5 / dx**3)
    d4 = PentaMatrix.from_diagonals(
        n, 1.0 / dx**4, -4.0 / dx**4, 6.0 / dx**4, -4.0 / dx**4, 1.0 / dx**4)
    return d1, d2, d3, d4


def combine_operators(coeffs, stencils) -> PentaMatrix:
    """a1*D1 + a2*D2 + a3*D3 + a4*D4 as one PentaMatrix."""
    d1, d2, d3, d4 = stencils
    n = d1.n
    if not (d2.n == n and d3.n == n and d4.n == n):
        raise ValueError("stencil dimensions differ")
    bands = (coeffs.a1 * d1.bands + coeffs.a2 * d2.bands
             + coeffs.a3 * d3.bands + coeffs.a4 * d4.bands)
    return PentaMatrix(n, bands)


def assemble_system(coeffs, dt: float, stencils) -> tuple[PentaMatrix, PentaMatrix]:
    """Crank-Nicolson pair: Lhs = I + (dt/2) S, Rhs = I - (dt/2) S."""
    s = combine_operators(coeffs, stencils)
    lhs = PentaMatrix(s.n, 0.5 * dt * s.bands)
    rhs = PentaMatrix(s.n, -0.5 * dt * s.bands)
    lhs.bands[2, :] += 1.0
    rhs.bands[2, :] += 1.0
    return lhs, rhs


def penta_factor(a: PentaMatrix) -> PentaLU:
    """Banded LU with restricted partial pivoting (bandwidth growth <= 2).

    Raises SingularMatrixError when a pivot underflows
    PIVOT_RTOL * max|band entry|.
    """
    n = a.n
    w = np.zeros((n, 7))
    for o in range(-2, 3):
        w[:, o + 2] = a.bands[o + 2]
    lfac = np.zeros((n, 2))
    piv = np.arange(n, dtype=np.int64)
    tol = PIVOT_RTOL * float(np.max(np.abs(a.bands)))
    bad = factor_kernel(w, lfac, piv, tol)
    if bad >= 0:
        raise SingularMatrixError(
            f"pivot below {tol:.3e} at elimination step {bad}")
    return PentaLU(n, w, lfac, piv)


def penta_solve(lu: PentaLU, b: np.ndarray) -> np.ndarray:
    if b.shape != (lu.n,):
        raise ValueError(f"rhs length {b.shape} != {lu.n}")
    work = np.array(b, dtype=np.float64)
    x = np.empty_like(work)
    solve_kernel(lu.w, lu.lfac, lu.piv, work, x)
    return x
