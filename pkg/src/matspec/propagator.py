"""Matrix solutions of -psi'' + v psi = lambda psi on the half line.

All solves go through one adaptive DOP853 kernel (compiled or pure Python,
see ``_backend``). The kernel integrates the frame-shifted system

    Z'' = 2 i sigma Z' + (v - lambda + sigma^2) Z,   psi = exp(-i sigma x) Z,

so ``sigma = 0`` is the equation itself and ``sigma = sqrt(lambda)`` removes
the exponential growth of plane waves, which matters at large |lambda|.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import BranchPointError, ContractError, InvalidInputError
from .potential import MatrixPotential

DEFAULT_RTOL = 1e-11
ATOL = 1e-200
STEP_CONSTANT = 1.0


def sqrt_branch(lam, side: int = 1) -> complex:
    """sqrt(lambda) with the cut on [0, inf) and Im sqrt >= 0.

    On the cut, ``side=+1`` takes the limit from above (lambda + i0, giving
    +sqrt(lambda)) and ``side=-1`` the limit from below (-sqrt(lambda)).
    """
    lam = complex(lam)
    if lam == 0:
        raise BranchPointError("sqrt(lambda) is undefined at the branch point lambda = 0")
    if lam.imag == 0.0:
        if lam.real > 0:
            r = math.sqrt(lam.real)
            return complex(r if side >= 0 else -r, 0.0)
        return complex(0.0, math.sqrt(-lam.real))
    return 1j * cmath.sqrt(-lam)


@dataclass(frozen=True)
class CauchyData:
    """Matrix solution snapshot (psi(x), psi'(x)) at spectral parameter lambda."""

    value: np.ndarray
    derivative: np.ndarray
    x: float
    lam: complex

    @property
    def n(self) -> int:
        return self.value.shape[0]

    def stacked(self) -> np.ndarray:
        return np.vstack([self.value, self.derivative])

    def times(self, Q) -> "CauchyData":
        """Right multiplication by a constant matrix."""
        Q = np.asarray(Q)
        return CauchyData(self.value @ Q, self.derivative @ Q, self.x, self.lam)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.value)) and np.all(np.isfinite(self.derivative)))


@dataclass(frozen=True)
class TransferMatrix:
    """2n x 2n map from Cauchy data at 0 to Cauchy data at x."""

    M: np.ndarray
    lam: complex
    x_range: tuple[float, float]


def symplectic_form(n: int) -> np.ndarray:
    """J = [[0, -I], [I, 0]]."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    return J


def step_bound(p: MatrixPotential, lam, c: float = STEP_CONSTANT) -> float:
    """Upper bound on the step length that resolves oscillation."""
    return c / (1.0 + math.sqrt(abs(complex(lam))) + math.sqrt(p.packed.vmax))


@dataclass(frozen=True)
class SolveStats:
    steps: int
    rejected: int
    backend: str


def integrate(p: MatrixPotential, lam, x0: float, xs, Y0, sigma=0.0,
              rtol: float = DEFAULT_RTOL, kernel=None, return_stats: bool = False):
    """Low-level solve of the frame-shifted system.

    ``Y0`` is the stacked (2n, k) array [Z; Z'] at ``x0``; the result has
    shape (len(xs), 2n, k). Points in ``xs`` are visited in order, so they
    may move in either direction.
    """
    Y0 = np.asarray(Y0, dtype=complex)
    if Y0.ndim != 2 or Y0.shape[0] != 2 * p.n:
        raise InvalidInputError(f"initial data must have shape (2n, k) with n = {p.n}")
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    for x in (x0, *xs):
        if x < 0 or not math.isfinite(x):
            raise InvalidInputError(f"position {x} outside the half line")
    sig = complex(sigma)
    hmax = step_bound(p, lam)
    out, ns, nr = _backend.run(p.packed, lam, sig, x0, xs, Y0, rtol, ATOL, hmax, kernel=kernel)
    if return_stats:
        return out, SolveStats(int(ns), int(nr), _backend.NAME if kernel is None else "custom")
    return out


def propagate(p: MatrixPotential, lam, x0: float, x1: float, init: CauchyData,
              rtol: float = DEFAULT_RTOL) -> CauchyData:
    """Carry matrix Cauchy data from x0 to x1."""
    if init.x != x0:
        raise ContractError(f"initial data sits at x = {init.x}, not x0 = {x0}")
    if init.value.shape[0] != p.n:
        raise InvalidInputError("initial data does not match the potential dimension")
    out = integrate(p, lam, x0, [x1], init.stacked(), rtol=rtol)[0]
    n = p.n
    return CauchyData(out[:n], out[n:], float(x1), complex(lam))


def transfer_matrix(p: MatrixPotential, lam, x: float, rtol: float = DEFAULT_RTOL) -> TransferMatrix:
    """Columns are the solutions started from the 2n canonical Cauchy vectors."""
    if x < 0:
        raise InvalidInputError("x must be non-negative")
    n = p.n
    M = integrate(p, lam, 0.0, [x], np.eye(2 * n), rtol=rtol)[0]
    if complex(lam).imag == 0.0:
        M = M.real.copy()
    return TransferMatrix(M, complex(lam), (0.0, float(x)))


def symplectic_defect(M) -> float:
    """Spectral norm of M^T J M - J."""
    M = M.M if isinstance(M, TransferMatrix) else np.asarray(M)
    n = M.shape[0] // 2
    J = symplectic_form(n)
    D = M.T @ J @ M - J
    return float(np.linalg.norm(D, 2))


def wronskian(a: CauchyData, b: CauchyData) -> np.ndarray:
    """W(a, b) = b'^T a - b^T a'."""
    if a.x != b.x:
        raise ContractError(f"Wronskian of data at different points {a.x} and {b.x}")
    if complex(a.lam) != complex(b.lam):
        raise ContractError(f"Wronskian of data at different lambda {a.lam} and {b.lam}")
    return b.derivative.T @ a.value - b.value.T @ a.derivative


def neumann_solution(p: MatrixPotential, lam, x: float, rtol: float = DEFAULT_RTOL) -> CauchyData:
    """u with u(0) = I, u'(0) = 0."""
    n = p.n
    init = CauchyData(np.eye(n, dtype=complex), np.zeros((n, n), complex), 0.0, complex(lam))
    return propagate(p, lam, 0.0, x, init, rtol=rtol)


def jost_solution(p: MatrixPotential, lam, x: float, side: int = 1,
                  rtol: float = DEFAULT_RTOL) -> CauchyData:
    """w with w(0) = I, w'(0) = -i sqrt(lambda) I."""
    s = sqrt_branch(lam, side)
    n = p.n
    init = CauchyData(np.eye(n, dtype=complex), -1j * s * np.eye(n), 0.0, complex(lam))
    return propagate(p, lam, 0.0, x, init, rtol=rtol)


def checkpoints(p: MatrixPotential, lam, init: CauchyData, x_end: float,
                rtol: float = DEFAULT_RTOL) -> list[CauchyData]:
    """Solution snapshots at every integer point from init.x up to x_end."""
    start = math.floor(init.x) + 1
    xs = [float(x) for x in range(start, int(math.floor(x_end)) + 1)]
    if not xs or xs[-1] != x_end:
        xs.append(float(x_end))
    out = integrate(p, lam, init.x, xs, init.stacked(), rtol=rtol)
    n = p.n
    return [CauchyData(o[:n], o[n:], x, complex(lam)) for o, x in zip(out, xs)]


def wronskian_drift(snaps_a: list[CauchyData], snaps_b: list[CauchyData]) -> float:
    """Largest spectral-norm deviation of W(a, b) from its first value."""
    W0 = wronskian(snaps_a[0], snaps_b[0])
    return max(float(np.linalg.norm(wronskian(a, b) - W0, 2)) for a, b in zip(snaps_a, snaps_b))


def gauge_solve(p: MatrixPotential, lam, s: complex, xs, Z0, x0: float = 0.0,
                rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """Solve in the plane-wave frame Z = exp(i s x) psi; s should be sqrt(lambda)."""
    return integrate(p, lam, x0, xs, Z0, sigma=s, rtol=rtol)


__all__ = [
    "CauchyData", "TransferMatrix", "SolveStats", "sqrt_branch", "symplectic_form",
    "step_bound", "integrate", "propagate", "transfer_matrix", "symplectic_defect",
    "wronskian", "neumann_solution", "jost_solution", "checkpoints", "wronskian_drift",
    "gauge_solve",
]
