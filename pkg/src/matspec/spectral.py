"""Spectral density, Green matrix and pairings against test functions.

For lambda > 0 the a.c. density of the Neumann problem is

    h(lambda) = N(lambda) / (4 pi sqrt(lambda)),   N = B^{-1} (B^*)^{-1},

with B the coefficient of the incoming wave in the Neumann solution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from ._parallel import pmap
from .errors import CoverageError, DomainError, ResolventError, SingularDensityError
from .potential import MatrixPotential
from .propagator import DEFAULT_RTOL, CauchyData, propagate, sqrt_branch
from .scattering import bound_states, neumann_B, scattering_data

COND_LIMIT = 1e12


@dataclass(frozen=True)
class SpectralMeasure:
    """Negative atom locations plus the sampled a.c. density on a positive grid."""

    atoms: tuple
    grid: np.ndarray
    density: np.ndarray  # (len(grid), n, n)
    lambda0: float | None = None

    @property
    def n(self) -> int:
        return self.density.shape[1]


def _check_positive(lam) -> float:
    lam = complex(lam)
    if lam.imag != 0.0 or lam.real <= 0:
        raise DomainError(f"the density is defined for real lambda > 0, got {lam}")
    return lam.real


def _density_from_B(B: np.ndarray, lam: float) -> np.ndarray:
    if np.linalg.cond(B) > COND_LIMIT:
        raise SingularDensityError(f"B is numerically singular at lambda = {lam}")
    X = np.linalg.inv(B)
    h = X @ X.conj().T / (4 * math.pi * math.sqrt(lam))
    return 0.5 * (h + h.conj().T)


def density(p: MatrixPotential, lam, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """h(lambda) for lambda > 0; Hermitian positive definite."""
    lam = _check_positive(lam)
    return _density_from_B(neumann_B(p, lam, rtol=rtol), lam)


def density_grid(p: MatrixPotential, grid, workers: int | None = None) -> np.ndarray:
    """h at every grid point, shape (len(grid), n, n)."""
    grid = np.asarray(grid, dtype=float)
    return np.array(pmap(partial(density, p), grid, workers)).reshape(len(grid), p.n, p.n)


def spectral_measure(p: MatrixPotential, grid, workers: int | None = None,
                     with_atoms: bool = True) -> SpectralMeasure:
    """Assemble atoms (bound-state locations) and the density on ``grid``."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise DomainError("density grid must be positive and increasing")
    atoms = tuple(bound_states(p)) if with_atoms and p.compact else ()
    return SpectralMeasure(atoms, grid, density_grid(p, grid, workers))


def geometric_grid(start: float, stop: float, count: int) -> np.ndarray:
    return np.geomspace(start, stop, count)


# ---------------------------------------------------------------------------
# Green matrix
# ---------------------------------------------------------------------------

def _vplus(p: MatrixPotential, lam, s: complex, m: float, x: float) -> CauchyData:
    """Outgoing solution equal to exp(i s x) I past the support."""
    n = p.n
    I = np.eye(n)
    if x >= m:
        e = np.exp(1j * s * x)
        return CauchyData(e * I, 1j * s * e * I, x, complex(lam))
    e = np.exp(1j * s * m)
    start = CauchyData(e * I, 1j * s * e * I, m, complex(lam))
    return propagate(p, lam, m, x, start)


def _neumann(p: MatrixPotential, lam, x: float) -> CauchyData:
    n = p.n
    init = CauchyData(np.eye(n, dtype=complex), np.zeros((n, n), complex), 0.0, complex(lam))
    return propagate(p, lam, 0.0, x, init)


def green_matrix(p: MatrixPotential, lam, x: float, xi: float, dx: int = 0) -> np.ndarray:
    """Kernel of (H - lambda)^{-1} with the Neumann condition at 0.

    For x <= xi it is -(2 i s)^{-1} u(x) B^{-1} v+(xi)^T, and its transpose
    with the arguments swapped otherwise. ``dx=1`` returns the x-derivative.
    """
    lam = complex(lam)
    if lam.imag == 0.0 and lam.real >= 0:
        raise ResolventError(f"lambda = {lam.real} lies in the continuous spectrum")
    if x < 0 or xi < 0:
        raise DomainError("Green matrix arguments must be non-negative")
    if not p.compact:
        raise DomainError("Green matrix needs a compactly supported potential")
    s = sqrt_branch(lam)
    sd = scattering_data(p, lam)
    sv = np.linalg.svd(sd.B, compute_uv=False)
    if sv[-1] < 1e-10 * max(sv[0], 1.0):
        raise ResolventError(f"B is singular at lambda = {lam}: an eigenvalue is too close")
    Binv = np.linalg.inv(sd.B)
    m = sd.match_x
    pre = -1.0 / (2j * s)
    if x <= xi:
        u = _neumann(p, lam, x)
        vp = _vplus(p, lam, s, m, xi)
        left = u.value if dx == 0 else u.derivative
        return pre * left @ Binv @ vp.value.T
    u = _neumann(p, lam, xi)
    vp = _vplus(p, lam, s, m, x)
    left = vp.value if dx == 0 else vp.derivative
    return pre * left @ Binv.T @ u.value.T


def green_jump(p: MatrixPotential, lam, xi: float) -> np.ndarray:
    """d/dx G(x, xi) at x = xi+0 minus at x = xi-0."""
    u = _neumann(p, lam, xi)
    s = sqrt_branch(lam)
    sd = scattering_data(p, lam)
    vp = _vplus(p, lam, s, sd.match_x, xi)
    Binv = np.linalg.inv(sd.B)
    pre = -1.0 / (2j * s)
    right = pre * vp.derivative @ Binv.T @ u.value.T
    left = pre * u.derivative @ Binv @ vp.value.T
    return right - left


# ---------------------------------------------------------------------------
# sandwich bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TesBounds:
    lower: float
    normNinv: float
    normS2: float
    detS2: float
    chain_ok: bool
    lower_ok: bool
    upper_ok: bool


def tes_bounds(p: MatrixPotential, lam, tol: float = 1e-7) -> TesBounds:
    """1/4 <= ||N^{-1}|| <= ||S||^2 <= |det S|^2, each link checked separately."""
    lam = _check_positive(lam)
    sd = scattering_data(p, lam)
    if np.linalg.cond(sd.B) > COND_LIMIT:
        raise SingularDensityError(f"B is numerically singular at lambda = {lam}")
    # N^{-1} = B^* B, whose norm is ||B||^2
    ninv = float(np.linalg.norm(sd.B.conj().T @ sd.B, 2))
    s2 = float(np.linalg.norm(sd.S, 2)) ** 2
    d2 = abs(sd.detS) ** 2
    lower_ok = 0.25 <= ninv + tol
    upper_ok = ninv <= s2 + tol and s2 <= d2 + tol
    return TesBounds(0.25, ninv, s2, d2, lower_ok and upper_ok, lower_ok, upper_ok)


# ---------------------------------------------------------------------------
# pairing with test functions
# ---------------------------------------------------------------------------

def measure_pairing(m: SpectralMeasure, f: Callable[[float], float], window: tuple[float, float],
                    include_atoms: bool = False, epsrel: float = 1e-10) -> np.ndarray:
    """int_a^b f(lambda) h(lambda) dlambda from the sampled density.

    The integrand is interpolated by cubic splines in k = sqrt(lambda),
    where 2 k h(k^2) is smooth down to k = 0.
    """
    a, b = map(float, window)
    if not 0 < a < b:
        raise DomainError("pairing window must satisfy 0 < a < b")
    g = m.grid
    if a < g[0] * (1 - 1e-12) or b > g[-1] * (1 + 1e-12):
        raise CoverageError(f"window [{a}, {b}] is not covered by the grid [{g[0]}, {g[-1]}]")
    inside = (g >= a) & (g <= b)
    lo = max(int(np.argmax(inside)) - 2, 0)
    hi = min(len(g) - int(np.argmax(inside[::-1])) + 2, len(g))
    sel = slice(lo, hi)
    gs = g[sel]
    if len(gs) < 4 or np.max(np.diff(gs[(gs >= a) & (gs <= b)], prepend=a, append=b)) > (b - a) / 100 * (1 + 1e-9):
        raise CoverageError("density grid too coarse over the pairing window")
    k = np.sqrt(gs)
    vals = 2 * k[:, None, None] * m.density[sel]
    n = m.n
    spl_re = CubicSpline(k, vals.real.reshape(len(k), -1), axis=0)
    spl_im = CubicSpline(k, vals.imag.reshape(len(k), -1), axis=0)

    def integrand(kk):
        return float(f(kk * kk)) * (spl_re(kk) + 1j * spl_im(kk))

    kn = k[(k > math.sqrt(a)) & (k < math.sqrt(b))]
    pts = [math.sqrt(a), *kn, math.sqrt(b)]
    total = np.zeros(n * n, complex)
    for k0, k1 in zip(pts[:-1], pts[1:]):
        piece, _ = integrate.quad_vec(integrand, k0, k1, epsrel=epsrel, epsabs=1e-14)
        total += piece
    out = total.reshape(n, n)
    if include_atoms:
        for lam in m.atoms:
            if a <= lam <= b:
                out = out + float(f(lam)) * np.eye(n)
    out = 0.5 * (out + out.conj().T)
    return out
