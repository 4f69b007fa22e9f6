"""Scattering coefficients, bound states and the algebraic identity audit.

Past the support the Neumann solution u and the Jost solution w are
combinations of the plane waves v+ = exp(i s x) I and v- = exp(-i s x) I
(s = sqrt(lambda)):

    u = v+ A + v- B,        w = v+ P + v- S.

Both solutions are computed together in the plane-wave frame
Z = exp(i s x) psi, where they stay bounded for Im s >= 0, and matched at
m = support_end + offset.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import BranchPointError, DomainError, InvalidInputError
from .potential import MatrixPotential, birman_bound
from .propagator import DEFAULT_RTOL, CauchyData, gauge_solve, sqrt_branch

MATCH_OFFSET = 1.0


@dataclass(frozen=True)
class ScatteringData:
    """Coefficients of u and w in the plane-wave basis at one lambda."""

    lam: complex
    A: np.ndarray
    B: np.ndarray
    P: np.ndarray
    S: np.ndarray
    detS: complex
    match_x: float
    side: int = 1

    @property
    def n(self) -> int:
        return self.A.shape[0]


def match_plane_waves(d: CauchyData, lam=None, side: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Solve value = e^{ism}C+ + e^{-ism}C-, derivative = is(e^{ism}C+ - e^{-ism}C-)."""
    lam = d.lam if lam is None else lam
    s = sqrt_branch(lam, side)
    m = d.x
    q = d.derivative / (1j * s)
    Cp = np.exp(-1j * s * m) * (d.value + q) / 2
    Cm = np.exp(1j * s * m) * (d.value - q) / 2
    return Cp, Cm


def _require_compact(p: MatrixPotential) -> float:
    if not p.compact:
        raise InvalidInputError("scattering data needs a compactly supported potential")
    return p.support_end


def scattering_data(p: MatrixPotential, lam, side: int = 1, offset: float = MATCH_OFFSET,
                    rtol: float = DEFAULT_RTOL) -> ScatteringData:
    """A, B from the Neumann solution and P, S from the Jost solution."""
    lam = complex(lam)
    if lam == 0:
        raise BranchPointError("scattering data is undefined at lambda = 0")
    m = _require_compact(p) + offset
    s = sqrt_branch(lam, side)
    n = p.n
    I = np.eye(n)
    # columns [u | w] in the frame Z = e^{isx} psi: Z(0) = I, Z'(0) = i s I + psi'(0)
    Z0 = np.block([[I, I], [1j * s * I, np.zeros((n, n))]])
    out = gauge_solve(p, lam, s, [m], Z0, rtol=rtol)[0]
    Z, Zp = out[:n], out[n:]
    Cp = np.exp(-2j * s * m) * Zp / (2j * s)
    Cm = Z - Zp / (2j * s)
    A, P = Cp[:, :n], Cp[:, n:]
    B, S = Cm[:, :n], Cm[:, n:]
    if lam.imag == 0.0 and lam.real < 0:
        # every quantity is real on the negative axis
        A, B, P, S = (X.real.astype(complex) for X in (A, B, P, S))
    detS = complex(np.linalg.det(S))
    return ScatteringData(lam, A, B, P, S, detS, float(m), side)


def _coefficient_and_scale(p: MatrixPotential, lam, Z0: np.ndarray, rtol: float) -> tuple[np.ndarray, float]:
    """C- at the match point and the size of the whole solution there.

    Z(m) = C- + Z'(m)/(2is) in the gauge frame, so the second term measures
    the part of the solution not carried by C-.
    """
    lam = complex(lam)
    m = _require_compact(p) + MATCH_OFFSET
    s = sqrt_branch(lam)
    n = p.n
    out = gauge_solve(p, lam, s, [m], Z0, rtol=rtol)[0]
    other = out[n:] / (2j * s)
    C = out[:n] - other
    scale = max(float(np.linalg.norm(C, 2)), float(np.linalg.norm(other, 2)))
    return C, scale


def neumann_B(p: MatrixPotential, lam, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """B alone; cheaper than full scattering data."""
    n = p.n
    s = sqrt_branch(lam)
    Z0 = np.vstack([np.eye(n), 1j * s * np.eye(n)])
    return _coefficient_and_scale(p, lam, Z0, rtol)[0]


def jost_S(p: MatrixPotential, lam, side: int = 1, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """S alone."""
    return jost_S_at(p, sqrt_branch(lam, side), rtol=rtol)


def jost_S_at(p: MatrixPotential, s: complex, rtol: float = DEFAULT_RTOL) -> np.ndarray:
    """S as a function of s = sqrt(lambda), for s in the closed upper half plane."""
    s = complex(s)
    if s == 0:
        raise BranchPointError("S is undefined at lambda = 0")
    lam = s * s
    m = _require_compact(p) + MATCH_OFFSET
    n = p.n
    Z0 = np.vstack([np.eye(n), np.zeros((n, n))])
    out = gauge_solve(p, lam, s, [m], Z0, rtol=rtol)[0]
    return out[:n] - out[n:] / (2j * s)


# ---------------------------------------------------------------------------
# bound states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundState:
    lam: float
    multiplicity: int
    sign_change: bool


def _scan_zeros(matfun, lo: float, hi: float, spacing: float, tol: float) -> list[BoundState]:
    """Roots of det X(lambda) on [lo, hi]: sign changes plus non-crossing dips.

    ``matfun`` returns X and a scale for it; dips are judged on the smallest
    singular value relative to that scale, so a zero where X vanishes
    entirely (full degeneracy) is still seen.
    """
    npts = max(int(math.ceil((hi - lo) / spacing)), 2) + 1
    grid = np.linspace(lo, hi, npts)

    def det_and_ratio(lam):
        X, scale = matfun(lam)
        d = np.linalg.det(X)
        sv = np.linalg.svd(X, compute_uv=False)
        if abs(d.imag) > 1e-9 * max(1.0, abs(d)):
            warnings.warn(f"determinant has imaginary residue {d.imag:.3e} at lambda = {lam}")
        return d.real, sv[-1] / scale, sv / scale

    vals = [det_and_ratio(lam) for lam in grid]
    roots: list[tuple[float, bool]] = []
    for i in range(npts - 1):
        a, b = vals[i][0], vals[i + 1][0]
        if a == 0.0:
            roots.append((grid[i], True))
        elif a * b < 0:
            r = optimize.brentq(lambda t: det_and_ratio(t)[0], grid[i], grid[i + 1],
                                xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)
            roots.append((r, True))
    ratios = [v[1] for v in vals]
    for i in range(1, npts - 1):
        if ratios[i] < ratios[i - 1] and ratios[i] < ratios[i + 1]:
            if vals[i - 1][0] * vals[i][0] < 0 or vals[i][0] * vals[i + 1][0] < 0:
                continue
            res = optimize.minimize_scalar(lambda t: det_and_ratio(t)[1],
                                           bounds=(grid[i - 1], grid[i + 1]), method="bounded",
                                           options={"xatol": tol})
            if res.fun < 1e-7:
                roots.append((float(res.x), False))
    if vals[-1][0] == 0.0:
        roots.append((grid[-1], True))
    for r, _ in roots:
        if r - lo < tol or hi - r < tol:
            warnings.warn(f"root {r} at the scan boundary [{lo}, {hi}]")
    out = []
    for r, crossing in sorted(roots):
        sv = det_and_ratio(r)[2]
        mult = int(np.sum(sv < 1e-8))
        if mult == 0:
            mult = int(np.sum(sv < 1e-6)) or 1
        out.append(BoundState(float(r), mult, crossing))
    return out


def _scan_range(p: MatrixPotential) -> tuple[float, float, float]:
    lam0 = birman_bound(p).lambda0
    return lam0, -1e-9 * abs(lam0), 0.01 * abs(lam0)


def find_bound_states(p: MatrixPotential, tol: float = 1e-12) -> list[BoundState]:
    """Negative lambda where B(lambda) is singular, with kernel dimensions."""
    _require_compact(p)
    if p.is_zero():
        return []
    lo, hi, h = _scan_range(p)
    n = p.n

    def matfun(lam):
        Z0 = np.vstack([np.eye(n), 1j * sqrt_branch(lam) * np.eye(n)])
        return _coefficient_and_scale(p, lam, Z0, DEFAULT_RTOL)

    return _scan_zeros(matfun, lo, hi, h, tol)


def bound_states(p: MatrixPotential, tol: float = 1e-12) -> list[float]:
    """Sorted negative eigenvalues of the Neumann problem (one entry per distinct value)."""
    return [b.lam for b in find_bound_states(p, tol)]


def find_jost_zeros(p: MatrixPotential, tol: float = 1e-12) -> list[BoundState]:
    """Negative lambda where det S(lambda) vanishes, with kernel dimensions."""
    _require_compact(p)
    if p.is_zero():
        return []
    lo, hi, h = _scan_range(p)
    Z0 = np.vstack([np.eye(p.n), np.zeros((p.n, p.n))])
    return _scan_zeros(lambda lam: _coefficient_and_scale(p, lam, Z0, DEFAULT_RTOL), lo, hi, h, tol)


def jost_zeros(p: MatrixPotential, tol: float = 1e-12) -> list[float]:
    """Sorted negative zeros of det S."""
    return [b.lam for b in find_jost_zeros(p, tol)]


def expand_multiplicity(states: list[BoundState]) -> list[float]:
    """One entry per eigenvalue counted with multiplicity."""
    return [b.lam for b in states for _ in range(b.multiplicity)]


# ---------------------------------------------------------------------------
# identity audit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityResiduals:
    energy: float
    pseudo: float
    conj: float
    half: float
    eigmin: float
    norm_chain: tuple[bool, bool]
    # 1 + ||P||^2 <= ||S||^2, the form that energy conservation actually implies
    norm_chain_squared: bool

    def max_residual(self) -> float:
        return max(self.energy, self.pseudo, self.conj, self.half)


def _norm(X) -> float:
    return float(np.linalg.norm(X, 2))


def identity_residuals(sd: ScatteringData, tol: float = 1e-7) -> IdentityResiduals:
    """Residual norms of the positive-lambda identities between A, B, P, S."""
    lam = complex(sd.lam)
    if lam.imag != 0.0 or lam.real <= 0:
        raise DomainError("identity residuals are defined for real lambda > 0")
    A, B, P, S = sd.A, sd.B, sd.P, sd.S
    n = sd.n
    energy = _norm(S.conj().T @ S - P.conj().T @ P - np.eye(n))
    pseudo = _norm(A.T @ B - B.T @ A)
    conj = _norm(A - B.conj())
    half = _norm(B - (S + P.conj()) / 2)
    eigmin = float(np.min(np.abs(np.linalg.eigvals(S)))) - 1.0
    nP, nS = _norm(P), _norm(S)
    chain = (1.0 + nP <= nS + tol, nS <= abs(sd.detS) + tol)
    squared = 1.0 + nP ** 2 <= nS ** 2 + tol
    return IdentityResiduals(energy, pseudo, conj, half, eigmin, chain, squared)
