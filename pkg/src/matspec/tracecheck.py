"""Trace identity, Herglotz identity, Lieb-Thirring and density-bound checks.

Throughout, z = sqrt(lambda) lives in the closed upper half plane. The
logarithm of det S(z^2) is continued from large Im z (where det S -> 1)
down a vertical path, so its branch is fixed without reference to the
principal value at the target.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .errors import BranchPointError, DomainError, InvalidInputError, TrackingError
from .invariants import invariant_symbolic
from .potential import MatrixPotential, j_functional, norm_integral
from .propagator import DEFAULT_RTOL, sqrt_branch
from .scattering import (
    expand_multiplicity,
    find_bound_states,
    find_jost_zeros,
    jost_S_at,
)
from .spectral import density

# ---------------------------------------------------------------------------
# ln det S by continuation
# ---------------------------------------------------------------------------


def det_S_at(p: MatrixPotential, s: complex, rtol: float = DEFAULT_RTOL) -> complex:
    """det S(s^2) with s = sqrt(lambda) given explicitly."""
    if p.is_zero():
        return 1.0 + 0j
    return complex(np.linalg.det(jost_S_at(p, s, rtol=rtol)))


def _start_height(p: MatrixPotential, s: complex) -> float:
    # |ln det S| is at most about n int ||v|| / (2|s|); start where that is small
    scale = p.n * norm_integral(p, 1.0) if not p.is_zero() else 0.0
    return max(abs(s.imag) + 1.0, 4.0 * scale + 10.0)


def track_log(fun: Callable[[complex], complex], s: complex, top: float,
              max_turn: float = math.pi / 4, min_step: float = 1e-9) -> complex:
    """Continuous logarithm of fun along the segment Re s + i*top -> s.

    Steps are halved until the argument changes by less than ``max_turn``
    between neighbours; a failure to get there means the path runs into a
    zero or pole of fun.
    """
    x = s.real
    y = top
    f = fun(complex(x, y))
    logv = cmath.log(f)
    step = max((top - s.imag) / 16, 1e-3)
    while y > s.imag:
        h = min(step, y - s.imag)
        while True:
            y1 = s.imag if h >= y - s.imag else y - h
            f1 = fun(complex(x, y1))
            if f1 == 0 or not np.isfinite(f1):
                raise TrackingError(f"function vanishes or blows up at z = {complex(x, y1)}")
            d = cmath.log(f1 / f)
            if abs(d.imag) < max_turn:
                break
            h /= 2
            if h < min_step:
                raise TrackingError(
                    f"argument jumps by {d.imag:.3f} near z = {complex(x, y1)}: "
                    "the path passes a zero of det S")
        logv += d
        f = f1
        y = y1
        step = min(2 * h, (top - s.imag) / 8)
    return logv


def logdetS_direct(p: MatrixPotential, lam, side: int = 1, rtol: float = DEFAULT_RTOL) -> complex:
    """ln det S(lambda) on the branch that tends to 0 as lambda -> -infinity."""
    if p.is_zero():
        return 0j
    s = sqrt_branch(lam, side)
    top = _start_height(p, s)
    val = track_log(lambda z: det_S_at(p, z, rtol), s, top)
    if abs(cmath.exp(val)) < 1e-8:
        warnings.warn(f"det S is nearly zero at lambda = {lam}")
    return val


# ---------------------------------------------------------------------------
# trace identity
# ---------------------------------------------------------------------------

def log_abs_detS(p: MatrixPotential, k: float) -> float:
    """ln |det S(k^2 + i0)| for k > 0."""
    if k <= 0:
        raise DomainError("k must be positive")
    return math.log(abs(det_S_at(p, complex(k, 0.0))))


@dataclass
class KIntegral:
    value: float
    cutoff: float
    tail_estimate: float
    nodes: int
    converged: bool


def k_integral(g: Callable[[float], float], decay: Callable[[float], float] | None = None,
               k0: float = 4.0, epsrel: float = 1e-8, epsabs: float = 1e-13,
               small: float = 1e-12, patience: int = 3, max_cutoff: float = 4096.0) -> KIntegral:
    """int_0^inf g(k) dk on doubling windows [0, k0], [k0, 2k0], ...

    Stops once |decay(k)| (default |g|) is below ``small`` at ``patience``
    consecutive window ends; the last window's contribution is kept as a
    tail estimate. Windows after the first use an absolute tolerance tied
    to the running total, so rounding noise far out does not stall quad.
    """
    decay = decay or g
    total = 0.0
    nodes = 0
    lo, hi = 0.0, k0
    quiet = 0
    last = 0.0
    ok = True
    tol_abs = epsabs
    while True:
        res = integrate.quad(g, lo, hi, epsrel=epsrel, epsabs=tol_abs, limit=200, full_output=True)
        val, err, info = res[:3]
        nodes += info["neval"]
        total += val
        last = val
        if err > max(tol_abs, epsrel * abs(total)) * 100:
            ok = False
        tol_abs = max(epsabs, 1e-7 * abs(total))
        quiet = quiet + 1 if abs(decay(hi)) < small else 0
        if quiet >= patience:
            break
        if hi >= max_cutoff:
            ok = False
            break
        lo, hi = hi, 2 * hi
    return KIntegral(total, hi, abs(last), nodes, ok)


@dataclass
class TraceReport:
    m: int
    lhs: float
    rhs: float
    I_m: float
    eigen_sum: float
    relative_error: float
    cutoff: float
    tail_estimate: float
    nodes: int
    converged: bool
    # the same closure with the negative zeros of det S in place of eigenvalues
    rhs_jost: float
    eigen_sum_jost: float
    relative_error_jost: float

    def to_row(self) -> dict:
        return asdict(self)


def eigen_sum(lams, m: int) -> float:
    """(-1)^m sum 2 |lambda_j|^(m+1/2) / (2m+1)."""
    return (-1) ** m * sum(2 * abs(l) ** (m + 0.5) / (2 * m + 1) for l in lams)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-12)


def trace_identity(p: MatrixPotential, m: int, k0: float = 4.0) -> TraceReport:
    """Compare (1/pi) int lambda^(m-1/2) ln|det S| with I_m plus the eigenvalue sum."""
    if m < 0:
        raise InvalidInputError("m must be non-negative")
    if not p.compact:
        raise InvalidInputError("the trace identity needs a compactly supported potential")
    if p.is_zero():
        return TraceReport(m, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0, True, 0.0, 0.0, 0.0)

    def g(k):
        return k ** (2 * m) * log_abs_detS(p, k) if k > 0 else 0.0

    ki = k_integral(g, lambda k: log_abs_detS(p, k), k0=k0)
    lhs = 2.0 / math.pi * ki.value
    Im = invariant_symbolic(p, m)
    es = eigen_sum(expand_multiplicity(find_bound_states(p)), m)
    esj = eigen_sum(expand_multiplicity(find_jost_zeros(p)), m)
    rhs = Im + es
    rhsj = Im + esj
    return TraceReport(m, lhs, rhs, Im, es, _rel(lhs, rhs), ki.cutoff, 2 / math.pi * ki.tail_estimate,
                       ki.nodes, ki.converged, rhsj, esj, _rel(lhs, rhsj))


# ---------------------------------------------------------------------------
# Blaschke product and the Herglotz identity
# ---------------------------------------------------------------------------

def blaschke(z: complex, ks) -> complex:
    """prod (z - i k_j) / (z + i k_j)."""
    z = complex(z)
    out = 1.0 + 0j
    for k in ks:
        den = z + 1j * k
        if den == 0:
            raise DomainError(f"Blaschke factor has a pole at z = {z}")
        out *= (z - 1j * k) / den
    return out


@dataclass
class HerglotzReport:
    z: complex
    residual: float
    # same quantity with the kernel 1/(z - k) in place of 1/(k - z)
    residual_reversed: float
    integral: complex
    log_ratio: complex
    ks: tuple


def _boundary_integral(p: MatrixPotential, z: complex) -> complex:
    """(1/(pi i)) int_R ln|det S(k^2)| / (k - z) dk, using evenness in k."""
    # 1/(k - z) - 1/(k + z) = 2z / (k^2 - z^2)
    def part(k, which):
        if k <= 0:
            return 0.0
        val = log_abs_detS(p, k) * 2 * z / (k * k - z * z)
        return val.real if which == 0 else val.imag

    out = []
    for which in (0, 1):
        ki = k_integral(lambda k: part(k, which), lambda k: log_abs_detS(p, k),
                        k0=max(4.0, 2 * abs(z)), epsabs=1e-12)
        out.append(ki.value)
    return complex(out[0], out[1]) / (math.pi * 1j)


def herglotz_residual(p: MatrixPotential, z: complex, zeros: str = "bound_states") -> HerglotzReport:
    """|H(z) - ln(det S(z^2) / B(z))| with H the boundary integral of ln|det S|.

    ``zeros`` picks the Blaschke points: eigenvalues of the Neumann problem
    ("bound_states") or the negative zeros of det S ("jost").
    """
    z = complex(z)
    if z.imag <= 0:
        raise DomainError("z must lie in the open upper half plane")
    if p.is_zero():
        return HerglotzReport(z, 0.0, 0.0, 0j, 0j, ())
    if zeros == "bound_states":
        lams = expand_multiplicity(find_bound_states(p))
    elif zeros == "jost":
        lams = expand_multiplicity(find_jost_zeros(p))
    else:
        raise InvalidInputError(f"unknown zero set {zeros!r}")
    ks = tuple(math.sqrt(-l) for l in lams)
    H = _boundary_integral(p, z)
    top = _start_height(p, z) + max(ks, default=0.0)
    F = track_log(lambda w: det_S_at(p, w) / blaschke(w, ks), z, top)
    return HerglotzReport(z, abs(H - F), abs(-H - F), H, F, ks)


# ---------------------------------------------------------------------------
# Lieb-Thirring
# ---------------------------------------------------------------------------

@dataclass
class LiebThirring:
    gamma: float
    moment_sum: float
    bound: float
    passed: bool

    @property
    def empirical_constant(self) -> float:
        return self.moment_sum / self.bound if self.bound > 0 else 0.0


def lieb_thirring(p: MatrixPotential, gamma: float) -> LiebThirring:
    """sum |lambda_j|^gamma against n int ||v||^(gamma + 1/2)."""
    if gamma <= 0:
        raise InvalidInputError("gamma must be positive")
    if p.is_zero():
        return LiebThirring(gamma, 0.0, 0.0, True)
    lams = expand_multiplicity(find_bound_states(p))
    moment = float(sum(abs(l) ** gamma for l in lams))
    bound = p.n * norm_integral(p, gamma + 0.5)
    return LiebThirring(gamma, moment, bound, moment <= bound + 1e-9)


# ---------------------------------------------------------------------------
# density bounds on an interval
# ---------------------------------------------------------------------------

@dataclass
class T11Report:
    delta: tuple
    m: int
    min_norm_hinv: float
    lower_target: float
    lower_ok: bool
    # literal form: int_delta ln||h^-1|| <= pi lambda2^(m-1/2) (|I_m| + sum)
    integral_log_hinv: float
    literal_bound: float
    literal_ok: bool
    # corrected form: int_delta ln(||h^-1|| / (4 pi sqrt(lambda))) <= 2 pi max lambda^(1/2-m) (|I_m| + sum)
    integral_log_ratio: float
    corrected_bound: float
    corrected_ok: bool
    J_m: float
    ratio_to_J: float


def t11_report(p: MatrixPotential, delta: tuple, m: int, samples: int = 41,
               tol: float = 1e-7) -> T11Report:
    """Lower bound on ||h^-1|| and the integrated log bound over delta."""
    l1, l2 = map(float, delta)
    if not 0 < l1 < l2:
        raise DomainError("delta must satisfy 0 < lambda1 < lambda2")
    if m < 0:
        raise InvalidInputError("m must be non-negative")
    x, w = np.polynomial.legendre.leggauss(samples)
    lam = 0.5 * (l2 - l1) * x + 0.5 * (l1 + l2)
    w = 0.5 * (l2 - l1) * w
    lam_all = np.concatenate([[l1], lam, [l2]])
    norms = np.array([np.linalg.norm(np.linalg.inv(density(p, l)), 2) for l in lam_all])
    min_norm = float(np.min(norms - math.pi * math.sqrt(l1))) + math.pi * math.sqrt(l1)
    lower_ok = bool(np.all(norms >= math.pi * math.sqrt(l1) - tol))
    inner = norms[1:-1]
    int_log = float(np.dot(w, np.log(inner)))
    int_ratio = float(np.dot(w, np.log(inner / (4 * math.pi * np.sqrt(lam)))))
    Im = abs(invariant_symbolic(p, m)) if not p.is_zero() else 0.0
    if p.is_zero():
        es = esj = 0.0
    else:
        es = abs(eigen_sum(expand_multiplicity(find_bound_states(p)), m))
        esj = abs(eigen_sum(expand_multiplicity(find_jost_zeros(p)), m))
    literal = math.pi * l2 ** (m - 0.5) * (Im + es)
    weight = max(l1 ** (0.5 - m), l2 ** (0.5 - m))
    corrected = 2 * math.pi * weight * (Im + esj)
    J = j_functional(p, m)
    return T11Report((l1, l2), m, min_norm, math.pi * math.sqrt(l1), lower_ok,
                     int_log, literal, int_log <= literal + tol,
                     int_ratio, corrected, int_ratio <= corrected + tol,
                     J, int_log / J if J > 0 else 0.0)
