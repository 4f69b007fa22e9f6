"""Symmetric matrix potentials on the half line.

A potential is a finite sum ``v(x) = sum_k f_k(x) M_k`` of scalar profiles
``f_k`` (restricted to an interval) times constant symmetric matrices ``M_k``.
Symmetry is therefore structural: every term stores a symmetric matrix and
every evaluation is a real linear combination of them.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Any, Iterable, Sequence

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import hermite as _herm
from scipy import integrate
from scipy.interpolate import PPoly, make_interp_spline

from .errors import (
    DivergenceError,
    EvaluationError,
    InvalidInputError,
    UnsupportedDerivativeError,
)

KINDS = (
    "constant_box",
    "gaussian_bump",
    "smooth_bump",
    "polynomial_bump",
    "grid_sampled",
    "exponential",
    "power_law",
)

# derivative order treated as "all orders" for analytic profiles
UNBOUNDED = 1 << 30

# kernel codes; must agree with _kernels.pyx and _pykernels.py
K_BOX, K_GAUSS, K_SMOOTH, K_PP, K_EXP, K_POWER = range(6)


# ---------------------------------------------------------------------------
# scalar profiles
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bump_numerator(k: int) -> Polynomial:
    """N_k with d^k/dt^k exp(1 - 1/(1-t^2)) = N_k(t) (1-t^2)^(-2k) exp(...)."""
    if k == 0:
        return Polynomial([1.0])
    prev = _bump_numerator(k - 1)
    one_m_t2 = Polynomial([1.0, 0.0, -1.0])
    t = Polynomial([0.0, 1.0])
    j = k - 1
    return prev.deriv() * one_m_t2 ** 2 + 4 * j * t * prev * one_m_t2 - 2 * t * prev


def smooth_bump_profile(t, d: int = 0):
    """exp(1 - 1/(1-t^2)) on |t| < 1 (peak 1 at t = 0) and its t-derivatives."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    w = 1.0 - ti * ti
    with np.errstate(under="ignore", over="ignore", divide="ignore"):
        logf = 1.0 - 1.0 / w - 2 * d * np.log(w)
        out[inside] = _bump_numerator(d)(ti) * np.exp(logf)
    return out


def smoothstep(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t)."""
    t = np.asarray(t, dtype=float)

    def psi(u):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)

    a = psi(t)
    b = psi(1.0 - t)
    return a / (a + b)


def _check_symmetric(m: np.ndarray, where: str = "matrix") -> None:
    n = m.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j] != m[j, i]:
                raise InvalidInputError(
                    f"{where} is not symmetric: entry [{i}][{j}]={m[i, j]!r} "
                    f"differs from [{j}][{i}]={m[j, i]!r}"
                )


@dataclass(frozen=True, eq=False)
class PotentialTerm:
    """One scalar profile on ``interval`` times a symmetric matrix."""

    kind: str
    interval: tuple[float, float]
    matrix: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown potential kind {self.kind!r}")
        a, b = (float(self.interval[0]), float(self.interval[1]))
        if not (math.isfinite(a) and a >= 0.0 and b > a):
            raise InvalidInputError(f"bad interval [{a}, {b}] for {self.kind}")
        m = np.array(self.matrix, dtype=float)
        if m.ndim == 0:
            m = m.reshape(1, 1)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidInputError("matrix has non-finite entries")
        _check_symmetric(m)
        m.setflags(write=False)
        object.__setattr__(self, "interval", (a, b))
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "params", dict(self.params))
        self._validate_params()

    # -- construction helpers -------------------------------------------------
    def _validate_params(self):
        p = self.params
        a, b = self.interval
        if self.kind == "gaussian_bump":
            if "center" not in p or "width" not in p or p["width"] <= 0:
                raise InvalidInputError("gaussian_bump needs center and width > 0")
        elif self.kind == "smooth_bump":
            if not math.isfinite(b):
                raise InvalidInputError("smooth_bump needs a finite interval")
        elif self.kind == "polynomial_bump":
            if not math.isfinite(b) or not p.get("coefficients"):
                raise InvalidInputError("polynomial_bump needs coefficients and a finite interval")
        elif self.kind == "grid_sampled":
            xs = np.asarray(p.get("x", ()), dtype=float)
            ys = np.asarray(p.get("values", ()), dtype=float)
            order = int(p.get("order", 5))
            if xs.ndim != 1 or xs.shape != ys.shape or xs.size < order + 1:
                raise InvalidInputError("grid_sampled needs matching x/values with enough samples")
            if np.any(np.diff(xs) <= 0) or not np.all(np.isfinite(ys)):
                raise InvalidInputError("grid_sampled abscissae must increase and values be finite")
            if xs[0] != a or xs[-1] != b:
                raise InvalidInputError("grid_sampled interval must match the sample range")
        elif self.kind == "exponential":
            if p.get("rate", 0) <= 0:
                raise InvalidInputError("exponential needs rate > 0")
        elif self.kind == "power_law":
            if p.get("alpha", 0) <= 0:
                raise InvalidInputError("power_law needs alpha > 0")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def max_derivative(self) -> int:
        if self.kind == "constant_box":
            return 0
        if self.kind == "grid_sampled":
            return min(3, int(self.params.get("order", 5)))
        return UNBOUNDED

    @cached_property
    def _spline(self):
        p = self.params
        return make_interp_spline(
            np.asarray(p["x"], float), np.asarray(p["values"], float), k=int(p.get("order", 5))
        )

    @cached_property
    def _poly(self) -> Polynomial:
        return Polynomial(np.asarray(self.params["coefficients"], dtype=float))

    def profile(self, x, d: int = 0) -> np.ndarray:
        """d-th derivative of the scalar profile; zero outside the interval."""
        if d > self.max_derivative:
            raise UnsupportedDerivativeError(
                f"{self.kind} provides derivatives up to order {self.max_derivative}, asked for {d}"
            )
        x = np.asarray(x, dtype=float)
        a, b = self.interval
        inside = (x >= a) & (x <= b)
        out = np.zeros_like(x)
        if not np.any(inside):
            return out
        xi = x[inside]
        p = self.params
        k = self.kind
        if k == "constant_box":
            val = np.ones_like(xi)
        elif k == "gaussian_bump":
            w = float(p["width"])
            u = (xi - float(p["center"])) / w
            herm = _herm.hermval(u, [0.0] * d + [1.0])
            val = (-1.0 / w) ** d * herm * np.exp(-u * u)
        elif k == "smooth_bump":
            half = 0.5 * (b - a)
            t = (xi - 0.5 * (a + b)) / half
            val = smooth_bump_profile(t, d) / half ** d
        elif k == "polynomial_bump":
            L = b - a
            val = self._poly.deriv(d)((xi - a) / L) / L ** d if d else self._poly((xi - a) / L)
        elif k == "grid_sampled":
            val = self._spline(xi, nu=d)
        elif k == "exponential":
            r = float(p["rate"])
            val = (-r) ** d * np.exp(-r * (xi - a))
        else:  # power_law
            alpha = float(p["alpha"])
            coef = math.prod(-alpha - j for j in range(d))
            val = coef * (1.0 + xi - a) ** (-alpha - d)
        out[inside] = val
        return out

    def sup_profile(self) -> float:
        """Upper bound for |profile| (used for the integrator step bound)."""
        k = self.kind
        if k in ("constant_box", "gaussian_bump", "smooth_bump", "exponential", "power_law"):
            return 1.0
        if k == "polynomial_bump":
            t = np.linspace(0.0, 1.0, 2001)
            return float(np.max(np.abs(self._poly(t)))) * 1.01
        return float(np.max(np.abs(self.params["values"]))) * 1.1

    def scaled(self, c: float) -> "PotentialTerm":
        return PotentialTerm(self.kind, self.interval, c * self.matrix, self.params)

    def to_dict(self) -> dict:
        params = {}
        for key, val in self.params.items():
            params[key] = np.asarray(val).tolist() if isinstance(val, np.ndarray) else val
        b = self.interval[1]
        return {
            "kind": self.kind,
            "interval": [self.interval[0], b if math.isfinite(b) else "inf"],
            "matrix": self.matrix.tolist(),
            "params": params,
        }


@dataclass(frozen=True, eq=False)
class PackedPotential:
    """Flat array form consumed by the propagation kernels."""

    n: int
    kind: np.ndarray  # int32[T]
    lo: np.ndarray
    hi: np.ndarray
    par: np.ndarray  # float64[T, 4]
    mats: np.ndarray  # float64[T, n, n]
    pp_off: np.ndarray  # int32[T]
    pp_cnt: np.ndarray  # int32[T]
    pp_brk: np.ndarray  # left end of every piece
    pp_coef: np.ndarray  # float64[pieces, K], lowest order first
    breaks: np.ndarray  # sorted finite interval endpoints
    vmax: float


@dataclass(frozen=True, eq=False)
class MatrixPotential:
    """Immutable sum of :class:`PotentialTerm` objects sharing a dimension."""

    n: int
    terms: tuple = ()

    def __post_init__(self):
        terms = tuple(self.terms)
        for t in terms:
            if t.n != self.n:
                raise InvalidInputError(f"term of size {t.n} in a {self.n}x{self.n} potential")
        object.__setattr__(self, "terms", terms)

    @property
    def support_end(self) -> float:
        return max((t.interval[1] for t in self.terms), default=0.0)

    @property
    def compact(self) -> bool:
        return math.isfinite(self.support_end)

    @property
    def max_derivative(self) -> int:
        return min((t.max_derivative for t in self.terms), default=UNBOUNDED)

    def is_zero(self) -> bool:
        return all(not np.any(t.matrix) for t in self.terms)

    def breakpoints(self) -> np.ndarray:
        pts = {0.0}
        for t in self.terms:
            pts.update(e for e in t.interval if math.isfinite(e))
        return np.array(sorted(pts))

    def __call__(self, x, d: int = 0) -> np.ndarray:
        return eval_potential(self, x, d)

    def __add__(self, other: "MatrixPotential") -> "MatrixPotential":
        if other.n != self.n:
            raise InvalidInputError("dimension mismatch")
        return MatrixPotential(self.n, self.terms + other.terms)

    def __neg__(self) -> "MatrixPotential":
        return self.scaled(-1.0)

    def __sub__(self, other: "MatrixPotential") -> "MatrixPotential":
        return self + (-other)

    def scaled(self, c: float) -> "MatrixPotential":
        return MatrixPotential(self.n, tuple(t.scaled(c) for t in self.terms))

    def sup_norm_bound(self) -> float:
        return float(sum(t.sup_profile() * np.linalg.norm(t.matrix, 2) for t in self.terms))

    @cached_property
    def packed(self) -> PackedPotential:
        return _pack(self)

    def to_dict(self) -> dict:
        return {"n": self.n, "terms": [t.to_dict() for t in self.terms]}


def zero_potential(n: int = 1) -> MatrixPotential:
    return MatrixPotential(n, ())


def eval_potential(p: MatrixPotential, x, d: int = 0) -> np.ndarray:
    """v^(d)(x); shape (n, n) for scalar x, (..., n, n) for arrays."""
    if d < 0 or d > p.max_derivative:
        raise UnsupportedDerivativeError(
            f"derivative order {d} unavailable (max {p.max_derivative})"
        )
    xa = np.asarray(x, dtype=float)
    out = np.zeros(xa.shape + (p.n, p.n))
    for t in p.terms:
        f = t.profile(xa, d)
        out += f[..., None, None] * t.matrix
    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"non-finite potential value near x={x}")
    return 0.5 * (out + np.swapaxes(out, -1, -2))


def spectral_norm(m: np.ndarray) -> np.ndarray:
    """Operator 2-norm of symmetric matrices (batched over leading axes)."""
    m = np.asarray(m)
    if m.shape[-1] == 1:
        return np.abs(m[..., 0, 0])
    return np.max(np.abs(np.linalg.eigvalsh(m)), axis=-1)


# ---------------------------------------------------------------------------
# packing for the kernels
# ---------------------------------------------------------------------------

def _pack(p: MatrixPotential) -> PackedPotential:
    T = len(p.terms)
    kind = np.zeros(T, np.int32)
    lo = np.zeros(T)
    hi = np.zeros(T)
    par = np.zeros((T, 4))
    mats = np.zeros((T, p.n, p.n))
    pp_off = np.zeros(T, np.int32)
    pp_cnt = np.zeros(T, np.int32)
    brks: list[np.ndarray] = []
    coefs: list[np.ndarray] = []
    npieces = 0
    for i, t in enumerate(p.terms):
        a, b = t.interval
        lo[i], hi[i] = a, b
        mats[i] = t.matrix
        prm = t.params
        if t.kind == "constant_box":
            kind[i] = K_BOX
        elif t.kind == "gaussian_bump":
            kind[i] = K_GAUSS
            par[i, :2] = prm["center"], prm["width"]
        elif t.kind == "smooth_bump":
            kind[i] = K_SMOOTH
            par[i, :2] = 0.5 * (a + b), 0.5 * (b - a)
        elif t.kind == "exponential":
            kind[i] = K_EXP
            par[i, 0] = prm["rate"]
        elif t.kind == "power_law":
            kind[i] = K_POWER
            par[i, 0] = prm["alpha"]
        else:
            kind[i] = K_PP
            if t.kind == "polynomial_bump":
                L = b - a
                c = np.asarray(prm["coefficients"], float) / L ** np.arange(len(prm["coefficients"]))
                brk = np.array([a])
                cf = c[None, :]
            else:
                pp = PPoly.from_spline(t._spline)
                x = pp.x
                keep = np.nonzero((x[:-1] >= a) & (x[1:] <= b) & (x[1:] > x[:-1]))[0]
                brk = x[keep]
                cf = pp.c[::-1, keep].T  # lowest order first
            pp_off[i] = npieces
            pp_cnt[i] = len(brk)
            npieces += len(brk)
            brks.append(brk)
            coefs.append(cf)
    K = max((c.shape[1] for c in coefs), default=1)
    pp_brk = np.concatenate(brks) if brks else np.zeros(1)
    pp_coef = np.zeros((max(npieces, 1), K))
    row = 0
    for c in coefs:
        pp_coef[row:row + c.shape[0], :c.shape[1]] = c
        row += c.shape[0]
    return PackedPotential(
        n=p.n, kind=kind, lo=lo, hi=hi, par=par, mats=mats,
        pp_off=pp_off, pp_cnt=pp_cnt, pp_brk=np.ascontiguousarray(pp_brk),
        pp_coef=np.ascontiguousarray(pp_coef), breaks=p.breakpoints(),
        vmax=p.sup_norm_bound(),
    )


# ---------------------------------------------------------------------------
# quadrature helpers
# ---------------------------------------------------------------------------

def _quad_pieces(f, pts: Sequence[float], epsrel: float = 1e-10, epsabs: float = 1e-14) -> float:
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        if b <= a:
            continue
        with warnings.catch_warnings():
            # kinks of ||v|| (eigenvalue crossings) slow quad down but do not spoil the value
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            val, _ = integrate.quad(f, a, b, epsrel=epsrel, epsabs=epsabs, limit=400)
        total += val
    return total


def _integrate_half_line(p: MatrixPotential, f, epsrel: float = 1e-10) -> float:
    """Integral of f over [0, inf); f vanishes beyond support_end when compact.

    Non-compact tails are summed over doubling windows [X, 2X]; once the
    window ratio settles below one the rest is closed by a geometric tail.
    """
    pts = list(p.breakpoints())
    total = _quad_pieces(f, pts, epsrel)
    if p.compact:
        return total
    x0 = max(pts[-1], 1.0)
    total += _quad_pieces(f, [pts[-1], x0], epsrel)
    windows: list[float] = []
    for _ in range(600):
        w = _quad_pieces(f, [x0, 2 * x0], epsrel)
        total += w
        windows.append(abs(w))
        x0 *= 2
        if abs(w) <= 1e-15 * max(abs(total), 1e-300):
            return total
        if len(windows) >= 6:
            recent = windows[-6:]
            if all(b >= a for a, b in zip(recent, recent[1:])):
                raise DivergenceError("integrand shows no decay over doubling windows")
            r = windows[-1] / windows[-2]
            if r < 1.0 and windows[-1] * r / (1.0 - r) <= 0.1 * epsrel * abs(total):
                return total + w * r / (1.0 - r)
    raise DivergenceError("tail did not converge over 600 doubling windows")


def norm_integral(p: MatrixPotential, power: float = 1.0, d: int = 0) -> float:
    """Integral over [0, inf) of ||v^(d)(x)||^power (spectral norm)."""
    if p.is_zero():
        return 0.0
    return _integrate_half_line(p, lambda x: float(spectral_norm(eval_potential(p, x, d)) ** power))


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BirmanBound:
    c0: float
    lambda0: float
    argmax: float


def birman_bound(p: MatrixPotential) -> BirmanBound:
    """Birman constant c0 = sup_x int_x^{x+1} ||v|| and a spectral lower bound.

    ``lambda0 = -max(1, c0) * (1 + c0)``; for c0 <= 1 this is -(1 + c0).
    """
    if p.is_zero():
        return BirmanBound(0.0, -1.0, 0.0)
    brk = [b for b in p.breakpoints()]

    def g(x):
        return float(spectral_norm(eval_potential(p, x)))

    def window(x):
        pts = [x] + [b for b in brk if x < b < x + 1] + [x + 1]
        return _quad_pieces(g, pts, epsrel=1e-11)

    hi = p.support_end if p.compact else brk[-1] + 50.0
    xs = np.unique(np.concatenate([np.arange(0.0, hi + 1e-12, 0.05), np.array(brk), np.maximum(np.array(brk) - 1, 0)]))
    xs = xs[(xs >= 0) & (xs <= hi)]
    vals = np.array([window(x) for x in xs])
    if not np.all(np.isfinite(vals)):
        raise EvaluationError("non-finite window integral")
    i = int(np.argmax(vals))
    best_x, best = float(xs[i]), float(vals[i])
    lo_x = xs[max(i - 1, 0)]
    hi_x = xs[min(i + 1, len(xs) - 1)]
    if hi_x > lo_x:
        from scipy.optimize import minimize_scalar

        res = minimize_scalar(lambda x: -window(x), bounds=(lo_x, hi_x), method="bounded",
                              options={"xatol": 1e-10})
        if -res.fun > best:
            best_x, best = float(res.x), float(-res.fun)
    c0 = best
    return BirmanBound(c0, -max(1.0, c0) * (1.0 + c0), best_x)


def j_functional(p: MatrixPotential, order: int) -> float:
    """J_p(v); order 0 is the L1 norm of ||v||."""
    if order < 0:
        raise InvalidInputError("order must be >= 0")
    if p.is_zero():
        return 0.0
    if order == 0:
        return norm_integral(p, 1.0)
    d = order - 1

    def f(x):
        a = float(spectral_norm(eval_potential(p, x, d)))
        b = a if d == 0 else float(spectral_norm(eval_potential(p, x, 0)))
        return a * a + b ** (order + 1)

    return _integrate_half_line(p, f)


# -- mollification -----------------------------------------------------------

def cutoff(x, s: float):
    """phi_s: 1 for x < s - 1, 0 for x > s - 1/2."""
    return smoothstep((s - 0.5 - np.asarray(x, float)) / 0.5)


@lru_cache(maxsize=None)
def _bump_mass() -> float:
    val, _ = integrate.quad(lambda y: float(smooth_bump_profile(2 * y - 1)), 0.0, 1.0, epsabs=1e-15, epsrel=1e-13)
    return val


def mollifier(y, eps: float):
    """alpha_eps(y) = alpha(y/eps)/eps, alpha a unit-mass bump supported in [0, 1]."""
    y = np.asarray(y, float)
    return smooth_bump_profile(2 * y / eps - 1) / (eps * _bump_mass())


_GL_T, _GL_W = np.polynomial.legendre.leggauss(64)


def _mollified_profile(term: PotentialTerm, s: float, eps: float, x: np.ndarray) -> np.ndarray:
    a, b = term.interval
    b_eff = min(b, s - 0.5)
    # integrate over y in [max(0, x-b_eff), min(eps, x-a)]: x - y stays inside the term
    ylo = np.clip(x - b_eff, 0.0, eps)
    yhi = np.clip(x - a, 0.0, eps)
    span = np.maximum(yhi - ylo, 0.0)
    y = ylo[:, None] + 0.5 * span[:, None] * (_GL_T[None, :] + 1.0)
    z = x[:, None] - y
    f = term.profile(z.ravel(), 0).reshape(z.shape) * cutoff(z, s)
    vals = (f * mollifier(y, eps)) @ _GL_W * 0.5 * span
    return vals


def mollify(p: MatrixPotential, s: float, eps: float, spacing: float | None = None) -> MatrixPotential:
    """v_s = (phi_s v) * alpha_eps, returned as grid-sampled quintic splines.

    The result is supported in [0, s - 1/2 + eps] which lies inside (0, s).
    """
    if not (0.0 < eps < 0.5):
        raise InvalidInputError("mollifier width eps must lie in (0, 1/2)")
    if s <= 1.0:
        raise InvalidInputError("cutoff s must exceed 1")
    h = spacing or min(eps / 50.0, 0.01)
    terms = []
    for t in p.terms:
        if not np.any(t.matrix):
            continue
        a = t.interval[0]
        end = min(t.interval[1], s - 0.5) + eps
        if end <= a:
            continue
        m = max(int(math.ceil((end - a) / h)), 8)
        xs = np.linspace(a, end, m + 1)
        vals = _mollified_profile(t, s, eps, xs)
        vals[0] = 0.0
        vals[-1] = 0.0
        terms.append(PotentialTerm("grid_sampled", (a, end), t.matrix,
                                   {"x": xs, "values": vals, "order": 5}))
    return MatrixPotential(p.n, tuple(terms))


# ---------------------------------------------------------------------------
# potential description files
# ---------------------------------------------------------------------------

def _parse_bound(v: Any) -> float:
    if v is None or (isinstance(v, str) and v.lower() in ("inf", "infinity", "+inf")):
        return math.inf
    return float(v)


def potential_from_dict(data: dict) -> MatrixPotential:
    if not isinstance(data, dict) or "n" not in data:
        raise InvalidInputError("potential description needs an integer 'n'")
    n = data["n"]
    if not isinstance(n, int) or n < 1:
        raise InvalidInputError(f"'n' must be a positive integer, got {n!r}")
    terms = []
    for idx, raw in enumerate(data.get("terms", [])):
        try:
            kind = raw["kind"]
            a, b = raw["interval"]
            mat = np.array(raw["matrix"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"term {idx}: malformed entry ({exc})") from None
        if mat.shape != (n, n):
            raise InvalidInputError(f"term {idx}: matrix shape {mat.shape} does not match n={n}")
        try:
            _check_symmetric(mat, where=f"term {idx} matrix")
            params = dict(raw.get("params", {}))
            if kind == "grid_sampled":
                xs = params.get("x", [])
                a = a if a is not None else xs[0]
                b = b if b is not None else xs[-1]
            terms.append(PotentialTerm(kind, (float(a), _parse_bound(b)), mat, params))
        except InvalidInputError as exc:
            raise InvalidInputError(f"term {idx}: {exc}") from None
    return MatrixPotential(n, tuple(terms))


def load_potential(path) -> MatrixPotential:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read potential file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON ({exc})") from None
    return potential_from_dict(data)


def dump_potential(p: MatrixPotential, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(p.to_dict(), fh, indent=1)


# convenience constructors used by the corpus, tests and examples

def box(value, a: float, b: float) -> MatrixPotential:
    m = np.atleast_2d(np.asarray(value, float))
    return MatrixPotential(m.shape[0], (PotentialTerm("constant_box", (a, b), m),))


def gaussian(matrix, center: float, width: float, cut: float = 7.0) -> MatrixPotential:
    m = np.atleast_2d(np.asarray(matrix, float))
    a = max(center - cut * width, 0.0)
    return MatrixPotential(m.shape[0], (PotentialTerm(
        "gaussian_bump", (a, center + cut * width), m, {"center": center, "width": width}),))


def bump(matrix, a: float, b: float) -> MatrixPotential:
    m = np.atleast_2d(np.asarray(matrix, float))
    return MatrixPotential(m.shape[0], (PotentialTerm("smooth_bump", (a, b), m),))


def combine(parts: Iterable[MatrixPotential]) -> MatrixPotential:
    parts = list(parts)
    out = parts[0]
    for q in parts[1:]:
        out = out + q
    return out
