"""Noncommutative differential polynomials in a matrix potential v.

A word is a tuple of derivative orders (l1, ..., lr) standing for the
ordered product v^(l1) ... v^(lr); a polynomial maps words to exact
rationals. The Riccati hierarchy

    Q_1 = -v (convention "riccati") or v (convention "paper"),  Q_2 = Q_1',
    Q_m = Q_{m-1}' + sum_{k=1}^{m-2} Q_k Q_{m-k-1}

generates the densities of the large-lambda expansion

    ln det S(lambda) ~ sum_m (2 i sqrt(lambda))^{-m} int tr Q_m^{riccati} dx.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import FitDivergenceError, GradingError, InvalidInputError, UnsupportedDerivativeError
from .potential import MatrixPotential, eval_potential

Word = tuple


class NCPoly:
    """Rational linear combination of ordered words in v, v', v'', ..."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, Fraction] | None = None):
        clean = {}
        for w, c in (terms or {}).items():
            c = Fraction(c)
            if c != 0:
                clean[tuple(int(l) for l in w)] = c
        self.terms = clean

    @classmethod
    def v(cls, order: int = 0) -> "NCPoly":
        return cls({(order,): Fraction(1)})

    def __add__(self, other: "NCPoly") -> "NCPoly":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return NCPoly(out)

    def __neg__(self) -> "NCPoly":
        return NCPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "NCPoly") -> "NCPoly":
        return self + (-other)

    def __mul__(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            out: dict = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    out[w] = out.get(w, Fraction(0)) + c1 * c2
            return NCPoly(out)
        c = Fraction(other)
        return NCPoly({w: c * k for w, k in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, NCPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def derivative(self) -> "NCPoly":
        """Formal d/dx by the Leibniz rule."""
        out: dict = {}
        for w, c in self.terms.items():
            for i in range(len(w)):
                nw = w[:i] + (w[i] + 1,) + w[i + 1:]
                out[nw] = out.get(nw, Fraction(0)) + c
        return NCPoly(out)

    def max_order(self) -> int:
        return max((max(w) for w in self.terms if w), default=0)

    def words(self) -> list:
        return sorted(self.terms, key=lambda w: (len(w), w))

    def __repr__(self) -> str:
        return f"NCPoly({self})"

    def __str__(self) -> str:
        return pretty(self)

    def evaluate(self, p: MatrixPotential, x) -> np.ndarray:
        """Matrix values at the points x, shape (len(x), n, n)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        need = self.max_order()
        if need > p.max_derivative:
            raise UnsupportedDerivativeError(
                f"polynomial needs v^({need}) but the potential provides order {p.max_derivative}")
        D = [eval_potential(p, x, d) for d in range(need + 1)]
        n = p.n
        total = np.zeros((len(x), n, n))
        # share prefix products between words
        cache: dict = {(): None}

        def prod(w):
            if w in cache:
                return cache[w]
            head = prod(w[:-1])
            val = D[w[-1]] if head is None else head @ D[w[-1]]
            cache[w] = val
            return val

        for w, c in self.terms.items():
            if not w:
                total += float(c) * np.eye(n)
            else:
                total += float(c) * prod(w)
        return total

    def trace_values(self, p: MatrixPotential, x) -> np.ndarray:
        return np.trace(self.evaluate(p, x), axis1=1, axis2=2)


def _factor_str(l: int) -> str:
    if l <= 3:
        return "v" + "'" * l
    return f"v^({l})"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def pretty(poly: NCPoly) -> str:
    """Human-readable form such as v'' + v·v."""
    if poly.is_zero():
        return "0"
    parts = []
    for w in poly.words():
        c = poly.terms[w]
        body = "·".join(_factor_str(l) for l in w) if w else "1"
        mag = abs(c)
        coef = "" if mag == 1 and w else _frac_str(mag) + ("·" if w else "")
        sign = "-" if c < 0 else "+"
        parts.append((sign, coef + body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


CONVENTIONS = ("paper", "riccati")


@lru_cache(maxsize=None)
def q_polynomial(m: int, convention: str = "riccati") -> NCPoly:
    """Q_m of the Riccati hierarchy; memoized, exact rational coefficients."""
    if convention not in CONVENTIONS:
        raise InvalidInputError(f"unknown convention {convention!r}; use one of {CONVENTIONS}")
    if m < 1:
        raise InvalidInputError("Q_m is defined for m >= 1")
    if m == 1:
        return NCPoly.v() if convention == "paper" else -NCPoly.v()
    out = q_polynomial(m - 1, convention).derivative()
    for k in range(1, m - 1):
        out = out + q_polynomial(k, convention) * q_polynomial(m - k - 1, convention)
    return out


def word_order(w: Word) -> int:
    return sum(2 + l for l in w)


def gh_order(poly: NCPoly) -> int:
    """Common generalized-homogeneity order; v^(l) has weight 2 + l."""
    if poly.is_zero():
        raise GradingError("the zero polynomial has no order")
    orders = {word_order(w) for w in poly.terms}
    if len(orders) != 1:
        raise GradingError(f"inhomogeneous polynomial with orders {sorted(orders)}")
    return orders.pop()


# ---------------------------------------------------------------------------
# trace integrals
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


def _gauss(f, a: float, b: float) -> tuple[float, float]:
    x = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
    y = f(x)
    w = 0.5 * (b - a) * _GL_W
    return float(np.dot(w, y)), float(np.dot(w, np.abs(y)))


def adaptive_integral(f, a: float, b: float, tol: float = 1e-9, depth: int = 40) -> float:
    """Adaptive bisection with 24-point Gauss rules; f is vectorized.

    An interval is accepted when halving changes its value by less than
    tol times the integral of |f| over [a, b] (a relative tolerance that
    stays meaningful when the signed integral cancels to zero).
    """
    whole, scale = _gauss(f, a, b)
    scale = max(scale, 1e-300)
    stack = [(a, b, whole, depth)]
    total = 0.0
    while stack:
        lo, hi, val, d = stack.pop()
        mid = 0.5 * (lo + hi)
        left, _ = _gauss(f, lo, mid)
        right, _ = _gauss(f, mid, hi)
        if abs(left + right - val) <= tol * scale * (hi - lo) / (b - a) or d == 0:
            total += left + right
        else:
            stack.append((lo, mid, left, d - 1))
            stack.append((mid, hi, right, d - 1))
    return total


def trace_integral(poly: NCPoly, p: MatrixPotential, tol: float = 1e-9) -> float:
    """int_0^{support_end} tr poly(v, v', ...) dx."""
    if poly.is_zero() or p.is_zero():
        return 0.0
    if not p.compact:
        raise InvalidInputError("trace integrals need a compactly supported potential")
    if poly.max_order() > p.max_derivative:
        raise UnsupportedDerivativeError(
            f"polynomial needs v^({poly.max_order()}) but the potential provides order {p.max_derivative}")
    pts = [b for b in p.breakpoints() if b <= p.support_end]
    f = lambda x: poly.trace_values(p, x)
    return float(sum(adaptive_integral(f, a, b, tol) for a, b in zip(pts[:-1], pts[1:]) if b > a))


def trace_of_q(p: MatrixPotential, m: int, convention: str = "riccati", tol: float = 1e-11) -> float:
    return trace_integral(q_polynomial(m, convention), p, tol)


# ---------------------------------------------------------------------------
# I_m and the partial sums of ln det S
# ---------------------------------------------------------------------------

def invariant_symbolic(p: MatrixPotential, m: int, tol: float = 1e-11) -> float:
    """I_m = (-1)^(m+1) 2^-(2m+1) int tr Q_{2m+1}^{riccati}."""
    if m < 0:
        raise InvalidInputError("I_m needs m >= 0")
    if p.is_zero():
        return 0.0
    return (-1) ** (m + 1) * 2.0 ** (-(2 * m + 1)) * trace_of_q(p, 2 * m + 1, "riccati", tol)


FIT_R = tuple(np.geomspace(1e2, 1e4, 40))
FIT_DEGREE = 6


@dataclass(frozen=True)
class InvariantFit:
    coefficients: np.ndarray  # I_0, I_1, ...
    relative_residual: float
    R: np.ndarray


def fit_invariants(p: MatrixPotential, R=FIT_R, degree: int = FIT_DEGREE) -> InvariantFit:
    """Least-squares fit of ln det S(-R) = sum_m (-1)^m I_m R^(-m-1/2).

    The data come from the direct ODE computation of ln det S; sqrt(R) times
    the data is a polynomial in t = 1/R whose coefficients give the I_m.
    """
    from .tracecheck import logdetS_direct

    R = np.asarray(R, dtype=float)
    y = np.array([logdetS_direct(p, -r).real for r in R])
    t = 1.0 / R
    target = np.sqrt(R) * y
    # scale columns by t_max^j to keep the system well conditioned
    tmax = t.max()
    V = np.vander(t / tmax, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, target, rcond=None)
    coef = coef / tmax ** np.arange(degree + 1)
    resid = float(np.linalg.norm(np.vander(t, degree + 1, increasing=True) @ coef - target))
    rel = resid / max(float(np.linalg.norm(target)), 1e-300)
    signs = (-1.0) ** np.arange(degree + 1)
    return InvariantFit(coef * signs, rel, R)


def invariant_I(p: MatrixPotential, m: int, method: str = "symbolic") -> float:
    """I_m, the coefficient of lambda^(-m-1/2) in -i ln det S(lambda)."""
    if m < 0:
        raise InvalidInputError("I_m needs m >= 0")
    if p.is_zero():
        return 0.0
    if method == "symbolic":
        return invariant_symbolic(p, m)
    if method == "fit":
        fit = fit_invariants(p)
        if fit.relative_residual > 1e-4:
            raise FitDivergenceError(f"asymptotic fit residual {fit.relative_residual:.3e} exceeds 1e-4")
        if m >= len(fit.coefficients):
            raise InvalidInputError(f"fit provides I_m only for m <= {len(fit.coefficients) - 1}")
        return float(fit.coefficients[m])
    raise InvalidInputError(f"unknown method {method!r}")


def logdetS_partial_sum(p: MatrixPotential, lam, M: int, convention: str = "riccati") -> complex:
    """sum_{m=1}^{M} (2 i sqrt(lambda))^(-m) int tr Q_m."""
    from .propagator import sqrt_branch

    if p.is_zero():
        return 0j
    s = sqrt_branch(lam)
    total = 0j
    for m in range(1, M + 1):
        total += (2j * s) ** (-m) * trace_of_q(p, m, convention)
    return total


def j_ratio(p: MatrixPotential, m: int) -> float:
    """|I_m| / J_m, logged as a monitored quantity (no bound is asserted)."""
    from .potential import j_functional

    J = j_functional(p, m)
    return abs(invariant_symbolic(p, m)) / J if J > 0 else 0.0
