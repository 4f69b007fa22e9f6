from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from matspec import corpus
from matspec.errors import GradingError, InvalidInputError, UnsupportedDerivativeError
from matspec.invariants import (
    NCPoly,
    fit_invariants,
    gh_order,
    invariant_I,
    invariant_symbolic,
    logdetS_partial_sum,
    pretty,
    q_polynomial,
    trace_integral,
    trace_of_q,
)
from matspec.potential import box, gaussian, zero_potential
from matspec.tracecheck import logdetS_direct

V = NCPoly.v


def scalar_q_integrals(amp, center, width, mmax):
    """Commutative Riccati recursion in sympy, integrated with mpmath."""
    x = sp.Symbol("x")
    v = amp * sp.exp(-((x - center) / width) ** 2)
    q = [None, -v]
    for m in range(2, mmax + 1):
        q.append(sp.diff(q[m - 1], x) + sum(q[k] * q[m - k - 1] for k in range(1, m - 1)))
    out = {}
    for m in range(1, mmax + 1):
        f = sp.lambdify(x, q[m], "mpmath")
        out[m] = float(mpmath.quad(f, [center - 8 * width, center, center + 8 * width]))
    return out


def test_low_order_polynomials():
    assert q_polynomial(1, "paper") == V()
    assert q_polynomial(2, "paper") == V(1)
    assert q_polynomial(3, "paper") == V(2) + V() * V()
    assert pretty(q_polynomial(3, "paper")) == "v'' + v·v"
    assert pretty(q_polynomial(3)) == "-v'' + v·v"
    assert q_polynomial(4) == -V(3) + V(1) * V() + V() * V(1) + V() * V(1) + V(1) * V()
    with pytest.raises(InvalidInputError):
        q_polynomial(0)
    with pytest.raises(InvalidInputError):
        q_polynomial(2, "other")


def test_gh_order():
    assert gh_order(V()) == 2
    assert gh_order(V(2) + V() * V()) == 4
    assert gh_order(q_polynomial(5)) == 6
    for m in range(1, 11):
        assert gh_order(q_polynomial(m)) == m + 1
    with pytest.raises(GradingError):
        gh_order(V() + V() * V())
    with pytest.raises(GradingError):
        gh_order(NCPoly())


def test_ncpoly_algebra():
    a, b = V(), V(1)
    assert a * b != b * a
    assert (a * b).derivative() == V(1) * V(1) + V() * V(2)
    assert (a + b) - b == a
    assert 2 * a == a + a
    assert NCPoly({(0,): Fraction(1, 2)}) * 2 == a
    assert pretty(NCPoly({(0, 1): Fraction(-3, 2), (4,): 1})) == "v^(4) - 3/2·v·v'"


def test_evaluate_noncommutative_product():
    p = corpus.rotated_pair()
    x = np.array([0.6, 0.9])
    from matspec.potential import eval_potential

    vals = (V() * V(0)).evaluate(p, x)
    vx = eval_potential(p, x)
    assert np.allclose(vals, vx @ vx)
    with pytest.raises(UnsupportedDerivativeError):
        V(3).evaluate(box(1.0, 0, 1), x)


def test_trace_integrals_of_derivatives_vanish():
    p = corpus.double_bump()
    assert abs(trace_integral(q_polynomial(2), p)) < 1e-10
    for k in (1, 2, 3):
        assert abs(trace_of_q(p, 2 * k)) < 1e-8
    m = corpus.matrix_gaussians()
    for k in (1, 2, 3):
        assert abs(trace_of_q(m, 2 * k)) < 1e-8


def test_q3_integral_is_int_v_squared():
    w = 0.5
    p = gaussian(1.0, 4.0, w)
    assert trace_of_q(p, 3, "paper") == pytest.approx(w * np.sqrt(np.pi / 2), abs=1e-8)
    assert trace_of_q(p, 3) == pytest.approx(w * np.sqrt(np.pi / 2), abs=1e-8)


def test_scalar_integrals_against_sympy():
    ref = scalar_q_integrals(-3.0, 4.0, 0.6, 7)
    p = corpus.deep_well()
    for m, val in ref.items():
        assert trace_of_q(p, m) == pytest.approx(val, rel=1e-8, abs=1e-10)


def test_zero_potential():
    for m in range(3):
        assert invariant_I(zero_potential(), m) == 0.0
    assert logdetS_partial_sum(zero_potential(), -50.0, 4) == 0


def test_invariant_values_frozen():
    # I_0 = int tr v / 2 and I_1 = int tr v^2 / 8 for a Gaussian of amplitude a, width w
    a, w = -3.0, 0.6
    p = corpus.deep_well()
    assert invariant_symbolic(p, 0) == pytest.approx(a * w * np.sqrt(np.pi) / 2, rel=1e-10)
    assert invariant_symbolic(p, 1) == pytest.approx(a * a * w * np.sqrt(np.pi / 2) / 8, rel=1e-9)


@pytest.mark.parametrize("name", ["weak_bump", "deep_well"])
def test_symbolic_matches_fit(name):
    p = corpus.smooth_corpus()[name]
    fit = fit_invariants(p)
    assert fit.relative_residual < 1e-8
    assert fit.coefficients[0] == pytest.approx(invariant_symbolic(p, 0), rel=1e-6)
    assert fit.coefficients[1] == pytest.approx(invariant_symbolic(p, 1), rel=1e-5)


def slope(p, M, lams):
    errs = [abs(logdetS_direct(p, lam) - logdetS_partial_sum(p, lam, M)) for lam in lams]
    return np.polyfit(np.log(np.abs(lams)), np.log(errs), 1)[0]


def test_partial_sum_remainder_order():
    p = corpus.weak_bump()
    lams = np.array([-100.0, -400.0, -1600.0])
    for M in (2, 4):
        assert slope(p, M, lams) == pytest.approx(-(M + 1) / 2, rel=0.1)
    # odd M: the next term Q_{M+1} integrates to zero, so the remainder drops by a further half power
    assert slope(p, 3, lams) == pytest.approx(-(3 + 2) / 2, rel=0.1)


def test_partial_sum_close_at_large_lambda():
    p = corpus.weak_bump()
    lam = -1e4
    assert abs(logdetS_direct(p, lam) - logdetS_partial_sum(p, lam, 3)) < 1e-8


@given(m=st.integers(1, 8))
@settings(max_examples=8, deadline=None)
def test_recursion_identity(m):
    # Q_{m+1} - Q_m' is the symmetric convolution sum
    q = q_polynomial(m + 1) - q_polynomial(m).derivative()
    conv = NCPoly()
    for k in range(1, m):
        conv = conv + q_polynomial(k) * q_polynomial(m - k)
    assert q == conv


@given(w=st.lists(st.integers(0, 4), min_size=1, max_size=4), c=st.fractions(-5, 5))
@settings(max_examples=40, deadline=None)
def test_derivative_raises_order_by_one(w, c):
    poly = NCPoly({tuple(w): c})
    d = poly.derivative()
    if c != 0:
        assert gh_order(d) == gh_order(poly) + 1
    else:
        assert d.is_zero()


@given(k=st.integers(1, 3))
@settings(max_examples=3, deadline=None)
def test_paper_and_riccati_differ_by_sign_pattern(k):
    # replacing v by -v maps one convention to the other up to the sign (-1)^(order)
    for m in (2 * k - 1, 2 * k):
        r, q = q_polynomial(m), q_polynomial(m, "paper")
        flipped = NCPoly({w: c * (-1) ** len(w) for w, c in q.terms.items()})
        assert r == flipped
