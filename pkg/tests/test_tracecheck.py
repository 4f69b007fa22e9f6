import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matspec import corpus
from matspec.errors import DomainError, InvalidInputError, TrackingError
from matspec.invariants import logdetS_partial_sum
from matspec.potential import box, zero_potential
from matspec.tracecheck import (
    blaschke,
    eigen_sum,
    herglotz_residual,
    k_integral,
    lieb_thirring,
    log_abs_detS,
    logdetS_direct,
    t11_report,
    trace_identity,
    track_log,
)
from oracles import well_bound_state, well_jost_zero, well_scattering


def test_track_log_follows_winding():
    # (z - 0.5i)^3 from the principal log at the top, continued down a vertical segment
    f = lambda z: (z - 0.5j) ** 3
    for x in (2.0, -0.1):
        top = complex(x, 20.0)
        want = cmath.log(f(top)) + 3 * (cmath.log(complex(x, 0.5)) - cmath.log(top - 0.5j))
        assert track_log(f, complex(x, 1.0), 20.0) == pytest.approx(want)


def test_track_log_raises_on_zero():
    with pytest.raises(TrackingError):
        track_log(lambda z: z - 1j, complex(0.0, 0.5), 4.0)


def test_k_integral_gaussian():
    res = k_integral(lambda k: math.exp(-k * k))
    assert res.value == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-10)
    assert res.converged


def test_logdetS_direct_examples():
    assert logdetS_direct(zero_potential(), -50.0) == 0
    p = corpus.weak_bump()
    assert abs(logdetS_direct(p, -1e4) - logdetS_partial_sum(p, -1e4, 3)) < 1e-8
    S = well_scattering(2.0)[3]
    assert logdetS_direct(box(-2.0, 0, 1), 2.0).real == pytest.approx(math.log(abs(S)), abs=1e-8)


def test_logdetS_real_on_negative_axis():
    for p in (corpus.deep_well(), corpus.matrix_gaussians()):
        assert abs(logdetS_direct(p, -3.0).imag) < 1e-9


def test_log_abs_detS_nonnegative():
    for k in (0.1, 1.0, 5.0):
        assert log_abs_detS(corpus.rotated_pair(), k) >= -1e-9
    with pytest.raises(DomainError):
        log_abs_detS(corpus.rotated_pair(), 0.0)


def test_blaschke():
    assert blaschke(1j, [1.0]) == 0
    assert blaschke(2j, [1.0]) == pytest.approx(1 / 3)
    assert abs(blaschke(5.0, [1.0, 2.0])) == pytest.approx(1.0, abs=1e-14)


def test_eigen_sum():
    assert eigen_sum([], 2) == 0
    assert eigen_sum([-4.0], 1) == pytest.approx(-2 * 8 / 3)


def test_trace_identity_free_and_weak():
    r = trace_identity(zero_potential(), 0)
    assert r.lhs == r.rhs == 0
    r = trace_identity(corpus.weak_bump(), 0)
    assert r.relative_error <= 1e-3
    assert r.converged


def test_trace_identity_deep_well():
    r = trace_identity(corpus.deep_well(), 1)
    # the closure uses the zeros of det S; with Neumann eigenvalues it is off by about 1e-2
    assert r.relative_error_jost <= 1e-3
    assert r.eigen_sum_jost == pytest.approx(-2 * abs(-1.1027356692647254) ** 1.5 / 3, rel=1e-8)
    assert r.relative_error > 1e-3


def test_trace_identity_rejects_noncompact():
    with pytest.raises(InvalidInputError):
        trace_identity(corpus.slow_decay(), 0)


def test_herglotz():
    assert herglotz_residual(zero_potential(), 1 + 1j).residual == 0
    assert herglotz_residual(corpus.weak_bump(), 1 + 1j).residual <= 1e-4
    r = herglotz_residual(corpus.deep_well(), 3j, zeros="jost")
    assert r.residual <= 1e-4
    # the opposite kernel orientation is off by O(1)
    assert r.residual_reversed > 1e-2
    with pytest.raises(DomainError):
        herglotz_residual(corpus.weak_bump(), 1.0)


def test_lieb_thirring_examples():
    r = lieb_thirring(zero_potential(), 1.0)
    assert (r.moment_sum, r.bound, r.passed) == (0.0, 0.0, True)
    r = lieb_thirring(box(-2.0, 0, 1), 1.0)
    assert r.moment_sum == pytest.approx(-well_bound_state(), abs=1e-8)
    assert r.bound == pytest.approx(2 ** 1.5, rel=1e-10)
    assert r.passed
    r = lieb_thirring(corpus.square_well_block(), 1.0)
    assert r.moment_sum == pytest.approx(-well_bound_state(), abs=1e-8)
    assert r.bound == pytest.approx(2 * 2 ** 1.5, rel=1e-10)
    with pytest.raises(InvalidInputError):
        lieb_thirring(zero_potential(), 0.0)


def test_t11_examples():
    r = t11_report(zero_potential(), (1.0, 4.0), 0)
    assert r.min_norm_hinv == pytest.approx(math.pi, rel=1e-9)
    assert r.lower_ok and r.corrected_ok
    # ln||h^-1|| = ln(pi sqrt(lambda)) > 0 while I_0 and the eigenvalue sum vanish
    assert r.integral_log_hinv > 0 and r.literal_bound == 0 and not r.literal_ok
    assert r.integral_log_ratio == pytest.approx(-math.log(4) * 3, rel=1e-9)
    r = t11_report(box(-2.0, 0, 1), (0.5, 1.0), 0)
    assert r.lower_ok and r.literal_ok and r.corrected_ok
    # ||h^-1|| >= pi sqrt(lambda) is ||B||^2 >= 1/4 in disguise, which a repulsive bump violates
    r = t11_report(corpus.weak_bump(), (1.0, 2.0), 1)
    assert r.corrected_ok and not r.lower_ok
    assert r.min_norm_hinv < math.pi
    with pytest.raises(DomainError):
        t11_report(zero_potential(), (2.0, 1.0), 0)


@given(x=st.floats(-3, 3), y=st.floats(0.2, 3), k=st.floats(0.1, 2))
@settings(max_examples=40, deadline=None)
def test_blaschke_inside_unit_disc(x, y, k):
    assert abs(blaschke(complex(x, y), [k])) < 1


@given(k=st.floats(0.05, 20.0))
@settings(max_examples=20, deadline=None)
def test_detS_modulus_at_least_one(k):
    for p in (corpus.matrix_bump3(), corpus.diagonal_pair()):
        assert log_abs_detS(p, k) >= -1e-9
