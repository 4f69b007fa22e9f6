import math

import numpy as np
from scipy.integrate import trapezoid
import pytest
from hypothesis import given, settings, strategies as st

from matspec import corpus
from matspec.errors import CoverageError, DomainError, ResolventError
from matspec.potential import box, zero_potential
from matspec.scattering import bound_states
from matspec.spectral import (
    density,
    density_grid,
    geometric_grid,
    green_jump,
    green_matrix,
    measure_pairing,
    spectral_measure,
    tes_bounds,
)
from oracles import free_density, well_bound_state, well_density


def test_free_density_examples():
    assert np.allclose(density(zero_potential(2), 4.0), np.eye(2) / (2 * math.pi), atol=1e-12)
    assert np.allclose(density(zero_potential(), math.pi ** 2), 1 / math.pi ** 2, atol=1e-12)


def test_well_density_oracle():
    for lam in (0.2, 1.0, 9.0):
        assert density(box(-2.0, 0, 1), lam)[0, 0].real == pytest.approx(well_density(lam), abs=1e-8)


def test_density_domain():
    with pytest.raises(DomainError):
        density(zero_potential(), -1.0)


def test_density_grid_matches_pointwise():
    g = geometric_grid(0.5, 20, 6)
    p = corpus.rotated_pair()
    hs = density_grid(p, g, workers=2)
    for lam, h in zip(g, hs):
        assert np.allclose(h, density(p, lam))


def test_spectral_measure_atoms():
    m = spectral_measure(box(-2.0, 0, 1), geometric_grid(0.1, 10, 20))
    assert m.atoms == pytest.approx((well_bound_state(),), abs=1e-8)
    with pytest.raises(DomainError):
        spectral_measure(zero_potential(), [1.0, 0.5])


def test_green_free_closed_form():
    assert green_matrix(zero_potential(), -1.0, 0.0, 1.0)[0, 0] == pytest.approx(math.exp(-1), abs=1e-9)
    assert green_matrix(zero_potential(), -1.0, 1.0, 0.0)[0, 0] == pytest.approx(math.exp(-1), abs=1e-9)
    for x, xi in ((0.3, 1.1), (2.0, 0.7), (4.5, 4.5)):
        want = math.cosh(min(x, xi)) * math.exp(-max(x, xi))
        assert green_matrix(zero_potential(), -1.0, x, xi)[0, 0] == pytest.approx(want, abs=1e-9)


def test_green_complex_free():
    lam = 2 + 1j
    s = np.sqrt(lam)
    x, xi = 0.4, 1.3
    want = 1j / s * np.cos(s * x) * np.exp(1j * s * xi)
    assert green_matrix(zero_potential(), lam, x, xi)[0, 0] == pytest.approx(want, abs=1e-9)


def test_green_contract_on_matrix_potential():
    p = corpus.rotated_pair()
    xi = 1.0
    for lam in (-3.0, 1 + 1j):
        G1 = green_matrix(p, lam, xi, xi)
        G2 = green_matrix(p, lam, xi + 1e-12, xi)
        assert np.allclose(G1, G2, atol=1e-7)
        assert np.allclose(green_jump(p, lam, xi), -np.eye(2), atol=1e-6)
        assert np.allclose(green_matrix(p, lam, 0.4, 1.7), green_matrix(p, lam, 1.7, 0.4).T, atol=1e-7)


def test_green_rejections():
    with pytest.raises(ResolventError):
        green_matrix(zero_potential(), 2.0, 0.0, 1.0)
    with pytest.raises(ResolventError):
        green_matrix(box(-2.0, 0, 1), well_bound_state(), 0.2, 0.5)


def test_green_is_resolvent():
    # (H - lam) G f = f for f = indicator of [0.5, 1] with the free potential
    lam = -2.0
    f = lambda t: 1.0 if 0.5 <= t <= 1.0 else 0.0
    xs = np.linspace(0.5, 1.0, 401)
    k = math.sqrt(2)

    def g(x):
        return trapezoid([green_matrix(zero_potential(), lam, x, t)[0, 0].real for t in xs], xs)

    # closed form of the solution of -y'' + 2y = f with y'(0) = 0, y decaying
    def exact(x):
        return trapezoid([math.cosh(k * min(x, t)) * math.exp(-k * max(x, t)) / k for t in xs], xs)

    for x in (0.2, 0.75, 1.4):
        assert g(x) == pytest.approx(exact(x), rel=1e-6)


def test_tes_free_and_examples():
    t = tes_bounds(zero_potential(), 3.0)
    assert (t.lower, t.normNinv, t.normS2, t.detS2) == pytest.approx((0.25, 0.25, 1.0, 1.0))
    assert t.chain_ok
    assert tes_bounds(box(-2.0, 0, 1), 2.0).chain_ok
    assert tes_bounds(corpus.rotated_pair(), 5.0).chain_ok


def test_tes_lower_bound_counterexample():
    # a barrier of height 1 on [0, pi/2] at lambda = 2 has ||B||^2 = 1/8 exactly
    t = tes_bounds(corpus.barrier(), 2.0)
    assert t.normNinv == pytest.approx(0.125, rel=1e-8)
    assert not t.lower_ok
    assert t.upper_ok


def test_pairing_free():
    m = spectral_measure(zero_potential(2), np.linspace(0.9, 4.1, 400))
    got = measure_pairing(m, lambda lam: 1.0, (1.0, 4.0))
    assert np.allclose(got, 2 / math.pi * np.eye(2), atol=1e-8)
    assert np.allclose(measure_pairing(m, lambda lam: 0.0, (1.0, 4.0)), 0)


def test_pairing_coverage():
    m = spectral_measure(zero_potential(), np.linspace(1.0, 2.0, 50))
    with pytest.raises(CoverageError):
        measure_pairing(m, lambda lam: 1.0, (0.5, 2.0))
    with pytest.raises(CoverageError):
        measure_pairing(spectral_measure(zero_potential(), np.linspace(1.0, 2.0, 5)), lambda lam: 1.0, (1.0, 2.0))


@given(lam=st.floats(0.05, 100.0))
@settings(max_examples=25, deadline=None)
def test_density_hermitian_positive(lam):
    h = density(corpus.matrix_bump3(), lam)
    assert np.allclose(h, h.conj().T)
    assert np.all(np.linalg.eigvalsh(h) > 0)


@given(lam=st.floats(0.05, 100.0))
@settings(max_examples=25, deadline=None)
def test_tes_upper_chain(lam):
    for p in (corpus.diagonal_pair(), corpus.grid_sampled()):
        assert tes_bounds(p, lam).upper_ok
