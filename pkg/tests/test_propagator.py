import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from matspec import _backend, corpus
from matspec.errors import ContractError, InvalidInputError
from matspec.potential import box, zero_potential
from matspec.propagator import (
    CauchyData,
    checkpoints,
    integrate,
    jost_solution,
    neumann_solution,
    propagate,
    sqrt_branch,
    symplectic_defect,
    transfer_matrix,
    wronskian,
    wronskian_drift,
)


def test_sqrt_branch():
    assert sqrt_branch(4.0) == 2
    assert sqrt_branch(4.0, side=-1) == -2
    assert sqrt_branch(-9.0) == 3j
    z = sqrt_branch(-3 + 4j)
    assert z.imag > 0 and z * z == pytest.approx(-3 + 4j)


def test_propagate_free_cosine():
    init = CauchyData(np.eye(2, dtype=complex), np.zeros((2, 2), complex), 0.0, 1.0)
    out = propagate(zero_potential(2), 1.0, 0.0, math.pi, init)
    assert np.allclose(out.value, -np.eye(2), atol=1e-10)
    assert np.allclose(out.derivative, 0, atol=1e-10)


def test_propagate_well_interior():
    init = CauchyData(np.eye(1, dtype=complex), np.zeros((1, 1), complex), 0.0, -1.0)
    out = propagate(box(-2.0, 0, 1), -1.0, 0.0, 1.0, init)
    assert out.value[0, 0] == pytest.approx(math.cos(1), abs=1e-10)
    assert out.derivative[0, 0] == pytest.approx(-math.sin(1), abs=1e-10)


def test_propagate_plane_wave():
    init = CauchyData(np.eye(1, dtype=complex), -2j * np.eye(1), 0.0, 4.0)
    out = propagate(zero_potential(), 4.0, 0.0, math.pi / 4, init)
    assert out.value[0, 0] == pytest.approx(-1j, abs=1e-10)
    assert out.derivative[0, 0] == pytest.approx(-2, abs=1e-10)


def test_propagate_rejects_mismatched_start():
    init = CauchyData(np.eye(1, dtype=complex), np.zeros((1, 1), complex), 0.5, 1.0)
    with pytest.raises(ContractError):
        propagate(zero_potential(), 1.0, 0.0, 1.0, init)


def test_transfer_matrix_examples():
    M = transfer_matrix(zero_potential(), 1.0, math.pi / 2).M
    assert np.allclose(M, [[0, 1], [-1, 0]], atol=1e-10)
    assert np.allclose(transfer_matrix(corpus.rotated_pair(), 3.0, 0.0).M, np.eye(4))
    assert np.allclose(transfer_matrix(zero_potential(), 0.0, 2.0).M, [[1, 2], [0, 1]], atol=1e-10)
    with pytest.raises(InvalidInputError):
        transfer_matrix(zero_potential(), 1.0, -1.0)


def test_symplectic_defect_examples():
    assert symplectic_defect(np.eye(2)) == 0
    assert symplectic_defect(np.array([[0.0, 1], [-1, 0]])) == 0
    assert symplectic_defect(transfer_matrix(box(-2.0, 0, 1), 2.0, 3.0)) <= 1e-9


def test_wronskian_examples():
    k, x = 1.7, 0.9
    I = np.eye(2)
    a = CauchyData(math.cos(k * x) * I, -k * math.sin(k * x) * I, x, k * k)
    b = CauchyData(math.sin(k * x) / k * I, math.cos(k * x) * I, x, k * k)
    assert np.allclose(wronskian(a, b), I)
    vm = jost_solution(zero_potential(2), 1.0, 0.7, side=1)
    vp = jost_solution(zero_potential(2), 1.0, 0.7, side=-1)
    assert np.allclose(wronskian(vm, vp), 2j * I, atol=1e-10)
    u = neumann_solution(corpus.rotated_pair(), 3.0, 1.3)
    assert np.allclose(wronskian(u, u), 0, atol=1e-10)
    with pytest.raises(ContractError):
        wronskian(u, neumann_solution(corpus.rotated_pair(), 3.0, 1.0))


def test_neumann_and_jost_values():
    assert np.allclose(neumann_solution(zero_potential(2), 1.0, math.pi).value, -np.eye(2), atol=1e-10)
    assert neumann_solution(zero_potential(), -1.0, 1.0).value[0, 0] == pytest.approx(math.cosh(1), rel=1e-10)
    lam = -1.2077956677
    u = neumann_solution(box(-2.0, 0, 1), lam, 1.0)
    assert u.value[0, 0].real == pytest.approx(math.cos(math.sqrt(lam + 2)), rel=1e-9)
    assert jost_solution(zero_potential(), 4.0, math.pi / 4).value[0, 0] == pytest.approx(-1j, abs=1e-10)
    assert jost_solution(zero_potential(), -1.0, 2.0).value[0, 0] == pytest.approx(math.exp(2), rel=1e-10)
    w0 = jost_solution(zero_potential(), 1.0, 0.0)
    assert w0.value[0, 0] == 1 and w0.derivative[0, 0] == -1j


def test_checkpoints_and_drift():
    p = corpus.diagonal_pair()
    n = p.n
    a = CauchyData(np.eye(n, dtype=complex), np.zeros((n, n), complex), 0.0, 5.0)
    b = CauchyData(np.zeros((n, n), complex), np.eye(n, dtype=complex), 0.0, 5.0)
    sa = checkpoints(p, 5.0, a, 2.5)
    assert [c.x for c in sa] == [1.0, 2.0, 2.5]
    sb = checkpoints(p, 5.0, b, 2.5)
    assert wronskian_drift([a] + sa, [b] + sb) < 1e-9


def test_backward_integration_inverts_forward():
    p = corpus.matrix_bump3()
    Y0 = np.eye(6, dtype=complex)
    fwd = integrate(p, 2.0, 0.0, [2.0], Y0)[0]
    back = integrate(p, 2.0, 2.0, [0.0], fwd)[0]
    assert np.allclose(back, Y0, atol=1e-9)


def test_complex_lambda_free_plane_wave():
    lam = 1 + 2j
    s = sqrt_branch(lam)
    w = jost_solution(zero_potential(), lam, 3.0)
    assert w.value[0, 0] == pytest.approx(np.exp(-1j * s * 3.0), rel=1e-9)


@pytest.mark.parametrize("name", list(corpus.audit_corpus()))
def test_backends_agree(name):
    p = corpus.audit_corpus()[name]
    kernels = _backend.available()
    if len(kernels) < 2:
        pytest.skip("compiled kernel not built")
    Y0 = np.eye(2 * p.n, dtype=complex)
    for lam in (-4.0, 3.0, 2 + 1j):
        ref = integrate(p, lam, 0.0, [1.0, 2.5], Y0, kernel=kernels["python"])
        got = integrate(p, lam, 0.0, [1.0, 2.5], Y0, kernel=kernels["cython"])
        assert np.max(np.abs(ref - got)) <= 1e-12 * np.max(np.abs(ref))


@given(lam=st.floats(-20, 60), x=st.floats(0.1, 3.0))
@settings(max_examples=25, deadline=None)
def test_transfer_matrix_symplectic(lam, x):
    M = transfer_matrix(corpus.rotated_pair(), lam, x)
    assert symplectic_defect(M) <= 1e-9 * (1 + x) * (1 + abs(lam)) * max(1.0, np.linalg.norm(M.M, 2)) ** 2


@given(lam=st.floats(-10, 40), x=st.floats(0.5, 3.0))
@settings(max_examples=20, deadline=None)
def test_transfer_matrix_composes(lam, x):
    p = corpus.scalar_bump()
    M1 = transfer_matrix(p, lam, x).M
    Y = integrate(p, lam, x, [x + 0.7], M1)[0]
    assert np.allclose(Y, transfer_matrix(p, lam, x + 0.7).M, rtol=1e-8, atol=1e-8 * np.abs(Y).max())


def test_backend_override():
    import os
    import subprocess
    import sys

    env = dict(os.environ, MATSPEC_BACKEND="python")
    out = subprocess.run([sys.executable, "-c", "import matspec; print(matspec.BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"
