import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moduli_lab.decomp import (
    berberian_check,
    check_aprime_injective,
    douglas_factor,
    halmos_unitaries,
    kernel_range_blocks,
    onsr_norms,
    phi_psi_maps,
    polar,
    reassemble,
)
from moduli_lab.errors import NotContraction, NotPSD, OrderViolated
from moduli_lab.matcore import adjoint, min_eig, opnorm, psd_power
from moduli_lab.shifts import periodic_shift
from moduli_lab.verify.generators import ginibre, haar_unitary, random_normal, random_psd

JORDAN = np.array([[0.0, 1.0], [0.0, 0.0]])


def test_polar_unitary():
    u = haar_unitary(np.random.default_rng(0), 4)
    parts = polar(u)
    assert np.allclose(parts.U, u, atol=1e-12)
    assert np.allclose(parts.P, np.eye(4), atol=1e-12)


def test_polar_diagonal_with_kernel():
    parts = polar(np.diag([2.0, 0.0]))
    assert np.allclose(parts.U, np.diag([1.0, 0.0]))
    assert np.allclose(parts.P, np.diag([2.0, 0.0]))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 16), st.booleans())
def test_polar_reconstructs(seed, n, singular):
    rng = np.random.default_rng(seed)
    a = ginibre(rng, n)
    if singular and n > 1:
        a[:, int(rng.integers(n))] = 0.0
    u, p = polar(a)
    assert opnorm(u @ p - a) <= 1e-9 * opnorm(a)
    assert opnorm(psd_power(adjoint(a) @ a, 0.5) - p) <= 1e-9 * opnorm(a)
    # U*U is the projection onto the closure of range(P)
    proj = adjoint(u) @ u
    assert opnorm(proj @ proj - proj) <= 1e-9
    assert opnorm(proj @ p - p) <= 1e-9 * opnorm(a)


def test_blocks_jordan():
    blocks = kernel_range_blocks(JORDAN)
    assert blocks.r == 1
    assert np.allclose(blocks.Aprime, [[0.0]])
    assert np.allclose(np.abs(blocks.R), [[1.0]])
    assert np.allclose(blocks.P, np.diag([0.0, 1.0]))


def test_blocks_invertible_and_zero():
    a = ginibre(np.random.default_rng(1), 3)
    blocks = kernel_range_blocks(a)
    assert blocks.r == 3 and blocks.R.shape == (0, 3)
    assert np.allclose(np.sort(np.abs(np.linalg.eigvals(blocks.Aprime))), np.sort(np.abs(np.linalg.eigvals(a))))
    blocks = kernel_range_blocks(np.zeros((3, 3)))
    assert blocks.r == 0 and blocks.Aprime.shape == (0, 0)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 8), st.integers(0, 3))
def test_blocks_reassemble(seed, n, kernel_dim):
    rng = np.random.default_rng(seed)
    a = ginibre(rng, n)
    a = a @ haar_unitary(rng, n)[:, : max(n - kernel_dim, 0)] @ adjoint(haar_unitary(rng, n)[:, : max(n - kernel_dim, 0)])
    blocks = kernel_range_blocks(a)
    assert opnorm(reassemble(blocks) - a) <= 1e-9 * max(opnorm(a), 1.0)
    assert opnorm(blocks.P @ blocks.P - blocks.P) <= 1e-9
    assert opnorm(blocks.P - adjoint(blocks.P)) <= 1e-12


def test_aprime_normal_invertible():
    a = random_normal(np.random.default_rng(2), 4, invertible=True)
    chk = check_aprime_injective(a, 3)
    assert chk.eq_residual <= 1e-9 and chk.min_singular_of_Aprime > 1e-3


def test_aprime_jordan():
    assert check_aprime_injective(JORDAN, 2).eq_residual == pytest.approx(1.0)


def test_aprime_constant_periodic_shift():
    chk = check_aprime_injective(periodic_shift([0.7] * 6), 3)
    assert chk.eq_residual <= 1e-12 and chk.min_singular_of_Aprime == pytest.approx(0.7)


def test_onsr_norm_equality():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(2, 7))
        z = rng.uniform(0.3, 2.0, n) * np.exp(2j * np.pi * rng.random(n))
        z[: int(rng.integers(0, n))] = 0.0
        u = haar_unitary(rng, n)
        a = (u * z) @ adjoint(u)
        for k in (1, 2, 3):
            lhs, rhs = onsr_norms(a, k)
            assert abs(lhs - rhs) <= 1e-6 * max(rhs, 1.0)


def test_douglas_polar_case():
    a = ginibre(np.random.default_rng(4), 4)
    q = douglas_factor(a, adjoint(a) @ a)
    assert np.allclose(q, polar(a).U, atol=1e-9)
    assert opnorm(q) <= 1 + 1e-9


def test_douglas_trivial():
    assert np.allclose(douglas_factor(np.eye(3), np.eye(3)), np.eye(3))
    b = random_psd(np.random.default_rng(5), 3)
    assert np.allclose(douglas_factor(np.zeros((3, 3)), b), 0.0)


def test_douglas_general_and_order_violation():
    rng = np.random.default_rng(6)
    a = ginibre(rng, 4)
    b = adjoint(a) @ a + random_psd(rng, 4, 2)
    q = douglas_factor(a, b)
    assert opnorm(q @ psd_power(b, 0.5) - a) <= 1e-9 * opnorm(a)
    assert opnorm(q) <= 1 + 1e-9
    with pytest.raises(OrderViolated):
        douglas_factor(2 * np.eye(2), np.eye(2))


def test_halmos_zero():
    u, v = halmos_unitaries(np.zeros((2, 2)))
    i, z = np.eye(2), np.zeros((2, 2))
    assert np.allclose(u, np.block([[z, i], [i, z]]))
    assert np.allclose(v, np.block([[z, -i], [i, z]]))


def test_halmos_unitary_input():
    q = haar_unitary(np.random.default_rng(7), 3)
    u, _ = halmos_unitaries(q)
    assert np.allclose(u, np.block([[q, np.zeros((3, 3))], [np.zeros((3, 3)), -adjoint(q)]]), atol=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 8), st.floats(0.0, 1.0))
def test_halmos_unitarity(seed, n, norm):
    g = ginibre(np.random.default_rng(seed), n)
    q = norm * g / opnorm(g)
    for w in halmos_unitaries(q):
        assert opnorm(adjoint(w) @ w - np.eye(2 * n)) <= 1e-9


def test_halmos_rejects_expansion():
    with pytest.raises(NotContraction):
        halmos_unitaries(2 * np.eye(2))


def test_phi_psi_unital_and_compression():
    rng = np.random.default_rng(8)
    a = ginibre(rng, 3)
    b = adjoint(a) @ a + random_psd(rng, 3, 1)
    q = douglas_factor(a, b)
    pair = halmos_unitaries(q)
    res = phi_psi_maps(pair, np.eye(6))
    assert np.allclose(res.phi, np.eye(6)) and np.allclose(res.psi, np.eye(3))
    bb = psd_power(b, 0.7)
    x = np.zeros((6, 6), dtype=complex)
    x[:3, :3] = bb
    assert np.allclose(phi_psi_maps(pair, x).psi, adjoint(q) @ bb @ q, atol=1e-10)


def test_phi_psi_positive():
    rng = np.random.default_rng(9)
    for _ in range(200):
        n = int(rng.integers(1, 5))
        g = ginibre(rng, n)
        pair = halmos_unitaries(rng.uniform(0, 1) * g / opnorm(g))
        x = random_psd(rng, 2 * n)
        res = phi_psi_maps(pair, x)
        assert min_eig(res.psi) >= -1e-9 * opnorm(x)
        assert min_eig(res.phi) >= -1e-9 * opnorm(x)


def test_berberian_examples():
    t = ginibre(np.random.default_rng(10), 3)
    chk = berberian_check(np.eye(3), np.eye(3), t, 2)
    assert chk.hyp_residual <= 1e-12 and chk.concl_residual <= 1e-12
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    chk = berberian_check(np.diag([1.0, 4.0]), np.diag([4.0, 1.0]), swap, 2)
    assert chk.hyp_residual <= 1e-12 and chk.concl_residual <= 1e-12 and chk.embedded_residual <= 1e-9
    chk = berberian_check(np.diag([1.0, 4.0]), np.diag([4.0, 1.0]), np.zeros((2, 2)), 3)
    assert chk.hyp_residual == 0 and chk.concl_residual == 0


def test_berberian_detects_failure_and_rejects_non_psd():
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    chk = berberian_check(np.diag([1.0, 4.0]), np.diag([1.0, 4.0]), swap, 2)
    assert chk.hyp_residual > 1 and chk.concl_residual > 1
    with pytest.raises(NotPSD):
        berberian_check(np.diag([1.0, -1.0]), np.eye(2), swap, 2)
