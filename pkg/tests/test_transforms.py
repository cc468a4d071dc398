import numpy as np
import pytest

from moduli_lab.classes import ExponentSet, classify
from moduli_lab.errors import DomainError, Singular
from moduli_lab.matcore import DEFAULT_TOL, adjoint, min_eig, psd_power
from moduli_lab.transforms import (
    FurutaParams,
    aluthge_k_transform,
    forcing_set_extend,
    furuta_f,
    furuta_g,
    furuta_g_grid,
    modulus,
)
from moduli_lab.verify.generators import class_a_invertible, ginibre, haar_unitary, random_pd, random_psd


def test_modulus():
    a = ginibre(np.random.default_rng(0), 4)
    m = modulus(a)
    assert np.allclose(m @ m, adjoint(a) @ a, atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_aluthge_fixes_unitary(k):
    u = haar_unitary(np.random.default_rng(k), 4)
    assert np.allclose(aluthge_k_transform(u, k), u, atol=1e-10)


def test_aluthge_fixes_positive_diagonal():
    assert np.allclose(aluthge_k_transform(np.diag([2.0, 3.0]), 1), np.diag([2.0, 3.0]), atol=1e-12)


def test_aluthge_of_class_a_is_hyponormal():
    rng = np.random.default_rng(3)
    for k in (1, 2):
        for _ in range(5):
            a = class_a_invertible(rng, 3, k)
            out = classify(aluthge_k_transform(a, k), tol=DEFAULT_TOL.scaled(1e3))
            assert out["hyponormal"]["holds"]


def test_aluthge_rejects_bad_k():
    with pytest.raises(ValueError):
        aluthge_k_transform(np.eye(2), 0)


def test_forcing_set_extend_examples():
    assert forcing_set_extend(2, [2, 3]) == ExponentSet([2, 4, 6])
    s = ExponentSet([2, 5])
    assert forcing_set_extend(1, s) == ExponentSet([1, 2, 5])
    assert forcing_set_extend(3, [1]) == ExponentSet([3])


def test_forcing_set_extend_composes():
    s = ExponentSet([2, 3])
    twice = forcing_set_extend(2, forcing_set_extend(3, s))
    assert twice == ExponentSet([2, 6] + [6 * x for x in s])


def test_furuta_f_identity_and_diagonal():
    for p in (FurutaParams(), FurutaParams(m=2, p=3, delta=0.5)):
        for l in (0.5, 1.0, 3.0):
            assert np.allclose(furuta_f(np.eye(3), p, l), np.eye(3), atol=1e-12)
    a = np.diag([2.0, 3.0])
    for l in (1.0, 2.0):
        assert np.allclose(furuta_f(a, FurutaParams(), l), np.diag([4.0, 9.0]), atol=1e-10)


def test_furuta_f_monotone_on_class_a():
    rng = np.random.default_rng(4)
    fp = FurutaParams()
    for _ in range(10):
        a = class_a_invertible(rng, 3, 1)
        fs = [furuta_f(a, fp, l) for l in (1.0, 1.5, 2.0, 3.0)]
        for lo, hi in zip(fs, fs[1:]):
            assert min_eig(hi - lo) >= -1e-8


def test_furuta_f_domain():
    with pytest.raises(DomainError):
        furuta_f(np.eye(2), FurutaParams(delta=-2.0), 1.0)
    with pytest.raises(DomainError):
        furuta_f(np.eye(2), FurutaParams(), 0.0)
    with pytest.raises(Singular):
        furuta_f(np.diag([1.0, 0.0]), FurutaParams(), 1.0)


def test_furuta_g_identity():
    g = furuta_g(np.eye(3), np.eye(3), FurutaParams(delta=0.5), 2.0, 1.5)
    assert np.allclose(g, np.eye(3), atol=1e-12)


@pytest.mark.parametrize("lam,mu", [(1.0, 1.0), (2.0, 1.0), (1.5, 3.0)])
def test_furuta_g_diagonal_scalar_oracle(lam, mu):
    a, b = np.array([1.5, 2.0, 4.0]), np.array([0.7, 1.2, 3.0])
    fp = FurutaParams(delta=1.0)
    expo = (1.0 + mu) / (lam + mu)
    want = b ** (-mu) * (b**mu * a**lam) ** expo
    assert np.allclose(np.diag(furuta_g(np.diag(a), np.diag(b), fp, lam, mu)).real, want, rtol=1e-10)
    # with A = B the function collapses to A itself
    assert np.allclose(furuta_g(np.diag(a), np.diag(a), fp, lam, mu), np.diag(a), rtol=1e-10)


def test_furuta_g_monotone_on_constructed_pairs():
    rng = np.random.default_rng(5)
    fp = FurutaParams(delta=0.5)
    for _ in range(10):
        n = int(rng.integers(2, 5))
        b = random_pd(rng, n, floor=0.5) / 2.0
        c = random_psd(rng, n) / n
        bmh = psd_power(b, -0.5)
        a = bmh @ psd_power(b + c, 2.0) @ bmh
        a = 0.5 * (a + adjoint(a))
        gs = [furuta_g(a, b, fp, lam, 1.5) for lam in (1.0, 1.5, 2.0, 2.5)]
        for lo, hi in zip(gs, gs[1:]):
            assert min_eig(hi - lo) >= -1e-8


def test_furuta_g_grid_matches_pointwise():
    rng = np.random.default_rng(6)
    a, b = random_pd(rng, 4), random_pd(rng, 4)
    fp = FurutaParams(alpha0=0.5, beta0=2.0, delta=0.3)
    lams, mus = [1.0, 1.7, 2.5], [1.0, 2.0]
    grid = furuta_g_grid(a, b, fp, lams, mus)
    assert set(grid) == {(x, y) for x in lams for y in mus}
    for (x, y), g in grid.items():
        assert np.allclose(g, furuta_g(a, b, fp, x, y), atol=1e-9)


def test_furuta_g_domain():
    fp = FurutaParams(delta=3.0)
    with pytest.raises(DomainError):
        furuta_g(np.eye(2), np.eye(2), FurutaParams(), 0.5, 1.0)
    with pytest.raises(DomainError):
        furuta_g(np.eye(2), np.eye(2), fp, 1.0, 1.0)
    with pytest.raises(DomainError):
        furuta_g_grid(np.eye(2), np.eye(2), fp, [1.0], [1.0])
    with pytest.raises(Singular):
        furuta_g(np.eye(2), np.diag([1.0, 0.0]), FurutaParams(), 1.0, 1.0)


def test_furuta_params_validation():
    with pytest.raises(ValueError):
        FurutaParams(m=0)
    with pytest.raises(ValueError):
        FurutaParams(alpha0=0.0, beta0=0.0)
