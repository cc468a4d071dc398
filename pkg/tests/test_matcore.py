import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from moduli_lab.errors import DomainError, MatrixFormatError, NoConvergence, NotHermitian, NotPSD
from moduli_lab.matcore import (
    DEFAULT_TOL,
    Tolerance,
    adjoint,
    commutant_root_check,
    fun_calc,
    fun_calc_many,
    herm_eig,
    integral_rep_xp,
    loewner_leq,
    loewner_margin,
    matrix_from_json,
    matrix_to_json,
    min_eig,
    monotonicity_sample_check,
    mpow,
    opnorm,
    psd_power,
)


def ginibre(rng, n):
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)


def random_herm(rng, n):
    g = ginibre(rng, n)
    return g + adjoint(g)


def random_psd(rng, n, rank=None):
    g = ginibre(rng, n)[: (n if rank is None else rank)]
    return adjoint(g) @ g


def recon(e):
    return (e.eigenvectors * e.eigenvalues) @ adjoint(e.eigenvectors)


# ---------------------------------------------------------------------------
# herm_eig


def test_eig_identity():
    e = herm_eig(np.eye(3))
    assert np.allclose(e.eigenvalues, [1, 1, 1])
    assert np.allclose(adjoint(e.eigenvectors) @ e.eigenvectors, np.eye(3), atol=1e-14)


def test_eig_diagonal():
    assert np.allclose(herm_eig(np.diag([3.0, 1.0, 2.0])).eigenvalues, [1, 2, 3])


def test_eig_two_by_two():
    assert np.allclose(herm_eig(np.array([[2.0, 1.0], [1.0, 2.0]])).eigenvalues, [1, 3], atol=1e-14)


def test_eig_matches_lapack_oracle():
    rng = np.random.default_rng(11)
    for n in (1, 2, 5, 9, 16, 32):
        h = random_herm(rng, n)
        assert np.allclose(herm_eig(h).eigenvalues, np.linalg.eigvalsh(h), atol=1e-12 * opnorm(h))


def test_eig_deterministic():
    h = random_herm(np.random.default_rng(5), 7)
    a, b = herm_eig(h), herm_eig(h)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_eig_graded_small_eigenvalues_are_accurate():
    # relative stopping keeps tiny eigenvalues of a graded PSD matrix
    rng = np.random.default_rng(3)
    q, _ = np.linalg.qr(ginibre(rng, 5))
    lam = np.array([1.0, 1e-3, 1e-6, 1e-9, 1e-12])
    p = (q * lam) @ adjoint(q)
    got = herm_eig(p).eigenvalues[::-1]
    assert np.allclose(got / lam, 1.0, atol=1e-3)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_eig_sweep_limit(monkeypatch):
    import moduli_lab.matcore as mc

    monkeypatch.setattr(mc, "JACOBI_MAX_SWEEPS", 0)
    with pytest.raises(NoConvergence):
        herm_eig(np.array([[1.0, 0.5], [0.5, 2.0]]))


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-1e3, 1e3, allow_subnormal=False)))
def test_eig_reconstruction_property(x):
    h = x + x.T + 1j * (x - x.T)
    e = herm_eig(h)
    scale = max(opnorm(h), 1e-300)
    assert opnorm(recon(e) - h) <= 1e-10 * scale + 1e-300
    assert opnorm(adjoint(e.eigenvectors) @ e.eigenvectors - np.eye(6)) <= 1e-10
    assert np.all(np.diff(e.eigenvalues) >= 0)


# ---------------------------------------------------------------------------
# functional calculus


def test_fun_calc_identity_sqrt():
    assert np.allclose(fun_calc(np.eye(3), np.sqrt), np.eye(3))


def test_fun_calc_diagonal_sqrt():
    assert np.allclose(fun_calc(np.diag([4.0, 9.0]), np.sqrt), np.diag([2.0, 3.0]))


def test_fun_calc_cube_root_cubed():
    p = random_psd(np.random.default_rng(2), 6)
    r = fun_calc(p, np.cbrt)
    assert opnorm(r @ r @ r - p) <= 1e-9 * opnorm(p)


def test_fun_calc_identity_function_returns_input():
    p = random_psd(np.random.default_rng(4), 5)
    assert opnorm(fun_calc(p, lambda x: x) - p) <= 1e-12 * opnorm(p)


def test_fun_calc_clamps_tiny_negative_and_rejects_negative():
    p = np.diag([1.0, -1e-14])
    assert np.allclose(fun_calc(p, np.sqrt), np.diag([1.0, 0.0]))
    with pytest.raises(NotPSD):
        fun_calc(np.diag([1.0, -1e-3]), np.sqrt)


def test_fun_calc_domain_error_on_log_of_singular():
    with pytest.raises(DomainError):
        fun_calc(np.diag([1.0, 0.0]), np.log)


def test_fun_calc_many_matches_single_calls():
    p = random_psd(np.random.default_rng(8), 5)
    fs = [np.sqrt, np.cbrt, lambda x: x**0.7]
    for got, f in zip(fun_calc_many(p, fs), fs):
        assert np.allclose(got, fun_calc(p, f), atol=1e-13)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_root_consistency(k):
    rng = np.random.default_rng(k)
    for n in (2, 7, 16):
        p = random_psd(rng, n)
        r = psd_power(p, 1.0 / k)
        assert opnorm(mpow(r, k) - p) <= 1e-8 * opnorm(p)


def test_mpow_zero_and_bad_exponent():
    a = ginibre(np.random.default_rng(0), 3)
    assert np.allclose(mpow(a, 0), np.eye(3))
    assert np.allclose(mpow(a, 3), a @ a @ a)


# ---------------------------------------------------------------------------
# Loewner order


def test_loewner_examples():
    assert loewner_leq(np.zeros((2, 2)), np.eye(2)).holds
    res = loewner_leq(np.diag([1.0, 3.0]), np.diag([2.0, 2.0]))
    assert not res.holds and res.witness == pytest.approx(-1.0)
    rng = np.random.default_rng(1)
    b, c = random_herm(rng, 4), ginibre(rng, 4)
    assert loewner_leq(b, b + adjoint(c) @ c).holds


def test_loewner_partial_order():
    rng = np.random.default_rng(9)
    x = random_herm(rng, 5)
    assert loewner_leq(x, x).holds
    y = x + random_psd(rng, 5, 2)
    z = y + random_psd(rng, 5, 3)
    assert loewner_leq(x, y).holds and loewner_leq(y, z).holds and loewner_leq(x, z).holds
    assert not loewner_leq(y, x).holds


def test_loewner_margin_is_scale_free():
    rng = np.random.default_rng(10)
    x, y = random_herm(rng, 4), random_herm(rng, 4)
    assert loewner_margin(x, y) == pytest.approx(loewner_margin(7 * x, 7 * y), rel=1e-9)


def test_loewner_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        loewner_leq(np.array([[0.0, 1.0], [0.0, 0.0]]), np.eye(2))


def test_loewner_heinz_half_power():
    rng = np.random.default_rng(12)
    for _ in range(30):
        b = random_psd(rng, 5)
        a = b + random_psd(rng, 5, 2)
        for p in (0.1, 0.5, 0.9):
            assert loewner_margin(psd_power(b, p), psd_power(a, p)) >= -1e-8


# ---------------------------------------------------------------------------
# commutant roots, integral representation, monotonicity sampling


def test_commutant_examples():
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    res = commutant_root_check(np.diag([1.0, 4.0]), swap, 2)
    assert not res.commutes_with_P and not res.commutes_with_root
    assert res.residuals[0] == pytest.approx(3.0)
    res = commutant_root_check(random_psd(np.random.default_rng(0), 3), np.eye(3), 3)
    assert res.commutes_with_P and res.commutes_with_root


def test_commutant_polynomial_in_p():
    p = random_psd(np.random.default_rng(13), 5)
    p = p / opnorm(p)
    t = 0.3 * np.eye(5) - 1.2 * p + 0.7 * p @ p
    res = commutant_root_check(p, t, 3)
    assert res.commutes_with_P and res.commutes_with_root


@pytest.mark.parametrize("x,p,tol", [(1.0, 0.3, 1e-5), (4.0, 0.5, 1e-4), (9.0, 0.25, 1e-4)])
def test_integral_rep_examples(x, p, tol):
    assert integral_rep_xp(x, p, 2000) == pytest.approx(x**p, abs=tol)


def test_integral_rep_grid():
    for x in np.geomspace(0.1, 100, 13):
        for p in (0.25, 0.5, 0.75):
            assert abs(integral_rep_xp(x, p, 2000) - x**p) <= 1e-4 * max(1.0, x**p)


def test_integral_rep_domain():
    with pytest.raises(DomainError):
        integral_rep_xp(1.0, 1.0)
    with pytest.raises(DomainError):
        integral_rep_xp(0.0, 0.5)


def test_monotonicity_sampling():
    assert monotonicity_sample_check(lambda x: x, 3, trials=50).passed
    assert not monotonicity_sample_check(lambda x: x**2, 2, trials=200).passed
    for n in (2, 5, 8):
        assert monotonicity_sample_check(np.sqrt, n, trials=40, seed=n).passed


# ---------------------------------------------------------------------------
# tolerance and JSON


def test_tolerance():
    assert DEFAULT_TOL.threshold(2.0) == pytest.approx(1e-12 + 2e-9)
    assert Tolerance(1.0, 2.0).scaled(10).to_dict() == {"abs": 10.0, "rel": 20.0}
    with pytest.raises(ValueError):
        Tolerance(-1.0, 0.0)


def test_matrix_json_round_trip():
    a = ginibre(np.random.default_rng(0), 3)
    obj = json.loads(json.dumps(matrix_to_json(a)))
    assert np.array_equal(matrix_from_json(obj), a)
    assert np.array_equal(matrix_from_json({"n": 1, "re": [[2.5]]}), np.array([[2.5 + 0j]]))


@pytest.mark.parametrize(
    "obj",
    [
        {"n": 2, "re": [[1, 2], [3]]},
        {"n": 2, "re": [[1, 2]]},
        {"re": [[1]]},
        {"n": 0, "re": []},
        {"n": 1, "re": [[math.inf]]},
        {"n": 1, "re": [["x"]]},
        {"n": 1, "re": [[1]], "im": [[1, 2]]},
        [1, 2],
    ],
)
def test_matrix_json_rejects(obj):
    with pytest.raises(MatrixFormatError):
        matrix_from_json(obj)


def test_min_eig():
    assert min_eig(np.diag([3.0, -2.0, 1.0])) == pytest.approx(-2.0)
