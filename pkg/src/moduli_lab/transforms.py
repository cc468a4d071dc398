"""Operator transforms and the Furuta-type matrix functions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classes import ExponentSet, is_invertible
from .decomp import polar
from .errors import DomainError, Singular
from .matcore import DEFAULT_TOL, Tolerance, adjoint, as_matrix, fun_calc_many, herm_eig, mpow, psd_power


@dataclass(frozen=True)
class FurutaParams:
    m: int = 1
    p: int = 1
    delta: float = 0.0
    alpha0: float = 1.0
    beta0: float = 1.0

    def __post_init__(self):
        if self.m < 1 or self.p < 1:
            raise ValueError("m and p must be positive integers")
        if self.alpha0 < 0 or self.beta0 < 0 or self.alpha0 + self.beta0 <= 0:
            raise ValueError("alpha0, beta0 must be nonnegative with positive sum")


def modulus(a, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``|A| = (A*A)^(1/2)``."""
    a = as_matrix(a)
    return psd_power(adjoint(a) @ a, 0.5, tol)


def aluthge_k_transform(a, k: int = 1, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``W U ||A|^k A|^(1/(k+1))`` where ``A = U|A|`` and ``|A||A*| = W ||A||A*||``."""
    a = as_matrix(a)
    if k < 1:
        raise ValueError("k must be a positive integer")
    u, mod = polar(a, tol)
    mod_star = psd_power(a @ adjoint(a), 0.5, tol)
    w = polar(mod @ mod_star, tol).U
    inner = psd_power(adjoint(a) @ a, k, tol)  # |A|^(2k)
    top = psd_power(adjoint(a) @ inner @ a, 1.0 / (2 * (k + 1)), tol)
    return w @ u @ top


def forcing_set_extend(n: int, exps) -> ExponentSet:
    """``{n} | {n*s : s in S}``."""
    exps = exps if isinstance(exps, ExponentSet) else ExponentSet(exps)
    if n < 1:
        raise ValueError("n must be a positive integer")
    return ExponentSet([n] + [n * s for s in exps])


def _require_invertible(a, tol):
    if not is_invertible(a, tol):
        raise Singular("operator is not invertible at the working tolerance")


def furuta_f(a, params: FurutaParams, l: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``f_{p,delta}(l) = (A*^m |A^p|^(2l) A^m)^((delta+m)/(p*l+m))`` for invertible ``A``."""
    a = as_matrix(a)
    m, p, delta = params.m, params.p, params.delta
    if delta < -m:
        raise DomainError(f"delta must be >= -m, got {delta}")
    if not l > 0:
        raise DomainError(f"l must be positive, got {l}")
    _require_invertible(a, tol)
    ap = mpow(a, p)
    am = mpow(a, m)
    inner = psd_power(adjoint(ap) @ ap, l, tol)
    return psd_power(adjoint(am) @ inner @ am, (delta + m) / (p * l + m), tol)


def furuta_g(apos, bpos, params: FurutaParams, lam: float, mu: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``B^(-mu/2) (B^(mu/2) A^lam B^(mu/2))^((delta+beta0*mu)/(alpha0*lam+beta0*mu)) B^(-mu/2)``.

    Defined for ``lam >= 1``, ``mu >= 1`` with ``alpha0*lam >= delta``; calls outside
    that region are rejected.  The ordering hypothesis on ``(A, B)`` is the
    caller's responsibility.
    """
    apos = as_matrix(apos)
    bpos = as_matrix(bpos)
    a0, b0, delta = params.alpha0, params.beta0, params.delta
    if lam < 1 or mu < 1:
        raise DomainError("lambda and mu must both be >= 1")
    if a0 * lam < delta:
        raise DomainError("alpha0*lambda must be >= delta")
    if delta < -b0:
        raise DomainError("delta must be >= -beta0")
    lam_b = herm_eig(bpos, tol).eigenvalues
    if lam_b[0] <= tol.threshold(float(np.max(np.abs(lam_b)))):
        raise Singular("B must be positive definite")
    bh = psd_power(bpos, mu / 2.0, tol)
    bmh = psd_power(bpos, -mu / 2.0, tol)
    core = bh @ psd_power(apos, lam, tol) @ bh
    expo = (delta + b0 * mu) / (a0 * lam + b0 * mu)
    out = bmh @ psd_power(core, expo, tol) @ bmh
    return 0.5 * (out + adjoint(out))


def furuta_g_grid(apos, bpos, params: FurutaParams, lams, mus, tol: Tolerance = DEFAULT_TOL) -> dict:
    """``{(lam, mu): furuta_g(A, B, params, lam, mu)}`` sharing the spectral data of ``A`` and ``B``."""
    apos = as_matrix(apos)
    bpos = as_matrix(bpos)
    a0, b0, delta = params.alpha0, params.beta0, params.delta
    if delta < -b0:
        raise DomainError("delta must be >= -beta0")
    for lam in lams:
        if lam < 1 or a0 * lam < delta:
            raise DomainError(f"lambda = {lam} is outside the domain")
    if any(mu < 1 for mu in mus):
        raise DomainError("mu must be >= 1")
    lam_b = herm_eig(bpos, tol).eigenvalues
    if lam_b[0] <= tol.threshold(float(np.max(np.abs(lam_b)))):
        raise Singular("B must be positive definite")
    a_pows = dict(zip(lams, fun_calc_many(apos, [lambda x, r=r: np.power(x, r) for r in lams], tol)))
    b_half = fun_calc_many(bpos, [lambda x, e=s * r / 2.0: np.power(x, e) for r in mus for s in (1, -1)], tol)
    out = {}
    for i, mu in enumerate(mus):
        bh, bmh = b_half[2 * i], b_half[2 * i + 1]
        for lam in lams:
            expo = (delta + b0 * mu) / (a0 * lam + b0 * mu)
            g = bmh @ psd_power(bh @ a_pows[lam] @ bh, expo, tol) @ bmh
            out[lam, mu] = 0.5 * (g + adjoint(g))
    return out
