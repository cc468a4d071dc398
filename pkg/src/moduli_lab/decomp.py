"""Polar and kernel/range block decompositions, Douglas factors and unitary dilations."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .classes import moduli_residual
from .errors import NotContraction, NotPSD, OrderViolated
from .matcore import (
    DEFAULT_TOL,
    Tolerance,
    adjoint,
    as_matrix,
    commutant_root_check,
    fun_calc,
    herm_eig,
    loewner_leq,
    mpow,
    opnorm,
)


class PolarParts(NamedTuple):
    U: np.ndarray
    P: np.ndarray


class BlockKR(NamedTuple):
    Aprime: np.ndarray
    R: np.ndarray
    P: np.ndarray
    r: int
    basis: np.ndarray  # columns: range part of A* first, then kernel of A


class DilationPair(NamedTuple):
    U: np.ndarray
    V: np.ndarray


class AprimeCheck(NamedTuple):
    eq_residual: float
    min_singular_of_Aprime: float | None


class PhiPsi(NamedTuple):
    phi: np.ndarray
    psi: np.ndarray


class BerberianCheck(NamedTuple):
    hyp_residual: float
    concl_residual: float
    embedded_residual: float
    hyp_scale: float
    concl_scale: float


def _range_split(a: np.ndarray, tol: Tolerance):
    """Eigen-split of ``A*A``: (eigenvalues, eigenvectors, mask of range directions)."""
    eig = herm_eig(adjoint(a) @ a, tol)
    cut = tol.threshold(opnorm(a) ** 2)
    return eig.eigenvalues, eig.eigenvectors, eig.eigenvalues > cut


def polar(a, tol: Tolerance = DEFAULT_TOL) -> PolarParts:
    """Polar decomposition ``A = U|A|`` with ``U`` a partial isometry vanishing on ker A."""
    a = as_matrix(a)
    lam, vecs, rng = _range_split(a, tol)
    sig = np.sqrt(np.maximum(lam, 0.0))
    p = (vecs * sig) @ adjoint(vecs)
    p = 0.5 * (p + adjoint(p))
    vr = vecs[:, rng]
    u = (a @ vr / sig[rng]) @ adjoint(vr)
    return PolarParts(u, p)


def kernel_range_blocks(a, tol: Tolerance = DEFAULT_TOL) -> BlockKR:
    """Blocks of ``A = [[A', 0], [R, 0]]`` on ``closure(R(A*)) (+) N(A)``.

    The split comes from the eigenvectors of ``A*A``: eigenvalues at or below
    ``abs + rel*||A||**2`` span the kernel.
    """
    a = as_matrix(a)
    _, vecs, rng = _range_split(a, tol)
    vr, vk = vecs[:, rng], vecs[:, ~rng]
    aprime = adjoint(vr) @ a @ vr
    r_block = adjoint(vk) @ a @ vr
    proj = vr @ adjoint(vr)
    return BlockKR(aprime, r_block, proj, int(rng.sum()), np.hstack([vr, vk]))


def reassemble(blocks: BlockKR) -> np.ndarray:
    """Map the block form back to the standard basis."""
    n = blocks.basis.shape[0]
    r = blocks.r
    m = np.zeros((n, n), dtype=complex)
    m[:r, :r] = blocks.Aprime
    m[r:, :r] = blocks.R
    w = blocks.basis
    return w @ m @ adjoint(w)


def check_aprime_injective(a, n: int, tol: Tolerance = DEFAULT_TOL) -> AprimeCheck:
    """Relative residual of ``A*^n A^n = (A*A)^n`` and the smallest singular value of ``A'``.

    ``min_singular_of_Aprime`` is ``None`` when the range part is empty (``A = 0``).
    """
    a = as_matrix(a)
    blocks = kernel_range_blocks(a, tol)
    res = moduli_residual(a, n)
    if blocks.r == 0:
        return AprimeCheck(res, None)
    smin = float(np.linalg.svd(blocks.Aprime, compute_uv=False)[-1])
    return AprimeCheck(res, smin)


def onsr_norms(a, k: int, tol: Tolerance = DEFAULT_TOL) -> tuple[float, float]:
    """``(||V*(A'*A'+R*R)^k V||, ||(A'*A'+R*R)^k||)`` with ``A' = V|A'|``."""
    blocks = kernel_range_blocks(a, tol)
    if blocks.r == 0:
        return 0.0, 0.0
    mod = adjoint(blocks.Aprime) @ blocks.Aprime + adjoint(blocks.R) @ blocks.R
    mk = mpow(mod, k)
    v = polar(blocks.Aprime, tol).U
    return opnorm(adjoint(v) @ mk @ v), opnorm(mk)


def _pinv_sqrt(b: np.ndarray, tol: Tolerance) -> tuple[np.ndarray, np.ndarray]:
    eig = herm_eig(b, tol)
    lam = eig.eigenvalues
    scale = float(np.max(np.abs(lam)))
    if lam[0] < -tol.threshold(scale):
        raise NotPSD(f"B has eigenvalue {lam[0]:.3e}")
    root = np.sqrt(np.maximum(lam, 0.0))
    keep = root > tol.threshold(np.sqrt(scale))
    inv = np.where(keep, 1.0 / np.where(keep, root, 1.0), 0.0)
    vecs = eig.eigenvectors
    return (vecs * root) @ adjoint(vecs), (vecs * inv) @ adjoint(vecs)


def douglas_factor(a, b, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Contraction ``Q`` with ``A = Q B^(1/2)``, defined as zero on ``ker B``.

    Requires ``A*A <= B``; otherwise :class:`OrderViolated`.
    """
    a = as_matrix(a)
    b = as_matrix(b)
    order = loewner_leq(adjoint(a) @ a, b, tol)
    if not order.holds:
        raise OrderViolated(f"A*A <= B fails (witness {order.witness:.3e})")
    _, pinv = _pinv_sqrt(b, tol)
    return a @ pinv


def halmos_unitaries(q, tol: Tolerance = DEFAULT_TOL) -> DilationPair:
    """The pair ``U = [[Q, R], [S, -Q*]]``, ``V = [[Q, -R], [S, Q*]]`` built from a contraction.

    ``R = (I - QQ*)^(1/2)`` and ``S = (I - Q*Q)^(1/2)``.
    """
    q = as_matrix(q)
    nq = opnorm(q)
    if nq > 1.0 + tol.threshold(1.0):
        raise NotContraction(f"||Q|| = {nq:.6g} > 1")
    n = q.shape[0]
    eye = np.eye(n, dtype=complex)
    sqrt = lambda x: np.sqrt(x)  # noqa: E731
    r = fun_calc(eye - q @ adjoint(q), sqrt, tol)
    s = fun_calc(eye - adjoint(q) @ q, sqrt, tol)
    u = np.block([[q, r], [s, -adjoint(q)]])
    v = np.block([[q, -r], [s, adjoint(q)]])
    return DilationPair(u, v)


def phi_psi_maps(pair: DilationPair, x) -> PhiPsi:
    """``Phi(X) = (U*XU + V*XV)/2`` and its upper-left compression ``Psi(X)``."""
    x = as_matrix(x)
    u, v = pair
    phi = 0.5 * (adjoint(u) @ x @ u + adjoint(v) @ x @ v)
    n = u.shape[0] // 2
    return PhiPsi(phi, phi[:n, :n].copy())


def berberian_check(m, n_op, t, k: int, tol: Tolerance = DEFAULT_TOL) -> BerberianCheck:
    """Residuals of ``T M^k = N^k T`` (hypothesis) and ``T M = N T`` (conclusion).

    ``embedded_residual`` recomputes the conclusion the way the 2x2 trick does:
    ``X = [[0, 0], [T, 0]]`` commutes with ``D^k``, ``D = diag(M, N)``, so it must
    commute with the ``k``-th root of ``D^k``; its value is that commutator norm.
    """
    m = as_matrix(m)
    n_op = as_matrix(n_op)
    t = as_matrix(t)
    for name, op in (("M", m), ("N", n_op)):
        lam = herm_eig(op, tol).eigenvalues
        if lam[0] < -tol.threshold(float(np.max(np.abs(lam)))):
            raise NotPSD(f"{name} is not positive semidefinite")
    mk, nk = mpow(m, k), mpow(n_op, k)
    hyp = opnorm(t @ mk - nk @ t)
    concl = opnorm(t @ m - n_op @ t)
    dim = m.shape[0]
    z = np.zeros((dim, dim), dtype=complex)
    x = np.block([[z, z], [t, z]])
    dk = np.block([[mk, z], [z, nk]])
    embedded = commutant_root_check(dk, x, k, tol).residuals[1]
    nt = opnorm(t)
    base = max(opnorm(m), opnorm(n_op))
    return BerberianCheck(hyp, concl, embedded, nt * base**k, nt * base)
