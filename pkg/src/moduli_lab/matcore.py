"""Dense complex matrix core: Hermitian eigensolver, functional calculus, Löwner order.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single validation gate (square, finite).  Everything else in the
package builds on the primitives here.
"""

from __future__ import annotations

import functools

import json
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, MatrixFormatError, NoConvergence, NotHermitian, NotPSD

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "HermEig",
    "LoewnerResult",
    "RootCheck",
    "as_matrix",
    "adjoint",
    "opnorm",
    "frob",
    "mpow",
    "herm_eig",
    "fun_calc",
    "fun_calc_many",
    "psd_power",
    "min_eig",
    "loewner_leq",
    "loewner_margin",
    "commutant_root_check",
    "integral_rep_xp",
    "monotonicity_sample_check",
    "matrix_from_json",
    "matrix_to_json",
    "load_matrix",
]

JACOBI_REL_TOL = 1e-15
JACOBI_ABS_FLOOR = 1e-30
JACOBI_MAX_SWEEPS = 64
# Eigenvalues of magnitude below ZERO_SNAP * ||P|| are rounding noise of the
# eigensolver; they are mapped to exactly 0 before a function is applied.
ZERO_SNAP = 1e-13


@dataclass(frozen=True)
class Tolerance:
    """Comparison tolerance; the threshold at scale ``s`` is ``abs + rel * s``."""

    abs: float = 1e-12
    rel: float = 1e-9

    def __post_init__(self):
        if not (self.abs >= 0 and self.rel >= 0):
            raise ValueError(f"tolerances must be nonnegative, got {self}")

    def threshold(self, scale: float = 1.0) -> float:
        return self.abs + self.rel * scale

    def to_dict(self) -> dict:
        return {"abs": self.abs, "rel": self.rel}

    def scaled(self, factor: float) -> "Tolerance":
        return Tolerance(self.abs * factor, self.rel * factor)


DEFAULT_TOL = Tolerance()


class HermEig(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0


class LoewnerResult(NamedTuple):
    holds: bool
    witness: float


class RootCheck(NamedTuple):
    commutes_with_P: bool
    commutes_with_root: bool
    residuals: tuple


# ---------------------------------------------------------------------------
# plumbing


def as_matrix(x) -> np.ndarray:
    """Validate ``x`` as a square finite matrix and return a complex copy."""
    a = np.array(x, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise MatrixFormatError(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MatrixFormatError("matrix has non-finite entries")
    return a


def adjoint(x: np.ndarray) -> np.ndarray:
    return x.conj().T


def opnorm(x: np.ndarray) -> float:
    """Operator norm (largest singular value)."""
    if x.size == 0:
        return 0.0
    return float(np.linalg.svd(x, compute_uv=False)[0])


def frob(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def mpow(x: np.ndarray, k: int) -> np.ndarray:
    """Integer power by repeated multiplication; ``k = 0`` gives the identity."""
    if k < 0:
        raise ValueError("negative integer powers are not supported")
    out = np.eye(x.shape[0], dtype=complex)
    for _ in range(k):
        out = out @ x
    return out


def _hermitian_check(h: np.ndarray, tol: Tolerance) -> float:
    scale = opnorm(h)
    skew = opnorm(h - adjoint(h))
    if skew > tol.threshold(scale):
        raise NotHermitian(f"||H - H*|| = {skew:.3e} exceeds tolerance at scale {scale:.3e}")
    return scale


# ---------------------------------------------------------------------------
# Hermitian eigensolver


@functools.lru_cache(maxsize=128)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Pairings of a round-robin tournament: n-1 rounds of disjoint (p, q) pairs."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(r for r in rounds if len(r[0]))


def herm_eig(h, tol: Tolerance = DEFAULT_TOL) -> HermEig:
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so that
    the rotations of one round act on disjoint index pairs and can be applied
    together.  Iteration stops when every off-diagonal entry satisfies
    ``|a_pq| <= 1e-15 * sqrt(|a_pp a_qq|)`` (or falls below ``1e-30 * ||H||_F``).
    The relative test keeps small eigenvalues and their eigenvectors accurate,
    which fractional powers of nearly singular matrices depend on.

    Returns eigenvalues in ascending order with orthonormal eigenvector columns.
    """
    h = as_matrix(h)
    _hermitian_check(h, tol)
    n = h.shape[0]
    a = 0.5 * (h + adjoint(h))
    v = np.eye(n, dtype=complex)
    # work at unit entry size so squares neither underflow nor overflow
    amax = float(np.max(np.abs(a))) if a.size else 0.0
    if n == 1 or amax == 0.0:
        return HermEig(np.real(np.diag(a)).copy(), v, 0)
    a = a / amax
    scale = frob(a)

    floor = JACOBI_ABS_FLOOR * scale
    rounds = _round_robin(n)
    eye = np.eye(n, dtype=complex)
    offdiag = ~np.eye(n, dtype=bool)
    sweeps = 0
    # entries of pairs that are masked out as inactive may overflow harmlessly
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        while True:
            d = np.sqrt(np.abs(a.diagonal().real))
            bound = np.maximum(JACOBI_REL_TOL * (d[:, None] * d[None, :]), floor)
            if np.all(np.abs(a[offdiag]) <= bound[offdiag]):
                break
            if sweeps >= JACOBI_MAX_SWEEPS:
                off = frob(a - np.diag(np.diag(a)))
                raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off={off:.3e})")
            for ps, qs in rounds:
                b = a[ps, qs]
                mag = np.abs(b)
                # pairs already within the stopping test are left alone (and zeroed below)
                dg = a.diagonal().real
                active = mag > np.maximum(JACOBI_REL_TOL * np.sqrt(np.abs(dg[ps] * dg[qs])), floor)
                if not active.any():
                    continue
                tau = (dg[qs] - dg[ps]) / (2.0 * mag)
                t = np.copysign(1.0, tau) / (np.abs(tau) + np.hypot(1.0, tau))
                phase = b / mag
                t[~active] = 0.0
                phase[~active] = 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                j = eye.copy()
                j[ps, ps] = c
                j[ps, qs] = s
                j[qs, ps] = -s * phase.conj()
                j[qs, qs] = c * phase.conj()
                a = j.conj().T @ a @ j
                a[ps, qs] = 0.0
                a[qs, ps] = 0.0
                v = v @ j
            a = 0.5 * (a + a.conj().T)
            sweeps += 1

    w = np.real(np.diag(a)) * amax
    order = np.argsort(w, kind="stable")
    return HermEig(w[order], v[:, order], sweeps)


def min_eig(h, tol: Tolerance = DEFAULT_TOL) -> float:
    return float(herm_eig(h, tol).eigenvalues[0])


# ---------------------------------------------------------------------------
# functional calculus


def fun_calc(p, f: Callable[[np.ndarray], np.ndarray], tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Apply a real function to a positive semidefinite matrix through its spectrum.

    Eigenvalues in ``[-tol_eff, 0)`` are clamped to 0 and eigenvalues below
    ``-tol_eff`` raise :class:`NotPSD`, where ``tol_eff = abs + rel*||P||``.
    ``f`` receives a float array and must return finite values on it.
    """
    p = as_matrix(p)
    return _apply(herm_eig(p, tol), f, tol)


def _apply(eig: HermEig, f, tol: Tolerance) -> np.ndarray:
    lam = eig.eigenvalues
    scale = float(np.max(np.abs(lam)))
    if lam[0] < -tol.threshold(scale):
        raise NotPSD(f"minimum eigenvalue {lam[0]:.3e} below -{tol.threshold(scale):.3e}")
    lam = np.where(np.abs(lam) <= ZERO_SNAP * scale, 0.0, np.maximum(lam, 0.0))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vals = np.asarray(f(lam), dtype=float)
    if vals.shape != lam.shape or not np.all(np.isfinite(vals)):
        raise DomainError("function is undefined at some (clamped) eigenvalue")
    vecs = eig.eigenvectors
    out = (vecs * vals) @ adjoint(vecs)
    return 0.5 * (out + adjoint(out))


def fun_calc_many(p, fs, tol: Tolerance = DEFAULT_TOL) -> list[np.ndarray]:
    """``[fun_calc(P, f) for f in fs]`` sharing one eigendecomposition."""
    eig = herm_eig(as_matrix(p), tol)
    return [_apply(eig, f, tol) for f in fs]


def psd_power(p, r: float, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """``P**r`` for real ``r``; ``0**0`` is taken as 1 and negative ``r`` needs ``P > 0``."""
    if r == 0:
        return np.eye(np.shape(p)[0], dtype=complex)
    if r == 1:
        return as_matrix(p)
    return fun_calc(p, lambda x: np.power(x, r), tol)


# ---------------------------------------------------------------------------
# Löwner order


def loewner_leq(x, y, tol: Tolerance = DEFAULT_TOL) -> LoewnerResult:
    """Decide ``X <= Y`` in the Löwner order.

    The witness is the minimum eigenvalue of ``Y - X``; the order holds when it
    is at least ``-(abs + rel*max(||X||, ||Y||))``.
    """
    x = as_matrix(x)
    y = as_matrix(y)
    sx = _hermitian_check(x, tol)
    sy = _hermitian_check(y, tol)
    witness = min_eig(y - x, tol)
    return LoewnerResult(witness >= -tol.threshold(max(sx, sy)), witness)


def loewner_margin(x, y, tol: Tolerance = DEFAULT_TOL) -> float:
    """Minimum eigenvalue of ``Y - X`` divided by ``max(||X||, ||Y||)`` (scale-free margin)."""
    res = loewner_leq(x, y, tol)
    scale = max(opnorm(as_matrix(x)), opnorm(as_matrix(y)))
    return res.witness / scale if scale > 0 else res.witness


def commutant_root_check(p, t, k: int, tol: Tolerance = DEFAULT_TOL) -> RootCheck:
    """Compare commutation of ``T`` with a positive ``P`` and with its ``k``-th root."""
    p = as_matrix(p)
    t = as_matrix(t)
    if k < 1:
        raise ValueError("k must be a positive integer")
    root = psd_power(p, 1.0 / k, tol)
    r_p = opnorm(t @ p - p @ t)
    r_root = opnorm(t @ root - root @ t)
    nt = opnorm(t)
    return RootCheck(
        r_p <= tol.threshold(nt * opnorm(p)),
        r_root <= tol.threshold(nt * opnorm(root)),
        (r_p, r_root),
    )


# ---------------------------------------------------------------------------
# integral representation of x**p


@functools.lru_cache(maxsize=8)
def _gauss_legendre01(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on (0, 1)."""
    u, w = np.polynomial.legendre.leggauss(n)
    u, w = 0.5 * (u + 1.0), 0.5 * w
    u.flags.writeable = False
    w.flags.writeable = False
    return u, w


def integral_rep_xp(x: float, p: float, quad_points: int = 2000) -> float:
    """Quadrature value of ``(sin(p*pi)/pi) * int_0^inf x*lam**(p-1)/(x+lam) dlam``.

    The half line is mapped to (0, 1) by ``lam = x*t/(1-t)``; the endpoint
    singularities in ``t`` are then removed by the grading
    ``t = u**q / (u**q + (1-u)**q)`` before Gauss-Legendre on ``u``.
    """
    if not (0.0 < p < 1.0):
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not x > 0.0:
        raise DomainError(f"x must be positive, got {x}")
    if quad_points < 1:
        raise ValueError("quad_points must be positive")
    q = max(2, math.ceil(3.0 / min(p, 1.0 - p)))
    u, w = _gauss_legendre01(quad_points)
    lu, l1u = np.log(u), np.log1p(-u)
    log_x = math.log(x)
    # lam = x * (u/(1-u))**q ; dlam/du = q * lam / (u*(1-u))
    log_lam = log_x + q * (lu - l1u)
    log_jac = math.log(q) + log_lam - lu - l1u
    log_integrand = log_x + (p - 1.0) * log_lam - np.logaddexp(log_x, log_lam)
    total = float(np.sum(w * np.exp(log_integrand + log_jac)))
    return math.sin(p * math.pi) / math.pi * total


def monotonicity_sample_check(f, degree: int, trials: int = 200, seed: int = 0, tol: Tolerance = DEFAULT_TOL):
    """Randomized test of ``B <= A  =>  f(B) <= f(A)`` on ``degree x degree`` matrices.

    ``B`` is a random PSD Gram matrix and ``A = B + C*C`` with ``C`` of random
    rank, so the spectra stay inside ``[0, inf)``.
    """
    from .report import VerifyReport, trial_seed

    report = VerifyReport("monotonicity", {"degree": degree, "trials": trials}, seed, tol)
    worst = 0.0
    for i in range(trials):
        ts = trial_seed(seed, "monotonicity", i)
        rng = np.random.default_rng(ts)
        g = _ginibre(rng, degree)
        rank = int(rng.integers(1, degree + 1))
        c = _ginibre(rng, degree)[:rank]
        b = adjoint(g) @ g
        a = b + adjoint(c) @ c
        res = loewner_leq(fun_calc(b, f, tol), fun_calc(a, f, tol), tol)
        worst = min(worst, res.witness)
        if not res.holds:
            report.add_violation(ts, {"witness": res.witness}, f"f(B) <= f(A) fails (trial {i})")
        report.trials_run += 1
    report.max_residuals["min_witness"] = worst
    return report


def _ginibre(rng: np.random.Generator, n: int) -> np.ndarray:
    return (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / math.sqrt(2.0)


# ---------------------------------------------------------------------------
# JSON


def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"n": int, "re": [[...]], "im": [[...]]}`` (``im`` optional)."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    if not isinstance(obj, dict) or "n" not in obj or "re" not in obj:
        raise MatrixFormatError('matrix JSON needs keys "n" and "re"')
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixFormatError(f'"n" must be a positive integer, got {n!r}')

    def grid(name):
        rows = obj[name]
        if not isinstance(rows, list) or len(rows) != n:
            raise MatrixFormatError(f'"{name}" must have {n} rows')
        for row in rows:
            if not isinstance(row, list) or len(row) != n:
                raise MatrixFormatError(f'"{name}" is ragged or has the wrong width')
            for v in row:
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise MatrixFormatError(f'non-numeric entry {v!r} in "{name}"')
        arr = np.array(rows, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise MatrixFormatError(f'non-finite entry in "{name}"')
        return arr

    re = grid("re")
    im = grid("im") if obj.get("im") is not None else np.zeros((n, n))
    return re + 1j * im


def matrix_to_json(a) -> dict:
    a = as_matrix(a)
    return {"n": a.shape[0], "re": a.real.tolist(), "im": a.imag.tolist()}


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_json(json.load(fh))
