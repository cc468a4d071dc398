"""Random instance generators.

Every generator takes a ``numpy.random.Generator`` so a trial is replayable
from its seed alone; :func:`gen` is the seed-level entry point.
"""

from __future__ import annotations

import numpy as np

from ..classes import classify, is_invertible
from ..errors import GenerationFailed
from ..matcore import DEFAULT_TOL, Tolerance, adjoint
from ..shifts import periodic_shift

MAX_ATTEMPTS = 10_000

KINDS = ("ginibre", "unitary", "psd", "normal", "quasinormal", "hyponormal_shift", "class_A_invertible")


def ginibre(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    """iid standard complex normal entries (unit variance)."""
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """QR of a Ginibre matrix with the phases of ``diag(R)`` absorbed (Mezzadri)."""
    q, r = np.linalg.qr(ginibre(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    g = ginibre(rng, n if rank is None else rank, n)
    return adjoint(g) @ g


def random_pd(rng: np.random.Generator, n: int, floor: float = 0.2) -> np.ndarray:
    """Positive definite with smallest eigenvalue at least ``floor``."""
    u = haar_unitary(rng, n)
    lam = floor + rng.exponential(1.0, n)
    return (u * lam) @ adjoint(u)


def normal_from_spectrum(rng: np.random.Generator, spectrum) -> np.ndarray:
    u = haar_unitary(rng, len(spectrum))
    return (u * np.asarray(spectrum)) @ adjoint(u)


def random_normal(rng: np.random.Generator, n: int, invertible: bool = False, spread: float = 10.0) -> np.ndarray:
    """``U diag(z) U*`` with complex Gaussian ``z``.

    With ``invertible`` the moduli are kept in ``[3/spread, 3]``.
    """
    if invertible:
        z = rng.uniform(3.0 / spread, 3.0, n) * np.exp(2j * np.pi * rng.random(n))
    else:
        z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    return normal_from_spectrum(rng, z)


def random_projection(rng: np.random.Generator, n: int, rank: int) -> np.ndarray:
    u = haar_unitary(rng, n)[:, :rank]
    return u @ adjoint(u)


def nondecreasing_weights(rng: np.random.Generator, n: int, plateau: float = 0.0, spread: float = 2.0) -> np.ndarray:
    """Positive nondecreasing weights with ``max/min <= spread``.

    Each step is zero with probability ``plateau``.  Bounding the spread keeps
    every weight comparable to the operator norm, so norm-relative residuals
    do not vanish merely because a weight is small.
    """
    steps = rng.exponential(1.0, n - 1) * (rng.random(n - 1) >= plateau)
    total = steps.sum()
    logs = np.concatenate([[0.0], np.cumsum(steps)])
    if total > 0:
        logs *= rng.uniform(0.0, np.log(spread)) / total
    return np.exp(logs + rng.normal(0.0, 0.5))


def truncated_shift(weights) -> np.ndarray:
    """Unilateral weighted shift ``e_j -> w_j e_{j+1}`` on ``len(weights)+1`` dimensions."""
    w = np.asarray(weights, dtype=float)
    m = np.zeros((len(w) + 1, len(w) + 1), dtype=complex)
    m[np.arange(1, len(w) + 1), np.arange(len(w))] = w
    return m


def hyponormal_periodic(rng: np.random.Generator, n: int, plateau: float = 0.0) -> np.ndarray:
    """Cyclic weighted shift with nondecreasing weights.

    Away from the seam it is a bilateral shift with nondecreasing weights, so it
    is hyponormal (indeed p- and log-hyponormal, class A(k)) on seam-free indices.
    """
    return periodic_shift(nondecreasing_weights(rng, n, plateau))


def class_a_candidate(rng: np.random.Generator, n: int) -> np.ndarray:
    c = rng.uniform(0.5, 2.0) * np.exp(2j * np.pi * rng.random())
    eps = 10.0 ** rng.uniform(-8.0, -1.0)
    return c * np.eye(n) + eps * ginibre(rng, n)


def class_a_invertible(rng: np.random.Generator, n: int, k: int = 1, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Accept-reject over ``c I + eps G`` (log-uniform ``eps``) until class A(k) and invertible."""
    for _ in range(MAX_ATTEMPTS):
        a = class_a_candidate(rng, n)
        if is_invertible(a, tol) and classify(a, k=k, tol=tol)["class_A_k"]["holds"]:
            return a
    raise GenerationFailed(f"no invertible class A({k}) instance after {MAX_ATTEMPTS} attempts")


def gen(kind: str, dim: int, seed: int, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Draw one instance of ``kind`` in dimension ``dim`` from ``seed``.

    ``quasinormal`` returns a normal matrix: in finite dimensions the two
    classes coincide.  ``hyponormal_shift`` is the truncated unilateral shift
    with nondecreasing weights; as a matrix it is hyponormal only on the
    indices away from the truncation boundary.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)
    if kind == "ginibre":
        return ginibre(rng, dim)
    if kind == "unitary":
        return haar_unitary(rng, dim)
    if kind == "psd":
        return random_psd(rng, dim)
    if kind in ("normal", "quasinormal"):
        return random_normal(rng, dim)
    if kind == "hyponormal_shift":
        if dim == 1:
            return np.zeros((1, 1), dtype=complex)
        return truncated_shift(nondecreasing_weights(rng, dim - 1))
    if kind == "class_A_invertible":
        return class_a_invertible(rng, dim, 1, tol)
    raise ValueError(f"unknown generator kind {kind!r}; expected one of {KINDS}")


# ---------------------------------------------------------------------------
# search pool for the forcing suites

POOL = (
    "ginibre",
    "near_normal",
    "nilpotent",
    "normal_plus_nilpotent",
    "truncated_shift",
    "partial_isometry",
    "unitary_times_psd",
    "normal",
    "scaled_unitary",
)


def pool_draw(rng: np.random.Generator, n: int, invertible: bool = False) -> tuple[str, np.ndarray]:
    """One draw from a mixture of structured and unstructured matrices.

    Near-normal draws ``N + eps G`` take ``eps`` log-uniform in ``[1e-14, 1e-6]`` so
    some land on each side of the hypothesis tolerance.  Nilpotent parts are
    kept at scale ``>= 0.1``.
    """
    kinds = POOL if not invertible else ("ginibre", "near_normal", "unitary_times_psd", "normal", "scaled_unitary")
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "ginibre":
        a = ginibre(rng, n)
    elif kind == "near_normal":
        a = random_normal(rng, n, invertible) + 10.0 ** rng.uniform(-14, -6) * ginibre(rng, n)
    elif kind == "nilpotent":
        a = np.triu(ginibre(rng, n), 1)
        u = haar_unitary(rng, n)
        a = u @ a @ adjoint(u)
    elif kind == "normal_plus_nilpotent":
        r = int(rng.integers(1, n)) if n > 1 else 1
        a = np.zeros((n, n), dtype=complex)
        a[:r, :r] = random_normal(rng, r)
        a[r:, r:] = rng.uniform(0.1, 1.0) * np.triu(ginibre(rng, n - r), 1)
        u = haar_unitary(rng, n)
        a = u @ a @ adjoint(u)
    elif kind == "truncated_shift":
        a = truncated_shift(rng.uniform(0.2, 2.0, n - 1)) if n > 1 else ginibre(rng, 1)
    elif kind == "partial_isometry":
        r = int(rng.integers(1, n + 1))
        a = haar_unitary(rng, n)[:, :r] @ adjoint(haar_unitary(rng, n)[:, :r])
    elif kind == "unitary_times_psd":
        a = haar_unitary(rng, n) @ (random_pd(rng, n) if invertible else random_psd(rng, n))
    elif kind == "normal":
        a = random_normal(rng, n, invertible)
    else:
        a = rng.uniform(0.3, 3.0) * haar_unitary(rng, n)
    return kind, a
