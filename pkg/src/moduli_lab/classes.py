"""Operator-class predicates and the moduli-equation system checker.

All residuals are relative: the operator is first scaled to unit norm, so every
number below is homogeneous of degree 0 in ``A`` and comparable against a
plain relative tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .matcore import DEFAULT_TOL, Tolerance, adjoint, as_matrix, fun_calc, min_eig, mpow, opnorm, psd_power

EPS_GUARD = 1e-300


@dataclass(frozen=True)
class ExponentSet:
    """Finite nonempty set of positive integers, kept sorted."""

    elems: tuple

    def __init__(self, elems: Iterable[int]):
        vals = sorted({int(e) for e in elems})
        if not vals:
            raise ValueError("exponent set must be nonempty")
        if vals[0] < 1:
            raise ValueError(f"exponents must be positive integers, got {vals}")
        object.__setattr__(self, "elems", tuple(vals))

    @classmethod
    def parse(cls, text: str) -> "ExponentSet":
        """Parse a comma list such as ``"2,3,5"``."""
        try:
            return cls(int(tok) for tok in text.split(",") if tok.strip())
        except ValueError as exc:
            raise ValueError(f"bad exponent set {text!r}: {exc}") from None

    def __iter__(self):
        return iter(self.elems)

    def __len__(self):
        return len(self.elems)

    def __contains__(self, x):
        return x in self.elems

    def __str__(self):
        return "{" + ",".join(map(str, self.elems)) + "}"


class SystemResult(NamedTuple):
    holds: bool
    worst: tuple  # (s, residual)


def _unit(a: np.ndarray) -> np.ndarray | None:
    na = opnorm(a)
    if na <= EPS_GUARD:
        return None
    return a / na


def quasinormal_defect(a) -> float:
    """``||A(A*A) - (A*A)A|| / ||A||^3``."""
    b = _unit(as_matrix(a))
    if b is None:
        return 0.0
    m = adjoint(b) @ b
    return opnorm(b @ m - m @ b)


def moduli_residual(a, s: int) -> float:
    """``||A*^s A^s - (A*A)^s|| / ||A||^(2s)``."""
    if s < 1:
        raise ValueError("exponent must be a positive integer")
    b = _unit(as_matrix(a))
    if b is None:
        return 0.0
    bs = mpow(b, s)
    return opnorm(adjoint(bs) @ bs - mpow(adjoint(b) @ b, s))


def satisfies_system(a, exps, tol: Tolerance = DEFAULT_TOL) -> SystemResult:
    """Check ``A*^s A^s = (A*A)^s`` for every ``s`` in ``exps``; report the worst exponent."""
    exps = exps if isinstance(exps, ExponentSet) else ExponentSet(exps)
    a = as_matrix(a)
    worst = (exps.elems[0], -1.0)
    for s in exps:
        r = moduli_residual(a, s)
        if r > worst[1]:
            worst = (s, r)
    return SystemResult(worst[1] <= tol.threshold(1.0), worst)


def embry_profile(a, n_max: int) -> list[tuple[int, float]]:
    if not 1 <= n_max <= 64:
        raise ValueError("n_max must lie in 1..64")
    a = as_matrix(a)
    return [(s, moduli_residual(a, s)) for s in range(1, n_max + 1)]


def is_invertible(a, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    sv = np.linalg.svd(a, compute_uv=False)
    return bool(sv[-1] > tol.threshold(sv[0]))


def _neg_part(h: np.ndarray, tol: Tolerance) -> float:
    return max(0.0, -min_eig(h, tol))


def _log_psd(p: np.ndarray, tol: Tolerance) -> np.ndarray:
    return fun_calc(p, np.log, tol)


CLASS_NAMES = ("normal", "quasinormal", "hyponormal", "p_hyponormal", "log_hyponormal", "class_A", "class_A_k")


def class_a_k_residual(a, k: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Negative part of ``(A*|A|^(2k)A)^(1/(k+1)) - |A|^2``, relative to ``||A||^2``."""
    b = _unit(as_matrix(a))
    if b is None:
        return 0.0
    mod2 = adjoint(b) @ b
    inner = adjoint(b) @ psd_power(mod2, k, tol) @ b
    return _neg_part(psd_power(inner, 1.0 / (k + 1), tol) - mod2, tol)


def hyponormal_residual(a, tol: Tolerance = DEFAULT_TOL) -> float:
    """Negative part of ``A*A - AA*`` relative to ``||A||^2``."""
    return p_hyponormal_residual(a, 1.0, tol)


def p_hyponormal_residual(a, p: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """Negative part of ``(A*A)^p - (AA*)^p`` relative to ``||A||^(2p)``."""
    b = _unit(as_matrix(a))
    if b is None:
        return 0.0
    return _neg_part(psd_power(adjoint(b) @ b, p, tol) - psd_power(b @ adjoint(b), p, tol), tol)


def log_hyponormal_residual(a, tol: Tolerance = DEFAULT_TOL) -> float | None:
    """Negative part of ``log(A*A) - log(AA*)``; ``None`` for singular ``A``."""
    b = _unit(as_matrix(a))
    if b is None or not is_invertible(b, tol):
        return None
    return _neg_part(_log_psd(adjoint(b) @ b, tol) - _log_psd(b @ adjoint(b), tol), tol)


def normal_defect(a) -> float:
    """``||A*A - AA*|| / ||A||^2``."""
    b = _unit(as_matrix(a))
    if b is None:
        return 0.0
    return opnorm(adjoint(b) @ b - b @ adjoint(b))


def classify(a, p: float = 1.0, k: int = 1, tol: Tolerance = DEFAULT_TOL) -> dict:
    """Residual and verdict for each operator class.

    Returns ``{name: {"residual": r, "holds": bool, "applicable": bool}}``.
    ``log_hyponormal`` needs an invertible operator and is reported with
    ``applicable = False`` (residual ``None``) otherwise.
    """
    a = as_matrix(a)
    cut = tol.threshold(1.0)
    out = {}

    def put(name, r):
        if r is None:
            out[name] = {"residual": None, "holds": False, "applicable": False}
        else:
            out[name] = {"residual": float(r), "holds": bool(r <= cut), "applicable": True}

    put("normal", normal_defect(a))
    put("quasinormal", quasinormal_defect(a))
    put("hyponormal", hyponormal_residual(a, tol))
    put("p_hyponormal", p_hyponormal_residual(a, p, tol))
    put("log_hyponormal", log_hyponormal_residual(a, tol))
    put("class_A", class_a_k_residual(a, 1, tol))
    put("class_A_k", class_a_k_residual(a, k, tol))
    return out
