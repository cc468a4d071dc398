"""Univariate polynomial gcd and roots.

Coefficient lists are highest degree first, the ``numpy.roots`` convention.
Integer or ``Fraction`` inputs go through exact rational arithmetic; float
inputs use the same Euclidean recursion with a coefficient tolerance.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import numpy as np


def _strip(p, tol=0.0):
    i = 0
    while i < len(p) and abs(p[i]) <= tol:
        i += 1
    return list(p[i:])


def _is_exact(p) -> bool:
    return all(isinstance(c, Rational) for c in p)


def poly_rem(a, b, tol=0.0):
    """Remainder of ``a`` divided by ``b``."""
    a = _strip(a, tol)
    b = _strip(b, tol)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    while a and len(a) >= len(b):
        f = a[0] / b[0]
        a = [c - f * b[i] if i < len(b) else c for i, c in enumerate(a)]
        # the leading coefficient cancels by construction
        a = _strip(a[1:], tol)
    return a


def poly_gcd(a, b, tol: float = 1e-12):
    """Monic gcd by the Euclidean algorithm.

    Exact when every coefficient is rational; otherwise remainders whose
    coefficients fall below ``tol`` (relative to the largest coefficient of the
    divisor) are treated as zero.
    """
    exact = _is_exact(a) and _is_exact(b)
    if exact:
        a = [Fraction(c) for c in a]
        b = [Fraction(c) for c in b]
        eps = 0
    else:
        a = [float(c) for c in a]
        b = [float(c) for c in b]
    a, b = _strip(a), _strip(b)
    if not a and not b:
        raise ValueError("gcd of two zero polynomials is undefined")
    while b:
        if not exact:
            eps = tol * max(abs(c) for c in b)
        r = poly_rem(a, b, eps)
        a, b = b, r
    lead = a[0]
    return [c / lead for c in a]


def poly_eval(p, z):
    acc = 0
    for c in p:
        acc = acc * z + c
    return acc


def poly_roots(p) -> list[complex]:
    """Roots sorted by (real, imag); degree-0 polynomials have none."""
    coeffs = np.array([complex(c) for c in _strip(p)])
    if len(coeffs) <= 1:
        return []
    roots = np.roots(coeffs)
    return sorted((complex(r) for r in roots), key=lambda z: (round(z.real, 12), round(z.imag, 12)))
