"""Weighted shifts on directed trees and bilateral weighted shifts.

A weighted shift sends ``e_v`` to ``sum(w(u) e_u for u in children(v))``.  Both
``A*A`` and ``A*^s A^s`` are diagonal in the vertex basis, so the moduli
equation at exponent ``s`` reduces to one scalar identity per vertex:

    sum over depth-s descendants u of v of prod(w^2 along v -> u)
        == (sum over children u of v of w(u)^2) ** s
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import BadParams, UnknownVertex, WindowTooShort
from .polynomials import poly_gcd, poly_roots
from .report import trial_seed

EPS_GUARD = 1e-300
LOG_WEIGHT_BOUND = 15.0
LM_MAX_ITER = 300


# ---------------------------------------------------------------------------
# trees


@dataclass(frozen=True)
class DirectedTree:
    vertices: tuple
    parent: dict
    children: dict = field(init=False, repr=False, compare=False)
    depth: dict = field(init=False, repr=False, compare=False)

    def __init__(self, vertices, parent):
        vertices = tuple(str(v) for v in vertices)
        if len(set(vertices)) != len(vertices):
            raise ValueError("duplicate vertex ids")
        vset = set(vertices)
        parent = {str(c): str(p) for c, p in parent.items()}
        for c, p in parent.items():
            if c not in vset or p not in vset:
                raise UnknownVertex(f"edge {p!r} -> {c!r} references an unknown vertex")
        children = {v: [] for v in vertices}
        for v in vertices:  # keep children in vertex-list order
            if v in parent:
                children[parent[v]].append(v)
        depth = {}
        for v in vertices:
            path, u = [], v
            while u not in depth:
                if u in path:
                    raise ValueError(f"cycle through vertex {u!r}")
                path.append(u)
                if u not in parent:
                    depth[u] = 0
                    path.pop()
                    break
                u = parent[u]
            for x in reversed(path):
                depth[x] = depth[parent[x]] + 1
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "parent", parent)
        object.__setattr__(self, "children", {v: tuple(cs) for v, cs in children.items()})
        object.__setattr__(self, "depth", depth)

    @property
    def roots(self) -> list:
        return [v for v in self.vertices if v not in self.parent]

    def check(self, v):
        if v not in self.children:
            raise UnknownVertex(v)

    def descendants_at(self, v, s: int) -> list:
        self.check(v)
        level = [v]
        for _ in range(s):
            level = [u for x in level for u in self.children[x]]
        return level

    def height(self, v) -> int:
        """Length of the longest downward path from ``v``."""
        self.check(v)
        h, level = 0, [v]
        while True:
            level = [u for x in level for u in self.children[x]]
            if not level:
                return h
            h += 1

    def branching_vertices(self) -> list:
        return [v for v in self.vertices if len(self.children[v]) >= 2]


def validate_weights(tree: DirectedTree, weights: dict) -> dict:
    w = {str(k): float(v) for k, v in weights.items()}
    for v in tree.vertices:
        if v in tree.parent:
            if v not in w:
                raise ValueError(f"missing weight for vertex {v!r}")
            if not (w[v] > 0 and math.isfinite(w[v])):
                raise ValueError(f"weight of {v!r} must be positive and finite")
    return w


def tree_from_json(obj) -> tuple[DirectedTree, dict]:
    """Parse ``{"vertices": [...], "edges": [{"parent", "child", "weight"}]}``."""
    if isinstance(obj, (str, bytes)):
        obj = json.loads(obj)
    try:
        vertices = obj["vertices"]
        edges = obj.get("edges", [])
        parent, weights = {}, {}
        for e in edges:
            c = str(e["child"])
            if c in parent:
                raise ValueError(f"vertex {c!r} has two parents")
            parent[c] = str(e["parent"])
            if "weight" in e:
                weights[c] = e["weight"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tree JSON: {exc}") from None
    tree = DirectedTree(vertices, parent)
    return tree, (validate_weights(tree, weights) if weights else {})


def tree_to_json(tree: DirectedTree, weights: dict | None = None) -> dict:
    edges = []
    for v in tree.vertices:
        if v in tree.parent:
            e = {"parent": tree.parent[v], "child": v}
            if weights:
                e["weight"] = weights[v]
            edges.append(e)
    return {"vertices": list(tree.vertices), "edges": edges}


def load_tree(path) -> tuple[DirectedTree, dict]:
    with open(path) as fh:
        return tree_from_json(json.load(fh))


class VertexResidual(NamedTuple):
    lhs: float
    rhs: float
    residual: float


def _rel(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / max(abs(rhs), EPS_GUARD)


def tree_moduli_residual(tree: DirectedTree, weights: dict, s: int, v) -> VertexResidual:
    """Scalar form of ``A*^s A^s = (A*A)^s`` at the basis vector ``e_v``."""
    tree.check(v)
    if s < 1:
        raise ValueError("s must be a positive integer")
    level = {v: 1.0}
    for _ in range(s):
        nxt = {}
        for x, mass in level.items():
            for u in tree.children[x]:
                nxt[u] = mass * weights[u] ** 2
        level = nxt
    lhs = float(sum(level.values()))
    rhs = float(sum(weights[u] ** 2 for u in tree.children[v])) ** s
    return VertexResidual(lhs, rhs, _rel(lhs, rhs))


def retained_vertices(tree: DirectedTree, depth: int) -> list:
    return [v for v in tree.vertices if tree.depth[v] < depth]


def truncate_to_matrix(tree: DirectedTree, weights: dict, depth: int) -> np.ndarray:
    """Matrix of the shift restricted to vertices of depth ``< depth``.

    Rows and columns follow :func:`retained_vertices`.
    """
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    keep = retained_vertices(tree, depth)
    index = {v: i for i, v in enumerate(keep)}
    m = np.zeros((len(keep), len(keep)), dtype=complex)
    for v in keep:
        for u in tree.children[v]:
            if u in index:
                m[index[u], index[v]] = weights[u]
    return m


def interior_vertices(tree: DirectedTree, depth: int, s: int) -> list:
    """Retained vertices whose whole depth-``s`` descendant cone survives truncation."""
    return [v for v in retained_vertices(tree, depth) if tree.depth[v] + min(s, tree.height(v)) < depth]


def matrix_vertex_residuals(m: np.ndarray, s: int, indices) -> list[VertexResidual]:
    """Diagonal entries of ``A*^s A^s`` and ``(A*A)^s`` at the given basis indices."""
    from .matcore import adjoint, mpow

    ms = mpow(m, s)
    lhs = np.real(np.diag(adjoint(ms) @ ms))
    rhs = np.real(np.diag(mpow(adjoint(m) @ m, s)))
    return [VertexResidual(float(lhs[i]), float(rhs[i]), _rel(lhs[i], rhs[i])) for i in indices]


def extend_leaves(tree: DirectedTree, weights: dict, extra: int) -> tuple[DirectedTree, dict]:
    """Hang a path of ``extra`` vertices under every non-root leaf, repeating the leaf's weight.

    This models a finite template as a leafless tree whose branches continue
    with constant weights.
    """
    vertices = list(tree.vertices)
    parent = dict(tree.parent)
    w = dict(weights)
    for v in tree.vertices:
        if tree.children[v] or v not in tree.parent:
            continue
        prev = v
        for j in range(1, extra + 1):
            u = f"{v}~{j}"
            vertices.append(u)
            parent[u] = prev
            w[u] = weights[v]
            prev = u
    return DirectedTree(vertices, parent), w


def branching_template(branches: int = 2, length: int = 4) -> DirectedTree:
    """Root with ``branches`` children, each starting a path of ``length`` edges."""
    vertices = ["r"]
    parent = {}
    for b in range(branches):
        prev = "r"
        for j in range(1, length + 1):
            v = f"b{b}_{j}"
            vertices.append(v)
            parent[v] = prev
            prev = v
    return DirectedTree(vertices, parent)


def path_template(length: int = 4) -> DirectedTree:
    vertices = [f"v{i}" for i in range(length + 1)]
    return DirectedTree(vertices, {f"v{i}": f"v{i-1}" for i in range(1, length + 1)})


def qqq_profile(tree: DirectedTree, weights: dict, max_k: int, vertices=None) -> dict:
    """Largest vertex residual for each exponent ``s = 1..max_k``.

    With ``vertices`` omitted every vertex of ``tree`` is used.
    """
    vs = tree.vertices if vertices is None else vertices
    return {s: max(tree_moduli_residual(tree, weights, s, v).residual for v in vs) for s in range(1, max_k + 1)}


def _solve_dense(a: list, b: list) -> list | None:
    """Gaussian elimination with partial pivoting on Python floats."""
    n = len(b)
    m = [row[:] + [bi] for row, bi in zip(a, b)]
    for c in range(n):
        piv = max(range(c, n), key=lambda i: abs(m[i][c]))
        if m[piv][c] == 0.0:
            return None
        m[c], m[piv] = m[piv], m[c]
        for i in range(c + 1, n):
            f = m[i][c] / m[c][c]
            if f:
                for j in range(c, n + 1):
                    m[i][j] -= f * m[c][j]
    x = [0.0] * n
    for i in reversed(range(n)):
        x[i] = (m[i][n] - sum(m[i][j] * x[j] for j in range(i + 1, n))) / m[i][i]
    return x


def _levenberg_marquardt(fun, x0: list, max_iter: int = LM_MAX_ITER) -> tuple[list, float]:
    """Minimise ``sum(fun(x)**2)`` with forward-difference Jacobians.

    Everything runs on Python floats, so the iterates are bit-reproducible
    regardless of how vectorised kernels happen to be laid out in memory; on
    this underdetermined problem that matters, because tiny perturbations move
    the limit point along the solution set.
    """
    x = [min(max(v, -LOG_WEIGHT_BOUND), LOG_WEIGHT_BOUND) for v in x0]
    r = fun(x)
    cost = sum(v * v for v in r)
    lam = 1e-3
    n = len(x)
    for _ in range(max_iter):
        if cost <= 1e-32:
            break
        cols = []
        for j in range(n):
            h = 1e-7 * max(1.0, abs(x[j]))
            xh = x[:]
            xh[j] += h
            cols.append([(a - b) / h for a, b in zip(fun(xh), r)])
        jtj = [[sum(p * q for p, q in zip(cols[i], cols[j])) for j in range(n)] for i in range(n)]
        jtr = [sum(p * q for p, q in zip(cols[i], r)) for i in range(n)]
        improved = False
        while lam < 1e16:
            a = [[jtj[i][j] + (lam * max(jtj[i][i], 1e-12) if i == j else 0.0) for j in range(n)] for i in range(n)]
            step = _solve_dense(a, [-g for g in jtr])
            if step is None:
                lam *= 10.0
                continue
            xn = [min(max(v + d, -LOG_WEIGHT_BOUND), LOG_WEIGHT_BOUND) for v, d in zip(x, step)]
            rn = fun(xn)
            cn = sum(v * v for v in rn)
            if cn < cost:
                small = max(abs(d) for d in step) <= 1e-15 * (1.0 + max(abs(v) for v in x))
                x, r, cost = xn, rn, cn
                lam = max(lam / 3.0, 1e-12)
                improved = not small
                break
            lam *= 4.0
        if not improved:
            break
    return x, cost


def search_qqq_weights(
    n: int,
    template: DirectedTree,
    max_k: int = 5,
    tol: float = 1e-10,
    seed: int = 0,
    restarts: int = 200,
    min_gap: float | None = None,
) -> dict | None:
    """Weights on ``template`` meeting the moduli equation at ``n`` only.

    The template's leaves are continued by constant-weight paths (see
    :func:`extend_leaves`), which makes every template vertex interior.  A
    solution has vertex residual ``<= tol`` at exponent ``n`` everywhere and,
    for each ``k`` in ``2..max_k`` other than ``n``, residual ``>= min_gap``
    (default ``10*tol``) at some vertex.  Multi-start Levenberg-Marquardt on
    the log-weights; restart ``r`` is seeded from ``(seed, r)``.  Returns
    ``None`` when no restart succeeds.
    """
    if n < 2:
        raise BadParams("n must be >= 2")
    if len(template.branching_vertices()) > 1:
        raise BadParams("template must have at most one branching vertex")
    gap = 10 * tol if min_gap is None else min_gap
    free = [v for v in template.vertices if v in template.parent]
    if not free:
        return None
    others = [k for k in range(2, max_k + 1) if k != n]

    def unpack(x):
        return {v: math.exp(xi) for v, xi in zip(free, x)}

    def eq_residuals(x, s):
        ext, w = extend_leaves(template, unpack(x), max(max_k, n))
        out = []
        for v in template.vertices:
            r = tree_moduli_residual(ext, w, s, v)
            out.append(r.lhs / r.rhs - 1.0 if r.rhs > 0 else r.lhs)
        return out

    for r in range(restarts):
        rng = np.random.default_rng(trial_seed(seed, "qqq", r))
        x0 = [float(v) for v in rng.normal(0.0, 0.6, size=len(free))]
        x, _ = _levenberg_marquardt(lambda y: eq_residuals(y, n), x0)
        if max(abs(v) for v in x) >= LOG_WEIGHT_BOUND:
            continue
        w = unpack(x)
        ext, wx = extend_leaves(template, w, max(max_k, n))
        prof = qqq_profile(ext, wx, max(max_k, n), template.vertices)
        if prof[n] <= tol and all(prof[k] >= gap for k in others):
            return w
    return None


# ---------------------------------------------------------------------------
# bilateral shifts


@dataclass(frozen=True)
class BilateralWindow:
    """Log-weights ``a_l = ln(lambda_l)`` for ``l`` in the contiguous window ``[start, start+len-1]``."""

    start: int
    values: tuple

    def __init__(self, start: int, values):
        vals = tuple(float(v) for v in values)
        if not vals:
            raise ValueError("window must be nonempty")
        object.__setattr__(self, "start", int(start))
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, lo: int, hi: int, fn) -> "BilateralWindow":
        return cls(lo, [fn(l) for l in range(lo, hi + 1)])

    @property
    def stop(self) -> int:
        return self.start + len(self.values) - 1

    def __getitem__(self, l: int) -> float:
        return self.values[l - self.start]


def bilateral_recurrence_residual(a: BilateralWindow, k: int) -> float:
    """``max_l |(k-1) a_l - (a_{l+1} + ... + a_{l+k-1})|`` over the window."""
    if k < 2:
        raise ValueError("k must be >= 2")
    vals = np.asarray(a.values)
    count = len(vals) - k + 1
    if count < 1:
        raise WindowTooShort(f"window of length {len(vals)} holds no instance of the order-{k} relation")
    worst = 0.0
    for i in range(count):
        worst = max(worst, abs((k - 1) * vals[i] - float(np.sum(vals[i + 1 : i + k]))))
    return worst


def recurrence_system(ks, lo: int, hi: int) -> np.ndarray:
    """Stacked linear equations of the recurrences for each ``k`` on ``[lo, hi]``."""
    size = hi - lo + 1
    rows = []
    for k in ks:
        if k < 2:
            raise ValueError("k must be >= 2")
        for i in range(size - k + 1):
            row = np.zeros(size)
            row[i] = k - 1
            row[i + 1 : i + k] = -1.0
            rows.append(row)
    if not rows:
        raise WindowTooShort("window too short for the requested relations")
    return np.array(rows)


def joint_solution_space(ks, lo: int, hi: int, rtol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (rows) of sequences on ``[lo, hi]`` satisfying every recurrence.

    Each row is signed so that its entry sum is nonnegative.
    """
    m = recurrence_system(ks, lo, hi)
    _, sv, vt = np.linalg.svd(m)
    rank = int(np.sum(sv > rtol * sv[0]))
    basis = vt[rank:].copy()
    basis[basis.sum(axis=1) < 0] *= -1.0
    return basis


def char_poly(k: int) -> list[int]:
    """Coefficients of ``k z^k - (z^(k-1) + ... + 1)``, highest degree first."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return [k] + [-1] * k


def recurrence_poly(k: int) -> list[int]:
    """``z^(k-1) + ... + z - (k-1)``, obtained by substituting ``a_l = z^l`` into the order-``k`` relation.

    Its roots are the reciprocals of the roots of ``char_poly(k-1)``.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    return [1] * (k - 1) + [-(k - 1)]


def common_roots(k1: int, k2: int, tol: float = 1e-8) -> list[complex]:
    """Roots of ``gcd(char_poly(k1), char_poly(k2))``, with near-duplicates merged within ``tol``."""
    g = poly_gcd(char_poly(k1), char_poly(k2))
    out: list[complex] = []
    for z in poly_roots(g):
        if all(abs(z - y) > tol for y in out):
            out.append(z)
    return out


def periodic_shift(weights) -> np.ndarray:
    """Cyclic weighted shift ``e_j -> w_j e_{j+1 mod N}``.

    Away from the wrap-around seam it agrees with the bilateral shift carrying the
    same weights, and it is invertible whenever all weights are nonzero.
    """
    w = np.asarray(weights, dtype=float)
    n = len(w)
    m = np.zeros((n, n), dtype=complex)
    for j in range(n):
        m[(j + 1) % n, j] = w[j]
    return m


def seam_free_indices(n: int, reach: int) -> list[int]:
    """Indices at distance ``> reach`` from the seam between ``n-1`` and ``0``."""
    return [j for j in range(n) if j - reach >= 0 and j + reach <= n - 1]
