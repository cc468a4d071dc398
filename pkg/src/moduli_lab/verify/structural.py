"""Structural suites: intertwiners, the Aluthge-type transform, tree and bilateral shifts.

These cover properties that are not a single forcing implication or Loewner
chain: the intertwiner root lemma, hyponormality of the transform of class A(k)
operators, the scalar tree reduction against its matrix, the qqq pattern on a
one-branch tree and constancy of bilateral shifts.
"""

from __future__ import annotations

import numpy as np

from ..classes import class_a_k_residual, classify, is_invertible
from ..decomp import berberian_check
from ..errors import BadParams
from ..matcore import adjoint, min_eig, mpow, opnorm, psd_power
from ..polynomials import poly_eval, poly_roots
from ..shifts import (
    DirectedTree,
    branching_template,
    char_poly,
    common_roots,
    extend_leaves,
    interior_vertices,
    joint_solution_space,
    matrix_vertex_residuals,
    path_template,
    recurrence_poly,
    retained_vertices,
    search_qqq_weights,
    seam_free_indices,
    tree_moduli_residual,
    truncate_to_matrix,
    BilateralWindow,
    bilateral_recurrence_residual,
)
from ..transforms import aluthge_k_transform
from . import generators as G
from .common import Trials, compress, draw_dim, register
from ..report import trial_seed


def _check_ks(key):
    def check(p):
        if not p[key] or min(p[key]) < 1:
            raise BadParams(f"{key} must be a nonempty list of positive integers")

    return check


# ---------------------------------------------------------------------------
# intertwiners


def _intertwiner_triple(rng: np.random.Generator, n: int):
    """``M = U diag(mu) U*``, ``N = V diag(nu) V*`` and ``T = V C U*`` with
    ``C[i, j] = 0`` unless ``nu_i = mu_j``, so ``T M = N T`` exactly."""
    pool = rng.uniform(0.0, 2.0, int(rng.integers(1, n + 1)))
    mu = rng.choice(pool, n)
    nu = rng.choice(pool, n)
    c = G.ginibre(rng, n) * (nu[:, None] == mu[None, :])
    u, v = G.haar_unitary(rng, n), G.haar_unitary(rng, n)
    m = (u * mu) @ adjoint(u)
    m = 0.5 * (m + adjoint(m))
    nn = (v * nu) @ adjoint(v)
    nn = 0.5 * (nn + adjoint(nn))
    return m, nn, v @ c @ adjoint(u)


@register(
    "fug",
    "structural",
    {"trials": 200, "k": [2, 3], "hyp_tol": 1e-10, "concl_tol": 1e-7},
    _check_ks("k"),
    "T M^k = N^k T with M, N >= 0 forces T M = N T",
)
def run_fug(cfg, params, report):
    """Constructed intertwiners of PSD pairs with matched spectra (repeated
    eigenvalues included); ``k`` cycles through ``params["k"]``.  Both the direct
    conclusion residual and the 2x2 embedding route are judged."""
    trials = Trials(cfg, "triple")
    for i in range(params["trials"]):
        ts, rng = trials(i)
        k = params["k"][i % len(params["k"])]
        m, nn, t = _intertwiner_triple(rng, draw_dim(rng, params))
        chk = berberian_check(m, nn, t, k, cfg.tol)
        report.trials_run += 1
        hyp = chk.hyp_residual / max(chk.hyp_scale, 1e-300)
        concl = chk.concl_residual / max(chk.concl_scale, 1e-300)
        embedded = chk.embedded_residual / max(chk.concl_scale, 1e-300)
        report.track_max("hypothesis", hyp)
        if hyp > params["hyp_tol"]:
            report.count("hypothesis_rejected")
            continue
        report.count(f"accepted_k{k}")
        report.track_max("conclusion", concl)
        report.track_max("conclusion:embedded", embedded)
        if max(concl, embedded) > params["concl_tol"]:
            report.add_violation(
                ts, {"hypothesis": hyp, "conclusion": concl, "embedded": embedded}, f"intertwiner conclusion fails, k={k}"
            )


# ---------------------------------------------------------------------------
# transform of class A(k)


def _interior_class_a(b, k, tol, idx):
    mod2 = adjoint(b) @ b
    inner = adjoint(b) @ psd_power(mod2, k, tol) @ b
    return max(0.0, -min_eig(compress(psd_power(inner, 1.0 / (k + 1), tol) - mod2, idx)))


def _interior_hyponormal(b, idx):
    return max(0.0, -min_eig(compress(adjoint(b) @ b - b @ adjoint(b), idx)))


@register(
    "pop",
    "structural",
    {"trials": 500, "k": [1, 2], "fixtures": 100, "shifts": 100, "fixed_tol": 1e-7},
    _check_ks("k"),
    "the transform W U ||A|^k A|^(1/(k+1)) of a class A(k) operator is hyponormal",
)
def run_pop(cfg, params, report):
    """Three streams.  ``search`` alternates near-scalar candidates ``cI + eps G``
    with invertible pool draws, keeps class A(k) draws and classifies the
    transform at the gap-widened tolerance.  ``normal`` checks the fixed point
    on normal matrices.  ``shift`` applies the transform to cyclic shifts with
    nondecreasing weights and judges it on seam-free indices.
    """
    tol = cfg.tol
    cut = tol.threshold(1.0)
    wide = tol.scaled(params["gap"])
    cut_c = wide.threshold(1.0)

    trials = Trials(cfg, "search")
    for i in range(params["trials"]):
        ts, rng = trials(i)
        n = draw_dim(rng, params)
        if i % 2 == 0:
            kind, a = "near_scalar", G.class_a_candidate(rng, n)
        else:
            kind, a = G.pool_draw(rng, n, invertible=True)
        report.trials_run += 1
        if not is_invertible(a, tol):
            continue
        for k in params["k"]:
            h = class_a_k_residual(a, k, tol)
            if h > cut:
                continue
            report.count(f"search_accepted:k{k}")
            report.track_max("hypothesis", h)
            r = classify(aluthge_k_transform(a, k, tol), k=k, tol=wide)["hyponormal"]
            report.track_max("conclusion", r["residual"])
            if not r["holds"]:
                report.add_violation(ts, {"class_A_k": h, "hyponormal": r["residual"]}, f"search/{kind}: k={k}")

    trials = Trials(cfg, "normal")
    for i in range(params["fixtures"]):
        ts, rng = trials(i)
        a = G.random_normal(rng, draw_dim(rng, params))
        report.trials_run += 1
        for k in params["k"]:
            d = opnorm(aluthge_k_transform(a, k, tol) - a) / opnorm(a)
            report.track_max("normal_fixed_point", d)
            if d > params["fixed_tol"]:
                report.add_violation(ts, {"diff": d}, f"normal fixture is not fixed, k={k}")

    report.notes.append("shift stream: cyclic shifts with nondecreasing weights judged on seam-free indices")
    trials = Trials(cfg, "shift")
    for i in range(params["shifts"]):
        ts, rng = trials(i)
        k = params["k"][i % len(params["k"])]
        reach = k + 3
        size = int(rng.integers(2 * reach + 4, 2 * reach + 12))
        a = G.hyponormal_periodic(rng, size, plateau=(0.0, 0.5)[i % 2])
        b = a / opnorm(a)
        idx = seam_free_indices(size, reach)
        report.trials_run += 1
        h = _interior_class_a(b, k, tol, idx)
        report.track_max("hypothesis:shift", h)
        if h > cut:
            report.add_violation(ts, {"class_A_k": h}, "shift fixture is not class A(k) on interior indices")
            continue
        report.count(f"shift:k{k}")
        hat = aluthge_k_transform(b, k, tol)
        c = _interior_hyponormal(hat / opnorm(hat), idx)
        report.track_max("conclusion:shift", c)
        if c > cut_c:
            report.add_violation(ts, {"class_A_k": h, "hyponormal": c}, f"shift: interior transform fails, k={k}")


# ---------------------------------------------------------------------------
# tree shifts


def random_tree(rng: np.random.Generator, size: int, roots: int = 1) -> tuple[DirectedTree, dict]:
    """Random forest on ``size`` vertices: vertex ``i >= roots`` hangs under a uniform earlier vertex."""
    vertices = [f"v{i}" for i in range(size)]
    parent = {vertices[i]: vertices[int(rng.integers(i))] for i in range(roots, size)}
    weights = {v: float(rng.uniform(0.3, 2.0)) for v in parent}
    return DirectedTree(vertices, parent), weights


@register(
    "tree_oracle",
    "structural",
    {"trials": 50, "max_vertices": 40, "s_max": 4, "match_tol": 1e-10},
    None,
    "scalar tree reduction agrees with the truncated matrix on interior vertices",
)
def run_tree_oracle(cfg, params, report):
    trials = Trials(cfg, "tree")
    for i in range(params["trials"]):
        ts, rng = trials(i)
        size = int(rng.integers(2, params["max_vertices"] + 1))
        tree, w = random_tree(rng, size, roots=1 + int(rng.random() < 0.25))
        height = max(tree.depth.values())
        depth = int(rng.integers(1, height + 2))
        m = truncate_to_matrix(tree, w, depth)
        index = {v: j for j, v in enumerate(retained_vertices(tree, depth))}
        report.trials_run += 1
        for s in range(1, params["s_max"] + 1):
            inner = interior_vertices(tree, depth, s)
            report.count("vertex_checks", len(inner))
            mat = matrix_vertex_residuals(m, s, [index[v] for v in inner])
            for v, rm in zip(inner, mat):
                rt = tree_moduli_residual(tree, w, s, v)
                scale = max(abs(rt.lhs), abs(rt.rhs), 1.0)
                d = max(abs(rt.lhs - rm.lhs), abs(rt.rhs - rm.rhs)) / scale
                report.track_max("mismatch", d)
                if d > params["match_tol"]:
                    report.add_violation(ts, {"mismatch": d}, f"vertex {v}, s={s}, depth={depth}")


def _check_qqq(p):
    if not p["n"] or min(p["n"]) < 2:
        raise BadParams("n must list integers >= 2")
    if p["max_k"] < max(p["n"]):
        raise BadParams("max_k must be >= every n")


@register(
    "qqq",
    "structural",
    {"n": [2, 3], "max_k": 5, "eq_tol": 1e-10, "min_gap": 1e-3, "restarts": 200, "branches": 2, "length": 4},
    _check_qqq,
    "a one-branch tree shift meets the n-th moduli equation and misses the others",
)
def run_qqq(cfg, params, report):
    """Finds weights with :func:`search_qqq_weights` and replays the pattern on the
    truncated matrix, judged on template vertices (all interior after the
    constant-weight continuation)."""
    max_k = params["max_k"]
    report.notes.append(
        "the pattern is exhibited on interior vertices of a finite truncation; "
        "the leaves continue as constant-weight paths"
    )
    template = branching_template(params["branches"], params["length"])
    if search_qqq_weights(2, path_template(params["length"]), max_k, params["eq_tol"], cfg.seed, 5) is not None:
        report.add_violation(cfg.seed, {}, "path template produced a qqq pattern")
    for n in params["n"]:
        report.trials_run += 1
        w = search_qqq_weights(
            n, template, max_k, params["eq_tol"], trial_seed(cfg.seed, "qqq", n), params["restarts"], params["min_gap"]
        )
        if w is None:
            report.add_violation(cfg.seed, {"n": n}, f"no qqq weights found for n={n}")
            continue
        report.count(f"found:n{n}")
        ext, wx = extend_leaves(template, w, 2 * max_k)
        depth = max(ext.depth.values()) + 1
        m = truncate_to_matrix(ext, wx, depth)
        index = {v: j for j, v in enumerate(retained_vertices(ext, depth))}
        idx = [index[v] for v in template.vertices]
        scale = opnorm(m)
        for s in range(2, max_k + 1):
            rel = max(r.residual for r in matrix_vertex_residuals(m, s, idx))
            ms = mpow(m / scale, s)
            col = opnorm((adjoint(ms) @ ms - mpow(adjoint(m / scale) @ (m / scale), s))[:, idx])
            tree_rel = max(tree_moduli_residual(ext, wx, s, v).residual for v in template.vertices)
            report.track_max(f"n{n}:s{s}", rel)
            report.track_max(f"n{n}:s{s}:columns", col)
            if abs(rel - tree_rel) > 1e-9 * max(1.0, tree_rel):
                report.add_violation(cfg.seed, {"matrix": rel, "tree": tree_rel}, f"n={n}, s={s}: routes disagree")
            if s == n and max(rel, col) > params["eq_tol"]:
                report.add_violation(cfg.seed, {"residual": rel, "columns": col}, f"n={n}: equation fails on the matrix")
        others = [report.max_residuals[f"n{n}:s{s}"] for s in range(2, max_k + 1) if s != n]
        if others and max(others) < params["min_gap"]:
            report.add_violation(cfg.seed, {"max_other": max(others)}, f"n={n}: no other exponent separates")


# ---------------------------------------------------------------------------
# bilateral shifts


@register(
    "bilateral",
    "structural",
    {"pairs": [2, 3, 3, 4, 2, 5], "half_width": 10, "k_max": 10, "basis_tol": 1e-9, "root_tol": 1e-8},
    None,
    "two moduli equations force a bilateral weighted shift to have constant weights",
)
def run_bilateral(cfg, params, report):
    """``pairs`` is a flat list ``m1, n1, m2, n2, ...`` of exponent pairs."""
    flat = params["pairs"]
    if len(flat) % 2 or min(flat) < 2:
        raise BadParams("pairs must be a flat list of exponent pairs, each exponent >= 2")
    lo, hi = -params["half_width"], params["half_width"]
    ones = np.ones(hi - lo + 1) / np.sqrt(hi - lo + 1)
    for m, n in zip(flat[::2], flat[1::2]):
        report.trials_run += 1
        basis = joint_solution_space([m, n], lo, hi)
        report.count(f"dimension:{m},{n}", len(basis))
        if len(basis) != 1:
            report.add_violation(cfg.seed, {"dimension": len(basis)}, f"({m},{n}): solution space is not one-dimensional")
            continue
        d = float(np.max(np.abs(basis[0] - ones)))
        report.track_max("basis_distance", d)
        if d > params["basis_tol"]:
            report.add_violation(cfg.seed, {"distance": d}, f"({m},{n}): solution is not constant")
        roots = common_roots(m - 1, n - 1, params["root_tol"])
        report.track_max("common_root_distance", max(abs(z - 1.0) for z in roots))
        if len(roots) != 1 or abs(roots[0] - 1.0) > params["root_tol"]:
            report.add_violation(cfg.seed, {"roots": [str(z) for z in roots]}, f"({m},{n}): common roots are not {{1}}")

    for k in range(1, params["k_max"] + 1):
        if poly_eval(char_poly(k), 1) != 0:
            report.add_violation(cfg.seed, {"k": k}, f"p_{k}(1) != 0")

    # reciprocity between the recurrence's polynomial and char_poly(k-1)
    for k in range(2, params["k_max"] + 1):
        rec = sorted(poly_roots(recurrence_poly(k)), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
        inv = sorted((1.0 / z for z in poly_roots(char_poly(k - 1))), key=lambda z: (round(z.real, 6), round(z.imag, 6)))
        d = max(min(abs(z - y) for y in inv) for z in rec)
        report.track_max("reciprocity", d)
        if len(rec) != len(inv) or d > params["root_tol"]:
            report.add_violation(cfg.seed, {"distance": d}, f"k={k}: recurrence roots are not reciprocals of p_{k-1}")
        for z in rec:
            if abs(z.imag) > params["root_tol"]:
                continue
            win = BilateralWindow.from_function(lo, hi, lambda l, z=z.real: z**l)
            r = bilateral_recurrence_residual(win, k) / max(1.0, max(abs(v) for v in win.values))
            report.track_max("geometric_window", r)
            if r > params["root_tol"]:
                report.add_violation(cfg.seed, {"residual": r}, f"k={k}: geometric window z={z.real:g} fails")
