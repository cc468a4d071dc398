"""Operator-inequality suites.

Every check is a Löwner comparison recorded as a scale-free margin
``lambda_min(Y - X) / max(||X||, ||Y||)``; margins below ``params["margin"]``
are violations.

The chain suites draw instances from three sources:

* ``normal``: normal invertible matrices, where every chain collapses to
  equalities;
* ``shift``: cyclic weighted shifts with nondecreasing weights, compared on
  principal compressions to seam-free indices (the finite shadow of a
  bilateral shift, which is genuinely non-normal);
* ``filtered``: draws from the invertible search pool kept only when the
  suite's hypothesis residual is within tolerance.
"""

from __future__ import annotations

import numpy as np

from ..classes import class_a_k_residual, is_invertible, log_hyponormal_residual, moduli_residual, p_hyponormal_residual
from ..decomp import douglas_factor, halmos_unitaries, phi_psi_maps
from ..errors import BadParams
from ..matcore import adjoint, fun_calc, fun_calc_many, herm_eig, loewner_margin, min_eig, mpow, opnorm, psd_power
from ..report import VerifyReport
from ..shifts import seam_free_indices
from ..transforms import FurutaParams, furuta_f, furuta_g_grid
from . import generators as G
from .common import DEFAULT_MARGIN, SuiteConfig, Trials, check_leq, compress, draw_dim, register, rel_diff

P_GRID = [round(0.1 * i, 1) for i in range(1, 10)]
COND_BUDGET = 1e8


def _unit(a):
    return a / opnorm(a)


def _gram(a, n):
    """``A*^n A^n``."""
    an = mpow(a, n)
    return adjoint(an) @ an


def _cogram(a, n):
    """``A^n A*^n``."""
    an = mpow(a, n)
    return an @ adjoint(an)


def _neg(h, idx=None) -> float:
    return max(0.0, -min_eig(compress(h, idx)))


# ---------------------------------------------------------------------------
# instance sources for the chain suites


def chain_instances(
    cfg: SuiteConfig, params: dict, report: VerifyReport, hypothesis, reach: int, max_power: int = 4
):
    """Yield ``(trial_seed, A, idx, source)`` with ``A`` normalized to unit norm.

    ``hypothesis(A, idx)`` returns a residual; normal and shift instances are
    expected to satisfy it (a failure there is a violation), filtered draws are
    kept only when it is within tolerance.

    ``max_power`` is the highest power of ``A`` whose modulus the suite forms.
    Instances keep ``cond(A)^(2 max_power) <= COND_BUDGET`` so the smallest
    eigenvalues of ``|A^max_power|^2`` stay well above rounding; fractional
    powers of eigenvalues near ``1e-16`` would otherwise swamp the margin.
    Filtered draws outside the budget are counted as ``skipped_ill_conditioned``.
    """
    cut = cfg.tol.threshold(1.0)
    log_budget = np.log10(COND_BUDGET) / (2 * max_power)
    spread = min(10.0, 10.0**log_budget)

    stream = Trials(cfg, "normal")
    for i in range(params["fixtures"]):
        ts, rng = stream(i)
        a = _unit(G.random_normal(rng, draw_dim(rng, params), invertible=True, spread=spread))
        report.trials_run += 1
        h = hypothesis(a, None)
        report.track_max("hypothesis:normal", h)
        if h > cut:
            report.add_violation(ts, {"hypothesis": h}, "normal fixture fails the hypothesis")
            continue
        report.count("normal")
        yield ts, a, None, "normal"

    stream = Trials(cfg, "shift")
    for i in range(params["shifts"]):
        ts, rng = stream(i)
        size = int(rng.integers(2 * reach + 4, 2 * reach + 12))
        a = _unit(G.hyponormal_periodic(rng, size, plateau=(0.0, 0.5)[i % 2]))
        idx = seam_free_indices(size, reach)
        report.trials_run += 1
        h = hypothesis(a, idx)
        report.track_max("hypothesis:shift", h)
        if h > cut:
            report.add_violation(ts, {"hypothesis": h}, "shift fixture fails the hypothesis on interior indices")
            continue
        report.count("shift")
        yield ts, a, idx, "shift"

    stream = Trials(cfg, "filtered")
    for i in range(params["search"]):
        ts, rng = stream(i)
        kind, a = G.pool_draw(rng, draw_dim(rng, params), invertible=True)
        report.trials_run += 1
        if not is_invertible(a, cfg.tol):
            continue
        sv = np.linalg.svd(a, compute_uv=False)
        if np.log10(sv[0] / sv[-1]) > log_budget:
            report.count("skipped_ill_conditioned")
            continue
        a = _unit(a)
        h = hypothesis(a, None)
        if h > cut:
            continue
        report.track_max("hypothesis:filtered", h)
        report.count("filtered")
        yield ts, a, None, f"filtered/{kind}"


CHAIN_DEFAULTS = {"fixtures": 100, "shifts": 100, "search": 1000, "margin": DEFAULT_MARGIN}


# ---------------------------------------------------------------------------


def _check_lohe(p):
    if not p["p"]:
        raise BadParams("p grid must be nonempty")


@register(
    "lohe",
    "inequality",
    {"trials": 200, "dim_max": 8, "p": P_GRID, "margin": DEFAULT_MARGIN},
    _check_lohe,
    "0 <= B <= A implies B^p <= A^p",
)
def run_lohe(cfg, params, report):
    tol = cfg.tol
    ps = params["p"]
    if any(not 0 <= p <= 1 for p in ps):
        report.notes.append("grid contains exponents outside [0, 1]; violations are expected there")
    trials = Trials(cfg, "pairs")
    for i in range(params["trials"]):
        ts, rng = trials(i)
        n = draw_dim(rng, params)
        b = G.random_psd(rng, n, int(rng.integers(1, n + 1)))
        c = G.ginibre(rng, int(rng.integers(1, n + 1)), n)
        a = b + adjoint(c) @ c
        fs = [(lambda x, p=p: np.power(x, p)) for p in ps]
        bp = fun_calc_many(b, fs, tol)
        ap = fun_calc_many(a, fs, tol)
        for p, x, y in zip(ps, bp, ap):
            check_leq(report, ts, x, y, f"B^{p} <= A^{p}", params["margin"], tol)
        report.trials_run += 1


@register(
    "hansen",
    "inequality",
    {"trials": 200, "t": [0.25, 0.5, 0.75], "margin": DEFAULT_MARGIN, "equal_tol": 1e-8, "strict_min": 1e-6},
    None,
    "P f(A) P <= f(PAP), with equality only when PA = AP",
)
def run_hansen(cfg, params, report):
    """Hansen's inequality for ``f = x^t``, ``0 < t < 1``.

    The asserted direction is ``P f(A) P <= f(PAP)`` (``f`` is operator
    concave).  The opposite comparison is also evaluated and the number of
    pairs on which it fails is reported as ``reverse_direction_fails``.
    Equality is required on commuting pairs and excluded (relative gap at least
    ``strict_min``) on the others.
    """
    tol = cfg.tol
    trials = Trials(cfg, "pairs")
    for i in range(params["trials"]):
        ts, rng = trials(i)
        n = draw_dim(rng, params)
        r = int(rng.integers(1, n))
        commuting = i % 4 == 0
        if commuting:
            u = G.haar_unitary(rng, n)
            a = (u * rng.exponential(1.0, n)) @ adjoint(u)
            pr = u[:, :r] @ adjoint(u[:, :r])
        else:
            a = G.random_psd(rng, n)
            pr = G.random_projection(rng, n, r)
        comm = opnorm(pr @ a - a @ pr) / opnorm(a)
        report.track_max("commutator:" + ("commuting" if commuting else "generic"), comm)
        fs = [(lambda x, t=t: np.power(x, t)) for t in params["t"]]
        fa = fun_calc_many(a, fs, tol)
        fpap = fun_calc_many(pr @ a @ pr, fs, tol)
        for t, x, y in zip(params["t"], fpap, fa):
            lhs = pr @ y @ pr
            check_leq(report, ts, lhs, x, f"P f(A) P <= f(PAP), t={t}", params["margin"], tol)
            if loewner_margin(x, lhs, tol) < params["margin"]:
                report.count("reverse_direction_fails")
            d = rel_diff(lhs, x)
            if commuting:
                report.track_max("equality_gap:commuting", d)
                if d > params["equal_tol"]:
                    report.add_violation(ts, {"diff": d}, f"commuting pair without equality, t={t}")
            else:
                report.track_min("equality_gap:generic", d)
                if d < params["strict_min"]:
                    report.add_violation(ts, {"diff": d, "commutator": comm}, f"equality on a non-commuting pair, t={t}")
        report.count("commuting" if commuting else "generic")
        report.trials_run += 1


def _square(x):
    return x * x


def _neg_sqrt(x):
    return -np.sqrt(x)


@register(
    "dcj",
    "inequality",
    {"trials": 200, "margin": DEFAULT_MARGIN, "equal_tol": 1e-8, "probe_tol": 1e-6},
    None,
    "f(Psi(Z)) <= Psi(f(Z)) for operator convex f and the unital positive map Psi",
)
def run_dcj(cfg, params, report):
    """Fixtures cycle through three constructions, all built from :func:`halmos_unitaries`.

    ``contraction``: random contraction ``Q`` and random ``Z >= 0``.
    ``douglas``: ``Q`` from :func:`douglas_factor` of ``A*A <= B`` and ``Z = diag(B^beta, 0)``.
    ``commuting``: ``Q`` a unitary commuting with ``B`` and ``Z = diag(B^beta, 0)``;
    here ``Psi`` is a unitary conjugation on the algebra generated by ``Z``.
    """
    tol = cfg.tol
    trials = Trials(cfg, "fixtures")
    for i in range(params["trials"]):
        ts, rng = trials(i)
        n = draw_dim(rng, params)
        kind = ("contraction", "douglas", "commuting")[i % 3]
        beta = rng.uniform(0.2, 1.0)
        zero = np.zeros((n, n), dtype=complex)
        if kind == "contraction":
            g = G.ginibre(rng, n)
            q = g / (opnorm(g) * rng.uniform(1.0, 2.0))
            z = G.random_psd(rng, 2 * n)
        else:
            b = G.random_pd(rng, n)
            if kind == "douglas":
                g = G.ginibre(rng, n)
                a = g / (opnorm(g) * rng.uniform(1.0, 2.0)) @ psd_power(b, 0.5, tol)
            else:
                vecs = herm_eig(b, tol).eigenvectors  # phases in b's eigenbasis commute with b
                w = (vecs * np.exp(2j * np.pi * rng.random(n))) @ adjoint(vecs)
                a = w @ psd_power(b, 0.5, tol)
            q = douglas_factor(a, b, tol)
            bb = psd_power(b, beta, tol)
            z = np.block([[bb, zero], [zero, zero]])
        pair = halmos_unitaries(q, tol)
        psi = lambda x: phi_psi_maps(pair, x).psi  # noqa: E731
        pz = psi(z)
        if kind != "contraction":
            d = rel_diff(pz, adjoint(q) @ bb @ q)
            report.track_max("block_oracle", d)
            if d > params["equal_tol"]:
                report.add_violation(ts, {"block_oracle": d}, "Psi(diag(B^beta, 0)) differs from Q* B^beta Q")
        scale = opnorm(z) ** 2
        probe = opnorm(psi(z @ z) - pz @ pz) / scale
        report.track_max(f"multiplicativity:{kind}", probe)
        if kind == "commuting" and probe > params["probe_tol"]:
            report.add_violation(ts, {"probe": probe}, "commuting fixture is not multiplicative")
        for name, f in (("x^2", _square), ("-x^(1/2)", _neg_sqrt)):
            lhs = fun_calc(pz, f, tol) if name != "x^2" else pz @ pz
            rhs = psi(fun_calc(z, f, tol))
            check_leq(report, ts, lhs, rhs, f"{kind}: f(Psi(Z)) <= Psi(f(Z)), f = {name}", params["margin"], tol)
            if rel_diff(lhs, rhs) <= params["equal_tol"]:
                report.count(f"equality:{kind}")
                if probe > params["probe_tol"]:
                    report.add_violation(ts, {"probe": probe}, f"equality without multiplicativity, f = {name}")
            elif kind == "commuting":
                report.add_violation(ts, {"diff": rel_diff(lhs, rhs)}, f"commuting fixture without equality, f = {name}")
        report.count(kind)
        report.trials_run += 1


# ---------------------------------------------------------------------------
# chains


def _check_ph(p):
    if not p["p"] > 0:
        raise BadParams("p must be positive")
    if p["n_max"] < int(np.ceil(p["p"])) + 2:
        raise BadParams("n_max must be at least m + 2")


@register("ph_chain", "inequality", {**CHAIN_DEFAULTS, "p": 0.5, "n_max": 5}, _check_ph, "power chains for p-hyponormal A")
def run_ph_chain(cfg, params, report):
    tol, p, nmax, floor = cfg.tol, params["p"], params["n_max"], params["margin"]
    m = int(np.ceil(p))

    def hyp(a, idx):
        if idx is None:
            return p_hyponormal_residual(a, p, tol)
        return _neg(psd_power(adjoint(a) @ a, p, tol) - psd_power(a @ adjoint(a), p, tol), idx)

    for ts, a, idx, src in chain_instances(cfg, params, report, hyp, nmax + 1, nmax):
        for n in range(1, m + 1):
            check_leq(report, ts, mpow(adjoint(a) @ a, n), _gram(a, n), f"{src}: (i) (A*A)^{n} <= A*^{n}A^{n}", floor, tol, idx)
            check_leq(report, ts, mpow(a @ adjoint(a), n), _cogram(a, n), f"{src}: (i) (AA*)^{n} <= A^{n}A*^{n}", floor, tol, idx)
        xs = {n: psd_power(_gram(a, n), (p + 1) / n, tol) for n in range(m + 1, nmax + 1)}
        ys = {n: psd_power(_cogram(a, n), (p + 1) / n, tol) for n in range(m + 1, nmax + 1)}
        check_leq(report, ts, psd_power(adjoint(a) @ a, p + 1, tol), xs[m + 1], f"{src}: (ii) base", floor, tol, idx)
        check_leq(report, ts, ys[m + 1], psd_power(a @ adjoint(a), p + 1, tol), f"{src}: (ii) dual base", floor, tol, idx)
        for n in range(m + 1, nmax):
            check_leq(report, ts, xs[n], xs[n + 1], f"{src}: (ii) step {n}", floor, tol, idx)
            check_leq(report, ts, ys[n + 1], ys[n], f"{src}: (ii) dual step {n}", floor, tol, idx)


def _check_nmax(p):
    if p["n_max"] < 2:
        raise BadParams("n_max must be >= 2")


@register("log_chain", "inequality", {**CHAIN_DEFAULTS, "n_max": 5}, _check_nmax, "power chains for log-hyponormal A")
def run_log_chain(cfg, params, report):
    tol, nmax, floor = cfg.tol, params["n_max"], params["margin"]

    def hyp(a, idx):
        if idx is None:
            r = log_hyponormal_residual(a, tol)
            return np.inf if r is None else r
        return _neg(fun_calc(adjoint(a) @ a, np.log, tol) - fun_calc(a @ adjoint(a), np.log, tol), idx)

    for ts, a, idx, src in chain_instances(cfg, params, report, hyp, nmax + 1, nmax):
        xs = [adjoint(a) @ a] + [psd_power(_gram(a, n), 1.0 / n, tol) for n in range(2, nmax + 1)]
        ys = [a @ adjoint(a)] + [psd_power(_cogram(a, n), 1.0 / n, tol) for n in range(2, nmax + 1)]
        for j in range(nmax - 1):
            check_leq(report, ts, xs[j], xs[j + 1], f"{src}: step {j + 1}", floor, tol, idx)
            check_leq(report, ts, ys[j + 1], ys[j], f"{src}: dual step {j + 1}", floor, tol, idx)


@register("mia_chain", "inequality", {**CHAIN_DEFAULTS, "n_max": 3}, _check_nmax, "inequalities (i)-(v) for invertible class A")
def run_mia_chain(cfg, params, report):
    """Items (i)-(v).  Item (i) compares ``(A*|A^(n-1)|^(2/(n-1))A)^(1/2)``, the
    degree-2 form of the middle term, and item (iv) is the chain on the
    ``A*`` side, ``|A*|^2 >= |A*^2| >= ... >= |A*^n|^(2/n)``.
    """
    tol, nmax, floor = cfg.tol, params["n_max"], params["margin"]

    def hyp(a, idx):
        if idx is None:
            return class_a_k_residual(a, 1, tol)
        return _neg(psd_power(_gram(a, 2), 0.5, tol) - adjoint(a) @ a, idx)

    for ts, a, idx, src in chain_instances(cfg, params, report, hyp, 2 * nmax + 2, nmax + 1):
        grams = {n: _gram(a, n) for n in range(1, 2 * nmax + 1)}
        for n in range(2, nmax + 1):
            top = psd_power(grams[n], 1.0 / n, tol)
            mid = psd_power(adjoint(a) @ psd_power(grams[n - 1], 1.0 / (n - 1), tol) @ a, 0.5, tol)
            check_leq(report, ts, mid, top, f"{src}: (i) upper n={n}", floor, tol, idx)
            check_leq(report, ts, grams[1], mid, f"{src}: (i) lower n={n}", floor, tol, idx)
        for n in range(1, nmax + 1):
            check_leq(report, ts, grams[n], psd_power(grams[n + 1], n / (n + 1), tol), f"{src}: (ii) n={n}", floor, tol, idx)
            check_leq(report, ts, grams[n], psd_power(grams[2 * n], 0.5, tol), f"{src}: (iii) n={n}", floor, tol, idx)
        prev = a @ adjoint(a)
        for n in range(2, nmax + 1):
            cur = psd_power(_cogram(a, n), 1.0 / n, tol)
            check_leq(report, ts, cur, prev, f"{src}: (iv) n={n}", floor, tol, idx)
            prev = cur
        inv = np.linalg.inv(a)
        check_leq(report, ts, adjoint(inv) @ inv, psd_power(_gram(inv, 2), 0.5, tol), f"{src}: (v)", floor, tol, idx)


def _check_mia2(p):
    FurutaParams(p["m"], p["p"], p["delta"])
    if not p["k"] > 0:
        raise BadParams("k must be positive")
    if p["delta"] < -p["m"]:
        raise BadParams("delta must be >= -m")


@register(
    "mia2_mono",
    "inequality",
    {**CHAIN_DEFAULTS, "fixtures": 50, "shifts": 50, "search": 200, "m": 1, "p": 1, "k": 1.0, "delta": 0.0,
     "l_step": 0.5, "const_tol": 1e-8},
    _check_mia2,
    "f_{p,delta}(l) is nondecreasing for l >= max(k, delta/p)",
)
def run_mia2_mono(cfg, params, report):
    tol, floor = cfg.tol, params["margin"]
    m, p, k, delta = params["m"], params["p"], params["k"], params["delta"]
    fp = FurutaParams(m=m, p=p, delta=delta)
    l0 = max(k, delta / p)
    grid = [l0 + j * params["l_step"] for j in range(5)]

    def hyp(a, idx):
        am, ap = mpow(a, m), mpow(a, p)
        inner = adjoint(am) @ psd_power(adjoint(ap) @ ap, k, tol) @ am
        return _neg(psd_power(inner, m / (p * k + m), tol) - adjoint(am) @ am, idx)

    for ts, a, idx, src in chain_instances(cfg, params, report, hyp, m + p + 1, m + p):
        fs = [furuta_f(a, fp, l, tol) for l in grid]
        for j in range(4):
            check_leq(report, ts, fs[j], fs[j + 1], f"{src}: l={grid[j]:g} -> {grid[j + 1]:g}", floor, tol, idx)
        if src == "normal":
            d = max(rel_diff(f, fs[0]) for f in fs[1:])
            report.track_max("normal_constancy", d)
            if d > params["const_tol"]:
                report.add_violation(ts, {"diff": d}, "f_{p,delta} is not constant on a normal fixture")


def _check_twc(p):
    FurutaParams(alpha0=p["alpha0"], beta0=p["beta0"], delta=p["delta"])
    if p["beta0"] <= 0:
        raise BadParams("the fixture construction needs beta0 > 0")
    if p["delta"] < -p["beta0"]:
        raise BadParams("delta must be >= -beta0")


@register(
    "twc_mono",
    "inequality",
    {"trials": 100, "alpha0": 1.0, "beta0": 1.0, "delta": 0.5, "grid_step": 0.5, "margin": DEFAULT_MARGIN,
     "dim_max": 5},
    _check_twc,
    "g(lambda, mu) is nondecreasing in both arguments",
)
def run_twc_mono(cfg, params, report):
    """Fixtures ``A = B^(-1/2) (B + C)^((a0+b0)/b0) B^(-1/2)`` with ``B > 0`` and ``C >= 0``,
    for which the hypothesis reads ``B + C >= B``.
    """
    tol, floor = cfg.tol, params["margin"]
    a0, b0, delta = params["alpha0"], params["beta0"], params["delta"]
    fp = FurutaParams(alpha0=a0, beta0=b0, delta=delta)
    lam_lo = max(1.0, delta / a0) if a0 > 0 else 1.0
    lams = [lam_lo + j * params["grid_step"] for j in range(5)]
    mus = [1.0 + j * params["grid_step"] for j in range(5)]
    trials = Trials(cfg, "fixtures")
    for i in range(params["trials"]):
        ts, rng = trials(i)
        n = draw_dim(rng, params)
        b = G.random_pd(rng, n, floor=0.5) / 2.0
        c = rng.uniform(0.0, 1.0) * G.random_psd(rng, n, int(rng.integers(1, n + 1))) / n
        bmh = psd_power(b, -0.5, tol)
        a = bmh @ psd_power(b + c, (a0 + b0) / b0, tol) @ bmh
        a = 0.5 * (a + adjoint(a))
        bh = psd_power(b, 0.5, tol)
        hyp = _neg(psd_power(bh @ a @ bh, b0 / (a0 + b0), tol) - b)
        report.track_max("hypothesis", hyp)
        g = furuta_g_grid(a, b, fp, lams, mus, tol)
        for y in mus:
            for j in range(4):
                check_leq(report, ts, g[lams[j], y], g[lams[j + 1], y], f"lambda step at mu={y:g}", floor, tol)
        for x in lams:
            for j in range(4):
                check_leq(report, ts, g[x, mus[j]], g[x, mus[j + 1]], f"mu step at lambda={x:g}", floor, tol)
        report.trials_run += 1


def _check_mn(p):
    if not 1 <= p["n"] <= p["m"]:
        raise BadParams("needs 1 <= n <= m")


def _mn_hypothesis(m, n, tol):
    def hyp(a, idx):
        eq = max(moduli_residual(a, m), moduli_residual(a, n + m))
        if eq > tol.threshold(1.0):
            return eq
        return max(eq, _neg(mpow(adjoint(a) @ a, n) - _gram(a, n), idx))

    return hyp


@register(
    "mpj_chain",
    "inequality",
    {**CHAIN_DEFAULTS, "shifts": 0, "m": 2, "n": 1, "i_max": 2, "equal_tol": 1e-8},
    _check_mn,
    "|A^(p+m)|^(2m/(m+p)) >= (A*^m |A^p|^(2n/p) A^m)^(m/(m+n)) >= |A^m|^2 for p = n + i m",
)
def run_mpj_chain(cfg, params, report):
    tol, floor = cfg.tol, params["margin"]
    m, n = params["m"], params["n"]
    report.notes.append("no shift fixtures: a bilateral shift satisfying two moduli equations has constant weights")
    top_power = n + (params["i_max"] + 1) * m
    for ts, a, idx, src in chain_instances(cfg, params, report, _mn_hypothesis(m, n, tol), 0, top_power):
        am = mpow(a, m)
        low = adjoint(am) @ am
        for i in range(params["i_max"] + 1):
            p = n + i * m
            top = psd_power(_gram(a, p + m), m / (m + p), tol)
            mid = psd_power(adjoint(am) @ psd_power(_gram(a, p), n / p, tol) @ am, m / (m + n), tol)
            check_leq(report, ts, mid, top, f"{src}: upper p={p}", floor, tol, idx)
            check_leq(report, ts, low, mid, f"{src}: lower p={p}", floor, tol, idx)
            if src == "normal":
                d = max(rel_diff(top, mid), rel_diff(mid, low))
                report.track_max("normal_equality_gap", d)
                if d > params["equal_tol"]:
                    report.add_violation(ts, {"diff": d}, f"normal fixture without equality, p={p}")


@register(
    "cn_chain",
    "inequality",
    {**CHAIN_DEFAULTS, "shifts": 0, "m": 2, "n": 1, "r_max": 3},
    _check_mn,
    "|A^n|^(2/n) <= |A^(m+n)|^(2/(m+n)) <= ... <= |A^(rm+n)|^(2/(rm+n))",
)
def run_cn_chain(cfg, params, report):
    tol, floor = cfg.tol, params["margin"]
    m, n = params["m"], params["n"]
    top_power = params["r_max"] * m + n
    for ts, a, idx, src in chain_instances(cfg, params, report, _mn_hypothesis(m, n, tol), 0, top_power):
        prev = psd_power(_gram(a, n), 1.0 / n, tol)
        for r in range(1, params["r_max"] + 1):
            e = r * m + n
            cur = psd_power(_gram(a, e), 1.0 / e, tol)
            check_leq(report, ts, prev, cur, f"{src}: r={r}", floor, tol, idx)
            prev = cur
