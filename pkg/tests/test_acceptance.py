"""The thirteen acceptance criteria, each at its stated tolerance and time budget.

Every test prints one ``PASS``/``FAIL`` line (also collected in the terminal
summary) and then asserts the verdict.
"""

import subprocess
import sys
import time

import numpy as np

from conftest import ACCEPTANCE_LINES
from moduli_lab.matcore import adjoint, herm_eig, mpow, opnorm, psd_power
from moduli_lab.report import suite_seed
from moduli_lab.verify import SuiteConfig, run_suite, suite_ids

FORCING = ("ucc", "gll", "jjj", "pomoc", "md", "inv", "hyp", "nowechar")


def verdict(num: int, title: str, ok: bool, elapsed: float, budget: float, detail: str = "") -> None:
    within = elapsed <= budget
    line = f"[{'PASS' if ok and within else 'FAIL'}] criterion {num:2d} {title}: {elapsed:6.2f} s / {budget:g} s"
    if detail:
        line += f"  ({detail})"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line
    assert within, line


def suite(sid, **params):
    return run_suite(SuiteConfig(sid, params, suite_seed(0, sid)))


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_01_eigensolver_floor():
    def body():
        rng = np.random.default_rng(20240101)
        worst_rec = worst_root = 0.0
        for i in range(100):
            n = 1 + i % 32
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            h = g + adjoint(g)
            e = herm_eig(h)
            rec = opnorm((e.eigenvectors * e.eigenvalues) @ adjoint(e.eigenvectors) - h) / opnorm(h)
            worst_rec = max(worst_rec, rec)
            p = adjoint(g) @ g
            for k in (2, 3, 5):
                worst_root = max(worst_root, opnorm(mpow(psd_power(p, 1.0 / k), k) - p) / opnorm(p))
        return worst_rec, worst_root

    (rec, root), dt = timed(body)
    verdict(1, "eigensolver floor", rec <= 1e-10 and root <= 1e-8, dt, 10,
            f"reconstruction {rec:.2e}, roots {root:.2e}")


def test_02_loewner_heinz():
    def body():
        return suite("lohe", p=[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9], trials=200, dim_max=8), suite(
            "lohe", p=[2.0], trials=200, dim_max=8)

    (good, square), dt = timed(body)
    ok = good.passed and good.trials_run == 200 and len(square.violations) >= 1
    verdict(2, "Loewner-Heinz", ok, dt, 10,
            f"min margin {good.max_residuals['min_margin']:.2e}, p=2 violations {len(square.violations)}")


def test_03_hansen():
    rep, dt = timed(lambda: suite("hansen"))
    m = rep.max_residuals
    ok = (rep.passed and rep.trials_run == 200 and rep.counts["commuting"] > 0
          and m["equality_gap:commuting"] <= 1e-8)
    verdict(3, "Hansen", ok, dt, 10,
            f"commuting gap {m['equality_gap:commuting']:.2e} on {rep.counts['commuting']} fixtures")


def test_04_davis_choi_jensen():
    rep, dt = timed(lambda: suite("dcj"))
    ok = rep.passed and rep.trials_run == 200 and rep.max_residuals["multiplicativity:commuting"] <= 1e-6
    verdict(4, "Davis-Choi-Jensen", ok, dt, 15,
            f"min margin {rep.max_residuals['min_margin']:.2e}, "
            f"probe {rep.max_residuals['multiplicativity:commuting']:.2e}")


def test_05_forcing_suites():
    reps, dt = timed(lambda: [suite(sid) for sid in FORCING])
    ok = all(r.passed and r.params["trials"] == 200 and r.params["search"] == 1000 and r.params["dim_max"] <= 6
             for r in reps)
    ok = ok and all(any(k.startswith("forward_accepted") for k in r.counts) for r in reps)
    failed = [r.suite_id for r in reps if not r.passed]
    verdict(5, "forcing suites", ok, dt, 60, f"{len(reps) - len(failed)}/{len(reps)} clean")


def test_06_intertwiner_lemma():
    rep, dt = timed(lambda: suite("fug"))
    ok = rep.passed and rep.params["trials"] == 200 and rep.max_residuals["conclusion"] <= 1e-7
    verdict(6, "intertwiner property", ok, dt, 5, f"conclusion {rep.max_residuals['conclusion']:.2e}")


def test_07_tree_matrix_oracle():
    rep, dt = timed(lambda: suite("tree_oracle"))
    ok = rep.passed and rep.trials_run == 50 and rep.max_residuals["mismatch"] <= 1e-10
    verdict(7, "shift-matrix oracle", ok, dt, 10,
            f"mismatch {rep.max_residuals['mismatch']:.2e} over {rep.counts['vertex_checks']} vertices")


def test_08_qqq_pattern():
    rep, dt = timed(lambda: suite("qqq"))
    m = rep.max_residuals
    ok = rep.passed
    for n in (2, 3):
        others = [m[f"n{n}:s{s}"] for s in range(2, 6) if s != n]
        ok = ok and m[f"n{n}:s{n}"] <= 1e-10 and max(others) >= 1e-3
    verdict(8, "qqq pattern", ok, dt, 30, f"n=2 eq {m['n2:s2']:.2e}, n=3 eq {m['n3:s3']:.2e}")


def test_09_bilateral_constancy():
    rep, dt = timed(lambda: suite("bilateral"))
    ok = rep.passed and all(rep.counts[f"dimension:{p}"] == 1 for p in ("2,3", "3,4", "2,5"))
    ok = ok and rep.max_residuals["basis_distance"] <= 1e-9
    verdict(9, "bilateral constancy", ok, dt, 5, f"basis distance {rep.max_residuals['basis_distance']:.2e}")


def test_10_furuta_monotonicity():
    (mia2, twc), dt = timed(lambda: (suite("mia2_mono"), suite("twc_mono")))
    ok = mia2.passed and twc.passed and mia2.max_residuals["normal_constancy"] <= 1e-8
    ok = ok and mia2.params["fixtures"] + mia2.params["shifts"] >= 100 and twc.trials_run >= 100
    verdict(10, "Furuta monotonicity", ok, dt, 20,
            f"margins {mia2.max_residuals['min_margin']:.2e} / {twc.max_residuals['min_margin']:.2e}")


def test_11_chain_suites():
    reps, dt = timed(lambda: [suite(sid) for sid in ("mia_chain", "mpj_chain", "cn_chain")])
    ok = all(r.passed and r.max_residuals["min_margin"] >= -1e-8 and r.counts.get("normal", 0) > 0 for r in reps)
    worst = min(r.max_residuals["min_margin"] for r in reps)
    verdict(11, "chain suites", ok, dt, 30, f"worst margin {worst:.2e}")


def test_12_aluthge_transform():
    rep, dt = timed(lambda: suite("pop"))
    m = rep.max_residuals
    ok = rep.passed and rep.params["trials"] == 500 and m["normal_fixed_point"] <= 1e-7
    ok = ok and rep.counts["search_accepted:k1"] > 0 and rep.counts["search_accepted:k2"] > 0
    verdict(12, "Aluthge-type transform", ok, dt, 20, f"fixed point {m['normal_fixed_point']:.2e}")


def test_13_determinism(tmp_path):
    runs = 2
    outputs, times = [], []
    for i in range(runs):
        path = tmp_path / f"r{i}.json"
        t0 = time.perf_counter()
        res = subprocess.run([sys.executable, "-m", "moduli_lab", "suite", "--all", "--seed", "0", "--report",
                              str(path)], capture_output=True)
        times.append(time.perf_counter() - t0)
        outputs.append((res.returncode, res.stdout, path.read_bytes()))
    same = all(o == outputs[0] for o in outputs[1:])
    ok = same and outputs[0][0] == 0 and outputs[0][1].count(b"PASS") == len(suite_ids())
    verdict(13, "determinism", ok, max(times), 120, f"{runs} runs, identical={same}, exit={outputs[0][0]}")
