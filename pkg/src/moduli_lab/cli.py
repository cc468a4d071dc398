"""Command-line interface.

Exit codes: 0 success (every check holds), 1 a check failed or a suite found
violations, 2 usage or input error.  Human-readable output goes to standard
output; ``--report PATH`` writes the full-precision JSON record.
"""

from __future__ import annotations

import argparse
import json
import sys

from .classes import ExponentSet, classify, moduli_residual, satisfies_system
from .errors import OperatorLabError
from .matcore import DEFAULT_TOL, Tolerance, load_matrix
from .report import suite_seed
from .shifts import (
    branching_template,
    extend_leaves,
    interior_vertices,
    load_tree,
    matrix_vertex_residuals,
    qqq_profile,
    retained_vertices,
    search_qqq_weights,
    tree_moduli_residual,
    tree_to_json,
    truncate_to_matrix,
)
from .verify import REGISTRY, SuiteConfig, run_suite, suite_ids

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _sci(x) -> str:
    return "n/a" if x is None else f"{x:.2e}"


def _write_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(args, obj) -> None:
    if getattr(args, "json", False):
        print(json.dumps(obj, indent=2, sort_keys=True))
    if getattr(args, "report", None):
        _write_json(args.report, obj)


def _tol(args, config: dict | None = None) -> Tolerance:
    """Flag over config file over default."""
    conf = (config or {}).get("tol", {})
    a = args.abs_tol if args.abs_tol is not None else conf.get("abs", DEFAULT_TOL.abs)
    r = args.rel_tol if args.rel_tol is not None else conf.get("rel", DEFAULT_TOL.rel)
    try:
        return Tolerance(float(a), float(r))
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad tolerance: {exc}") from None


def _parse_set(text: str) -> ExponentSet:
    try:
        return ExponentSet(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise UsageError(f"--set must be a comma list of positive integers: {exc}") from None


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep or not key:
            raise UsageError(f"--param expects key=value, got {item!r}")
        out[key.strip()] = val.strip()
    return out


# ---------------------------------------------------------------------------


def cmd_classify(args) -> int:
    a = load_matrix(args.matrix)
    tol = _tol(args)
    rep = classify(a, p=args.p, k=args.k, tol=tol)
    for name, r in rep.items():
        verdict = "n/a" if not r["applicable"] else ("holds" if r["holds"] else "fails")
        print(f"{name:16s} {verdict:6s} residual {_sci(r['residual'])}")
    applicable = [r for r in rep.values() if r["applicable"]]
    if all(r["holds"] for r in applicable):
        print("all classes hold")
    _emit(args, {"classes": rep, "params": {"p": args.p, "k": args.k}, "tol": tol.to_dict()})
    return EXIT_OK


def cmd_equations(args) -> int:
    a = load_matrix(args.matrix)
    exps = _parse_set(args.set)
    tol = _tol(args)
    res = satisfies_system(a, exps, tol)
    residuals = [(s, moduli_residual(a, s)) for s in exps]
    for s, r in residuals:
        print(f"s = {s:<3d} residual {_sci(r)}")
    s_worst, r_worst = res.worst
    if res.holds:
        print(f"system {exps} holds")
    else:
        print(f"system {exps} fails at s = {s_worst} (residual {_sci(r_worst)})")
    _emit(
        args,
        {
            "set": list(exps),
            "residuals": {str(s): r for s, r in residuals},
            "worst": {"s": s_worst, "residual": r_worst},
            "holds": res.holds,
            "tol": tol.to_dict(),
        },
    )
    return EXIT_OK if res.holds else EXIT_FAIL


def cmd_shift(args) -> int:
    tol = _tol(args)
    if args.tree:
        if args.depth is None or args.check is None:
            raise UsageError("--tree needs --depth and --check")
        if args.depth < 1 or args.check < 1:
            raise UsageError("--depth and --check must be positive")
        return _shift_check(args, tol)
    if args.search_qqq is not None:
        return _shift_search(args)
    raise UsageError("shift needs --tree or --search-qqq")


def _shift_check(args, tol) -> int:
    tree, w = load_tree(args.tree)
    s, depth = args.check, args.depth
    m = truncate_to_matrix(tree, w, depth)
    index = {v: j for j, v in enumerate(retained_vertices(tree, depth))}
    inner = interior_vertices(tree, depth, s)
    mat = matrix_vertex_residuals(m, s, [index[v] for v in inner])
    cut = tol.threshold(1.0)
    rows = {}
    for v, rm in zip(inner, mat):
        rt = tree_moduli_residual(tree, w, s, v)
        rows[v] = {"lhs": rt.lhs, "rhs": rt.rhs, "residual": rt.residual, "matrix_residual": rm.residual}
        print(f"{v:12s} residual {_sci(rt.residual)}  matrix {_sci(rm.residual)}")
    failing = [v for v, r in rows.items() if r["residual"] > cut]
    holds = not failing
    verdict = "holds on all" if holds else f"fails on {len(failing)} of"
    print(f"s = {s}: {verdict} {len(inner)} interior vertices, {len(index)} retained (truncation depth {depth})")
    _emit(args, {"s": s, "depth": depth, "vertices": rows, "holds": holds, "tol": tol.to_dict()})
    return EXIT_OK if holds else EXIT_FAIL


def _shift_search(args) -> int:
    n, max_k = args.search_qqq, args.max_k
    if n < 2 or max_k < n:
        raise UsageError("--search-qqq needs n >= 2 and --max-k >= n")
    template = branching_template(args.branches, args.length)
    w = search_qqq_weights(n, template, max_k, args.eq_tol, args.seed, args.restarts, args.min_gap)
    if w is None:
        print(f"no weights found for n = {n} after {args.restarts} restarts")
        _emit(args, {"n": n, "max_k": max_k, "seed": args.seed, "found": False})
        return EXIT_FAIL
    ext, wx = extend_leaves(template, w, max_k)
    prof = qqq_profile(ext, wx, max_k, template.vertices)
    for v in template.vertices:
        if v in w:
            print(f"{v:8s} weight {w[v]:.6g}")
    for s, r in prof.items():
        print(f"s = {s}: max interior residual {_sci(r)}")
    print("interior pattern on a finite truncation; leaves continue with constant weights")
    _emit(
        args,
        {
            "n": n,
            "max_k": max_k,
            "seed": args.seed,
            "found": True,
            "tree": tree_to_json(template, w),
            "profile": {str(s): r for s, r in prof.items()},
        },
    )
    return EXIT_OK


def _summary_line(rep) -> str:
    keys = sorted(rep.max_residuals)
    res = "  ".join(f"{k}={_sci(rep.max_residuals[k])}" for k in keys)
    status = "PASS" if rep.passed else "FAIL"
    return f"{rep.suite_id:12s} {status}  trials={rep.trials_run}  violations={len(rep.violations)}  {res}"


def cmd_verify(args) -> int:
    if args.suite_id not in REGISTRY:
        raise UsageError(f"unknown suite {args.suite_id!r}; known: {', '.join(suite_ids())}")
    tol = _tol(args)
    rep = run_suite(SuiteConfig(args.suite_id, _parse_params(args.param), args.seed, tol))
    print(_summary_line(rep))
    for v in rep.violations[: args.show]:
        print(f"  trial_seed={v['trial_seed']}  {v['desc']}")
    _emit(args, rep.to_json())
    return EXIT_OK if rep.passed else EXIT_FAIL


def _load_config(path) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        conf = json.load(fh)
    if not isinstance(conf, dict):
        raise UsageError("config file must hold a JSON object")
    unknown = set(conf) - {"seed", "tol", "suites", "params"}
    if unknown:
        raise UsageError(f"unknown config keys {sorted(unknown)}")
    return conf


def cmd_suite(args) -> int:
    conf = _load_config(args.config)
    tol = _tol(args, conf)
    seed = args.seed if args.seed is not None else int(conf.get("seed", 0))
    if args.all:
        ids = suite_ids()
    elif args.id:
        ids = args.id
    else:
        ids = list(conf.get("suites", []))
    if not ids:
        raise UsageError("suite needs --all, --id or a 'suites' list in --config")
    unknown = [sid for sid in ids if sid not in REGISTRY]
    if unknown:
        raise UsageError(f"unknown suite(s) {unknown}; known: {', '.join(suite_ids())}")
    overrides = conf.get("params", {})
    reports = []
    for sid in ids:
        rep = run_suite(SuiteConfig(sid, overrides.get(sid, {}), suite_seed(seed, sid), tol))
        print(_summary_line(rep), flush=True)
        reports.append(rep)
    ok = all(r.passed for r in reports)
    print(f"{sum(r.passed for r in reports)}/{len(reports)} suites passed")
    _emit(args, {"seed": seed, "tol": tol.to_dict(), "pass": ok, "reports": [r.to_json() for r in reports]})
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--abs-tol", type=float, default=None, help=f"absolute tolerance (default {DEFAULT_TOL.abs})")
    common.add_argument("--rel-tol", type=float, default=None, help=f"relative tolerance (default {DEFAULT_TOL.rel})")
    common.add_argument("--report", metavar="PATH", help="write the JSON record to PATH")
    common.add_argument("--json", action="store_true", help="also print the JSON record")

    parser = argparse.ArgumentParser(prog="moduli-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="residuals for each operator class")
    p.add_argument("matrix", help="matrix JSON file")
    p.add_argument("--p", type=float, default=1.0, help="exponent of p-hyponormality (default 1)")
    p.add_argument("--k", type=int, default=1, help="index of class A(k) (default 1)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("equations", parents=[common], help="check the moduli equations for an exponent set")
    p.add_argument("matrix", help="matrix JSON file")
    p.add_argument("--set", required=True, help="exponents as a comma list, e.g. 2,3")
    p.set_defaults(func=cmd_equations)

    p = sub.add_parser("shift", parents=[common], help="weighted shifts on directed trees")
    p.add_argument("--tree", help="tree JSON file")
    p.add_argument("--depth", type=int, help="truncation depth")
    p.add_argument("--check", type=int, metavar="S", help="exponent to check on interior vertices")
    p.add_argument("--search-qqq", type=int, metavar="N", help="search weights meeting only the N-th equation")
    p.add_argument("--max-k", type=int, default=5, help="largest exponent in the pattern (default 5)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=200)
    p.add_argument("--eq-tol", type=float, default=1e-10, help="residual bound at N (default 1e-10)")
    p.add_argument("--min-gap", type=float, default=None, help="residual floor elsewhere (default 10*eq-tol)")
    p.add_argument("--branches", type=int, default=2)
    p.add_argument("--length", type=int, default=4)
    p.set_defaults(func=cmd_shift)

    p = sub.add_parser("verify", parents=[common], help="run one verification suite")
    p.add_argument("suite_id")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="override a suite parameter")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--show", type=int, default=5, help="violations to list (default 5)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("suite", parents=[common], help="run several suites with derived seeds")
    p.add_argument("--all", action="store_true", help="every registered suite")
    p.add_argument("--id", action="append", help="suite id (repeatable)")
    p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    p.add_argument("--config", help="JSON file with seed, tol, suites and params")
    p.set_defaults(func=cmd_suite)

    sub.add_parser("list", help="list registered suites").set_defaults(func=cmd_list)
    return parser


def cmd_list(args) -> int:
    for sid in suite_ids():
        s = REGISTRY[sid]
        print(f"{sid:12s} {s.family:11s} {s.summary}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, OperatorLabError, OSError, ValueError) as exc:
        print(f"moduli-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
