"""Entry points over the suite registry."""

from __future__ import annotations

from ..errors import BadParams
from ..matcore import DEFAULT_TOL, Tolerance
from ..report import VerifyReport, suite_seed
from .common import REGISTRY, SuiteConfig, run_suite


def _run_family(cfg: SuiteConfig, family: str) -> VerifyReport:
    suite = REGISTRY.get(cfg.suite_id)
    if suite is None or suite.family != family:
        raise BadParams(f"{cfg.suite_id!r} is not a {family} suite; expected one of {suite_ids(family)}")
    return run_suite(cfg)


def run_forcing_suite(cfg: SuiteConfig) -> VerifyReport:
    return _run_family(cfg, "forcing")


def run_inequality_suite(cfg: SuiteConfig) -> VerifyReport:
    return _run_family(cfg, "inequality")


def run_structural_suite(cfg: SuiteConfig) -> VerifyReport:
    return _run_family(cfg, "structural")


def suite_ids(family: str | None = None) -> list[str]:
    """Registered suite ids in registration order, optionally one family only."""
    return [sid for sid, s in REGISTRY.items() if family is None or s.family == family]


def run_all(master_seed: int = 0, tol: Tolerance = DEFAULT_TOL, params: dict | None = None) -> list[VerifyReport]:
    """Every suite with default parameters and a seed derived from ``master_seed``.

    ``params`` optionally maps suite ids to parameter overrides.
    """
    params = params or {}
    return [
        run_suite(SuiteConfig(sid, params.get(sid, {}), suite_seed(master_seed, sid), tol)) for sid in suite_ids()
    ]


def all_passed(reports) -> bool:
    return all(r.passed for r in reports)
