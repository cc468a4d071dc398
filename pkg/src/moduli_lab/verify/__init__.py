"""Seeded randomized verification suites."""

from . import forcing, inequalities, structural  # noqa: F401  (registers the suites)
from .common import REGISTRY, SuiteConfig, resolve_params, run_suite
from .generators import KINDS, gen
from .runner import all_passed, run_all, run_forcing_suite, run_inequality_suite, run_structural_suite, suite_ids

__all__ = [
    "KINDS",
    "REGISTRY",
    "SuiteConfig",
    "all_passed",
    "gen",
    "resolve_params",
    "run_all",
    "run_forcing_suite",
    "run_inequality_suite",
    "run_structural_suite",
    "run_suite",
    "suite_ids",
]
