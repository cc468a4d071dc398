"""Suite configuration, registry and small helpers shared by all suites."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import BadParams, OperatorLabError
from ..matcore import DEFAULT_TOL, Tolerance, loewner_margin, opnorm
from ..report import VerifyReport, trial_seed

# implication checks accept a conclusion residual up to GAP times the
# hypothesis tolerance
DEFAULT_GAP = 1e3
DEFAULT_MARGIN = -1e-8

COMMON_DEFAULTS = {"dim_min": 2, "dim_max": 6, "gap": DEFAULT_GAP}


@dataclass(frozen=True)
class SuiteConfig:
    suite_id: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    tol: Tolerance = DEFAULT_TOL


@dataclass(frozen=True)
class Suite:
    suite_id: str
    family: str  # "forcing", "inequality" or "structural"
    run: Callable[["SuiteConfig", dict, VerifyReport], None]
    defaults: dict
    check: Callable[[dict], None] | None = None
    summary: str = ""


REGISTRY: dict[str, Suite] = {}


def register(suite_id: str, family: str, defaults: dict, check=None, summary: str = ""):
    def deco(fn):
        REGISTRY[suite_id] = Suite(suite_id, family, fn, {**COMMON_DEFAULTS, **defaults}, check, summary)
        return fn

    return deco


def resolve_params(suite: Suite, params: dict | None) -> dict:
    """Defaults overlaid with ``params``; unknown keys and bad values raise :class:`BadParams`."""
    params = dict(params or {})
    unknown = set(params) - set(suite.defaults)
    if unknown:
        raise BadParams(f"suite {suite.suite_id!r} has no parameter(s) {sorted(unknown)}")
    out = dict(suite.defaults)
    for key, val in params.items():
        ref = suite.defaults[key]
        try:
            if isinstance(ref, bool):
                val = bool(val)
            elif isinstance(ref, int):
                if float(val) != int(float(val)):
                    raise ValueError
                val = int(float(val))
            elif isinstance(ref, float):
                val = float(val)
            elif isinstance(ref, list):
                val = [type(ref[0])(v) for v in (val.split(",") if isinstance(val, str) else val)]
        except (TypeError, ValueError):
            raise BadParams(f"parameter {key}={val!r} has the wrong type") from None
        out[key] = val
    for key in ("trials", "search", "fixtures"):
        if key in out and out[key] < (0 if key != "trials" else 1):
            raise BadParams(f"{key} must be {'>= 1' if key == 'trials' else '>= 0'}")
    if out["dim_min"] < 2 or out["dim_max"] < out["dim_min"]:
        raise BadParams("dims must satisfy 2 <= dim_min <= dim_max")
    if out["gap"] < 1:
        raise BadParams("gap must be >= 1")
    if suite.check is not None:
        suite.check(out)
    return out


def run_suite(cfg: SuiteConfig) -> VerifyReport:
    """Run one registered suite and return its report."""
    if cfg.suite_id not in REGISTRY:
        raise BadParams(f"unknown suite {cfg.suite_id!r}")
    suite = REGISTRY[cfg.suite_id]
    params = resolve_params(suite, cfg.params)
    report = VerifyReport(cfg.suite_id, params, cfg.seed, cfg.tol)
    t0 = time.perf_counter()
    try:
        suite.run(cfg, params, report)
    except OperatorLabError as exc:
        # a numerical precondition broke mid-run (e.g. under an impossible tolerance)
        report.add_violation(cfg.seed, {}, f"aborted: {type(exc).__name__}: {exc}")
    report.elapsed = time.perf_counter() - t0
    return report


class Trials:
    """Per-trial seeds and generators for one suite stream."""

    def __init__(self, cfg: SuiteConfig, stream: str):
        self.master = cfg.seed
        self.key = f"{cfg.suite_id}/{stream}"

    def __call__(self, index: int) -> tuple[int, np.random.Generator]:
        ts = trial_seed(self.master, self.key, index)
        return ts, np.random.default_rng(ts)


def draw_dim(rng: np.random.Generator, params: dict) -> int:
    return int(rng.integers(params["dim_min"], params["dim_max"] + 1))


def compress(x: np.ndarray, idx) -> np.ndarray:
    if idx is None:
        return x
    idx = np.asarray(idx)
    return x[np.ix_(idx, idx)]


def check_leq(report: VerifyReport, ts: int, x, y, label: str, floor: float, tol: Tolerance, idx=None) -> float:
    """Record the scale-free margin of ``X <= Y`` (optionally on a principal compression)."""
    m = loewner_margin(compress(x, idx), compress(y, idx), tol)
    report.track_min("min_margin", m)
    if m < floor:
        report.add_violation(ts, {"margin": m}, f"{label}: margin {m:.3e} below {floor:.1e}")
    return m


def rel_diff(x, y) -> float:
    scale = max(opnorm(x), opnorm(y))
    return opnorm(x - y) / scale if scale > 0 else 0.0
