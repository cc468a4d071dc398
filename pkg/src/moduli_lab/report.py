"""Verification report record and deterministic seed derivation."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Any

from .matcore import DEFAULT_TOL, Tolerance


def trial_seed(master_seed: int, suite_id: str, index: int) -> int:
    """Unsigned 64-bit seed for one trial, derived from ``(master_seed, suite_id, index)``."""
    digest = hashlib.blake2b(f"{master_seed}:{suite_id}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def suite_seed(master_seed: int, suite_id: str) -> int:
    return trial_seed(master_seed, suite_id, -1)


def _clean(x: Any) -> Any:
    """Make a value JSON-safe: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


@dataclass
class VerifyReport:
    suite_id: str
    params: dict
    seed: int
    tol: Tolerance = DEFAULT_TOL
    trials_run: int = 0
    violations: list = field(default_factory=list)
    max_residuals: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_hypothesis_residual(self) -> float:
        return self.max_residuals.get("hypothesis", 0.0)

    @property
    def max_conclusion_residual(self) -> float:
        return self.max_residuals.get("conclusion", 0.0)

    def add_violation(self, trial_seed: int, residuals: dict, desc: str) -> None:
        self.violations.append({"trial_seed": int(trial_seed), "residuals": dict(residuals), "desc": desc})

    def track_max(self, name: str, value: float) -> None:
        value = float(value)
        if name not in self.max_residuals or value > self.max_residuals[name]:
            self.max_residuals[name] = value

    def track_min(self, name: str, value: float) -> None:
        value = float(value)
        if name not in self.max_residuals or value < self.max_residuals[name]:
            self.max_residuals[name] = value

    def count(self, name: str, by: int = 1) -> None:
        self.counts[name] = self.counts.get(name, 0) + by

    def to_json(self) -> dict:
        # elapsed is deliberately left out so reports are byte-reproducible
        return _clean(
            {
                "suite": self.suite_id,
                "params": self.params,
                "seed": int(self.seed),
                "tol": self.tol.to_dict(),
                "trials": self.trials_run,
                "violations": self.violations,
                "max_residuals": self.max_residuals,
                "counts": self.counts,
                "notes": self.notes,
                "pass": self.passed,
            }
        )

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict) -> "VerifyReport":
        rep = cls(
            obj["suite"],
            dict(obj.get("params", {})),
            int(obj["seed"]),
            Tolerance(**obj["tol"]) if "tol" in obj else DEFAULT_TOL,
            int(obj.get("trials", 0)),
            list(obj.get("violations", [])),
            dict(obj.get("max_residuals", {})),
            dict(obj.get("counts", {})),
            list(obj.get("notes", [])),
        )
        return rep
