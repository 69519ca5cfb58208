"""Inequality reports and the versioned verification report."""

from __future__ import annotations

import json
import math
import platform
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np
import scipy

SCHEMA_VERSION = "1.0"


@dataclass
class Check:
    """One inequality ``lhs <= rhs * (1 + slack)``.

    ``extra`` carries diagnostic values (ratios, exponents) that do not take
    part in the pass/fail decision.
    """

    name: str
    lhs: float
    rhs: float
    slack: float
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return bool(self.lhs <= self.rhs * (1.0 + self.slack))

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else math.inf
        return self.lhs / self.rhs

    def as_dict(self) -> dict:
        out = {"name": self.name, "lhs": self.lhs, "rhs": self.rhs,
               "slack": self.slack, "pass": self.holds}
        if self.extra:
            out["extra"] = _plain(self.extra)
        return out


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def environment() -> dict:
    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "machine": platform.machine(),
    }


@dataclass
class SuiteResult:
    name: str
    checks: list[Check] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.holds for c in self.checks)


@dataclass
class VerificationReport:
    suites: list[SuiteResult] = field(default_factory=list)
    constants: dict[str, float] = field(default_factory=dict)
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def failing(self) -> list[str]:
        out = []
        for s in self.suites:
            if s.error is not None:
                out.append(f"{s.name}: {s.error}")
            out.extend(f"{s.name}/{c.name}" for c in s.checks if not c.holds)
        return out

    def as_dict(self) -> dict:
        suites = sorted(self.suites, key=lambda s: s.name)
        return {
            "schema": SCHEMA_VERSION,
            "pass": self.passed,
            "config": _plain(self.config),
            "constants": _plain(self.constants),
            "environment": environment(),
            "suites": [
                {"name": s.name, "pass": s.passed, "error": s.error,
                 "skipped": _plain(s.skipped),
                 "checks": [c.as_dict() for c in s.checks]}
                for s in suites
            ],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.as_dict(), indent=2, **kw)


def report_dict(obj) -> dict:
    """Dataclass report -> JSON-ready dict."""
    return _plain(asdict(obj))
