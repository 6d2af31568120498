"""Check reports, violation witnesses and canonical JSON output."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .extreal import ExtNonNegReal, ext, to_json

__all__ = ["Witness", "CheckReport", "judge", "jsonable", "dumps"]


def jsonable(obj: Any) -> Any:
    """Convert points, extended reals and numpy scalars into plain JSON values."""
    if isinstance(obj, ExtNonNegReal):
        return to_json(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return "nan"
        return v
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return obj


def dumps(obj: Any, **kw) -> str:
    """Canonical JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(jsonable(obj), sort_keys=True, allow_nan=False, **kw)


def judge(lhs, rhs, relation: str, rel_tol: float = 0.0, abs_tol: float = 0.0) -> tuple[bool, float]:
    """Decide ``lhs <relation> rhs`` and return ``(ok, slack)``.

    ``slack`` is the amount by which the relation is missed (positive or
    zero for a violation of a strict relation).  Finite comparisons allow
    ``abs_tol + rel_tol * max(lhs, rhs)``; anything involving infinity is
    compared exactly.
    """
    if relation == "geq":
        return judge(rhs, lhs, "leq", rel_tol, abs_tol)
    if relation == "eq":
        ok1, s1 = judge(lhs, rhs, "leq", rel_tol, abs_tol)
        ok2, s2 = judge(rhs, lhs, "leq", rel_tol, abs_tol)
        return ok1 and ok2, max(s1, s2)
    a, b = ext(lhs), ext(rhs)
    if relation == "gt":
        if a.is_inf:
            return (not b.is_inf), (0.0 if b.is_inf else -math.inf)
        if b.is_inf:
            return False, math.inf
        return a.value > b.value, b.value - a.value
    if relation != "leq":
        raise ValueError(f"unknown relation {relation!r}")
    if a.is_inf:
        return b.is_inf, (0.0 if b.is_inf else math.inf)
    if b.is_inf:
        return True, -math.inf
    diff = a.value - b.value
    return diff <= abs_tol + rel_tol * max(a.value, b.value), diff


@dataclass
class Witness:
    inputs: dict
    lhs: Any
    rhs: Any
    slack: float
    relation: str = "leq"

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "relation": self.relation,
        }


@dataclass
class CheckReport:
    property_name: str
    samples_tested: int = 0
    violations: list[Witness] = field(default_factory=list)
    max_slack: float | None = None
    skipped: dict[str, int] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def record(self, ok: bool, slack: float, witness: Witness | None = None) -> None:
        """Fold one judged comparison into the report."""
        if slack != -math.inf and (self.max_slack is None or slack > self.max_slack):
            self.max_slack = slack
        if not ok and witness is not None:
            self.violations.append(witness)

    def skip(self, tag: str) -> None:
        self.skipped[tag] = self.skipped.get(tag, 0) + 1

    def to_dict(self) -> dict:
        d = {
            "property": self.property_name,
            "samples": self.samples_tested,
            "status": self.status,
            "max_slack": self.max_slack,
            "violations": [v.to_dict() for v in self.violations],
        }
        if self.skipped:
            d["skipped"] = dict(self.skipped)
        if self.details:
            d["details"] = self.details
        return d

    def to_json(self, **kw) -> str:
        return dumps(self.to_dict(), **kw)

    def summary(self) -> str:
        line = f"{self.property_name}: {self.status} ({self.samples_tested} samples, {len(self.violations)} violations)"
        if self.skipped:
            line += " skipped " + ", ".join(f"{k}={v}" for k, v in sorted(self.skipped.items()))
        return line
