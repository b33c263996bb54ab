"""Verification reports shared by the checkers."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


def _clean(v):
    if isinstance(v, float):
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, complex):
        return [_clean(v.real), _clean(v.imag)]
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "item"):  # numpy scalar
        return _clean(v.item())
    return v


@dataclass
class Report:
    theorem: str
    function: str
    params: dict = field(default_factory=dict)
    samples: list = field(default_factory=list)
    verdict: str = INCONCLUSIVE
    notes: list = field(default_factory=list)

    def add(self, r, lhs, rhs, slack=0.0, **extra):
        """Record one comparison lhs <= rhs; returns the margin rhs - lhs."""
        margin = rhs - lhs
        row = {"r": r, "lhs": lhs, "rhs": rhs, "margin": margin}
        if slack:
            row["slack"] = slack
        row.update(extra)
        self.samples.append(row)
        return margin

    def all_pass(self) -> bool:
        return all(s["margin"] >= -s.get("slack", 0.0) for s in self.samples if "lhs" in s)

    def finish(self, verdict: str | None = None) -> "Report":
        if verdict is None:
            if not self.samples:
                verdict = INCONCLUSIVE
            else:
                verdict = PASS if self.all_pass() else FAIL
        self.verdict = verdict
        return self

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self) -> dict:
        d = {"theorem": self.theorem, "function": self.function, "params": self.params,
             "samples": self.samples, "verdict": self.verdict}
        if self.notes:
            d["notes"] = self.notes
        return _clean(d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)
