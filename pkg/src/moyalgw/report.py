"""Structured check reports emitted by the CLI suites."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

__all__ = ["Check", "Report"]


@dataclass
class Check:
    """One verification line: a computed defect against its tolerance.

    ``anchor`` is a stable identity tag naming the relation being checked,
    carried verbatim into the report for traceability.
    """

    check_id: str
    anchor: str
    computed: float
    tolerance: float
    passed: bool
    skipped: bool = False
    note: str = ""

    @classmethod
    def defect(cls, check_id: str, anchor: str, value: float, tol: float, note: str = ""):
        return cls(check_id, anchor, float(value), float(tol), bool(abs(value) <= tol), note=note)

    @classmethod
    def condition(cls, check_id: str, anchor: str, value: float, ok: bool, note: str = ""):
        return cls(check_id, anchor, float(value), float("nan"), bool(ok), note=note)

    @classmethod
    def skip(cls, check_id: str, anchor: str, note: str):
        return cls(check_id, anchor, float("nan"), float("nan"), True, skipped=True, note=note)


@dataclass
class Report:
    suite: str
    checks: list
    config: dict
    seed: int
    wall_time: float = 0.0
    artifacts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
            "config": self.config,
            "seed": self.seed,
            "wall_time": self.wall_time,
            "artifacts": list(self.artifacts),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=True)

    def write(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def summary_lines(self):
        for c in self.checks:
            if c.skipped:
                status = "SKIP"
            else:
                status = "PASS" if c.passed else "FAIL"
            yield f"[{status}] {c.check_id}: computed={c.computed:.3e} tol={c.tolerance:.1e} ({c.anchor})"
