"""Pass/fail records shared by the assumption checks and the solution diagnostics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
INFO = "info"


@dataclass(frozen=True)
class Check:
    name: str
    status: str
    value: float
    tolerance: float
    anchor: str
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.status == FAIL


@dataclass
class DiagnosticsReport:
    regime: str = "unknown"
    checks: list[Check] = field(default_factory=list)

    def add(self, name, ok, value, tolerance, anchor, note="", status=None) -> Check:
        if status is None:
            status = PASS if ok else FAIL
        check = Check(name, status, float(value), float(tolerance), anchor, note)
        self.checks.append(check)
        return check

    def extend(self, other: DiagnosticsReport) -> DiagnosticsReport:
        self.checks.extend(other.checks)
        return self

    def merged(self, *others: DiagnosticsReport) -> DiagnosticsReport:
        out = DiagnosticsReport(self.regime, list(self.checks))
        for o in others:
            out.checks.extend(o.checks)
        out.checks.sort(key=lambda c: (c.anchor, c.name))
        return out

    @property
    def passed(self) -> bool:
        return not any(c.failed for c in self.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def by_status(self, status: str) -> list[Check]:
        return [c for c in self.checks if c.status == status]

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["check", "anchor", "status", "value", "tolerance"])
            for c in self.checks:
                w.writerow([c.name, c.anchor, c.status, _fmt(c.value), _fmt(c.tolerance)])

    def summary(self) -> str:
        lines = [f"regime: {self.regime}"]
        width = max((len(c.name) for c in self.checks), default=10)
        for c in self.checks:
            line = f"  [{c.status.upper():>12}] {c.name:<{width}}  value={_fmt(c.value)}  tol={_fmt(c.tolerance)}  ({c.anchor})"
            if c.note:
                line += f"  -- {c.note}"
            lines.append(line)
        n_fail = len(self.by_status(FAIL))
        lines.append(f"{len(self.checks)} checks, {n_fail} failed")
        return "\n".join(lines)


def _fmt(x: float) -> str:
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return str(x)
    return f"{x:.6g}"
