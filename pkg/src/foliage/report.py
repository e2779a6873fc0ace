"""Line-per-identity check records shared by every verification suite."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field


@dataclass
class Check:
    suite: str
    check: str
    equation: str  # traceability tag, e.g. "1.6"
    passed: bool
    model: str = ""
    indices: tuple = ()
    lhs: str = ""
    rhs: str = ""
    detail: str = ""
    gated: bool = True

    def row(self):
        return {
            "suite": self.suite,
            "model": self.model,
            "check": self.check,
            "equation": self.equation,
            "status": "pass" if self.passed else "fail",
            "gated": int(self.gated),
            "indices": " ".join(str(i) for i in self.indices),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "detail": self.detail,
        }


FIELDS = ["suite", "model", "check", "equation", "status", "gated", "indices",
          "lhs", "rhs", "detail"]


@dataclass
class Report:
    checks: list = field(default_factory=list)

    def add(self, *args, **kwargs):
        c = Check(*args, **kwargs)
        self.checks.append(c)
        return c

    def extend(self, other):
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.gated)

    def failures(self):
        return [c for c in self.checks if c.gated and not c.passed]

    def by_check(self):
        out = {}
        for c in self.checks:
            out.setdefault(c.check, []).append(c)
        return out

    def summary(self):
        """``{check: passed}`` aggregated over index tuples and models."""
        out = {}
        for c in self.checks:
            key = c.check
            out[key] = out.get(key, True) and (c.passed or not c.gated)
        return out

    def to_csv(self):
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
        w.writeheader()
        for c in self.checks:
            w.writerow(c.row())
        return buf.getvalue()

    def to_json(self):
        return json.dumps([asdict(c) for c in self.checks], indent=1, default=str)

    def __len__(self):
        return len(self.checks)

    def __iter__(self):
        return iter(self.checks)
