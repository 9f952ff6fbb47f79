"""Uniform pass/fail records for verification routines.

Every checker in the package returns a list of CheckResult rows so the
command line layer can print one line per check and derive its exit
status without knowing what was checked.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self):
        tag = "PASS" if self.passed else "FAIL"
        body = f"{tag}  {self.name}"
        if self.detail:
            body += f"  [{self.detail}]"
        return body


@dataclass
class ReportSet:
    results: list = field(default_factory=list)

    def add(self, name, passed, detail=""):
        self.results.append(CheckResult(name, bool(passed), detail))

    def extend(self, other):
        if isinstance(other, ReportSet):
            self.results.extend(other.results)
        else:
            self.results.extend(other)

    @property
    def passed(self):
        return all(r.passed for r in self.results)

    def lines(self):
        return [r.line() for r in self.results]

    def __str__(self):
        return "\n".join(self.lines())
