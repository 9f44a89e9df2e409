"""Check reports shared by the verification routines."""
from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class Report:
    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)
    findings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def check(self, cond: bool, msg: str) -> None:
        self.checked += 1
        if not cond:
            self.violations.append(msg)

    def line(self) -> str:
        status = "ok" if self.ok else "FAIL"
        extra = f", {len(self.findings)} findings" if self.findings else ""
        return f"{self.name}: {status} ({self.checked} checks, {len(self.violations)} violations{extra})"
