"""Shared audit report types and the family registry."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

MAX_RECORDED_VIOLATIONS = 500


@dataclass
class Violation:
    family: str
    context: Tuple
    charge: Fraction

    def machine_line(self) -> str:
        ctx = ",".join(str(c) for c in self.context)
        return f"{self.family}\t{ctx}\t{self.charge.numerator}/{self.charge.denominator}\tVIOLATION"


@dataclass
class AuditReport:
    family: str
    delta: int
    enumerated: int = 0
    discarded: int = 0
    discards_by_pattern: Dict[str, int] = field(default_factory=dict)
    violations: List[Violation] = field(default_factory=list)
    violation_count: int = 0

    def record_discard(self, pattern: str, weight: int = 1) -> None:
        self.enumerated += weight
        self.discarded += weight
        self.discards_by_pattern[pattern] = (
            self.discards_by_pattern.get(pattern, 0) + weight
        )

    def record_case(self, context: Tuple, charge: Fraction, ok: bool) -> None:
        self.enumerated += 1
        if not ok:
            self.violation_count += 1
            if len(self.violations) < MAX_RECORDED_VIOLATIONS:
                self.violations.append(Violation(self.family, context, charge))

    @property
    def ok(self) -> bool:
        return self.violation_count == 0

    def merge(self, other: "AuditReport") -> "AuditReport":
        assert other.family == self.family and other.delta == self.delta
        self.enumerated += other.enumerated
        self.discarded += other.discarded
        for k, v in other.discards_by_pattern.items():
            self.discards_by_pattern[k] = self.discards_by_pattern.get(k, 0) + v
        self.violations.extend(
            other.violations[: MAX_RECORDED_VIOLATIONS - len(self.violations)]
        )
        self.violation_count += other.violation_count
        return self

    def summary(self) -> str:
        status = "ok" if self.ok else f"{self.violation_count} VIOLATIONS"
        parts = [
            f"[{self.family}] delta={self.delta}: {self.enumerated} cases,"
            f" {self.discarded} discarded, {status}"
        ]
        for name in sorted(self.discards_by_pattern):
            parts.append(f"    discarded by {name}: {self.discards_by_pattern[name]}")
        for v in self.violations[:20]:
            parts.append(f"    VIOLATION {v.context} charge={v.charge}")
        return "\n".join(parts)
