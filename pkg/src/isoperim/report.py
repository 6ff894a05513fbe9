"""Structured pass/fail reporting shared by all verification suites."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from typing import Iterable

__all__ = ["Report", "ReportItem"]

# Items with these statuses do not count against overall success.
_NON_BLOCKING = {"info", "skipped", "scan"}


@dataclass
class ReportItem:
    id: str
    status: str  # pass | fail | inconclusive | info | skipped | scan
    margin: float | None = None
    detail: str = ""
    depth: int | None = None
    precision: int | None = None
    seconds: float | None = None

    @property
    def ok(self) -> bool:
        return self.status == "pass" or self.status in _NON_BLOCKING


@dataclass
class Report:
    name: str
    items: list[ReportItem] = field(default_factory=list)
    fingerprint: dict = field(default_factory=dict)

    def add(self, item: ReportItem) -> ReportItem:
        self.items.append(item)
        return item

    def extend(self, other: "Report", prefix: str = "") -> None:
        for it in other.items:
            self.items.append(
                ReportItem(
                    id=f"{prefix}{it.id}",
                    status=it.status,
                    margin=it.margin,
                    detail=it.detail,
                    depth=it.depth,
                    precision=it.precision,
                    seconds=it.seconds,
                )
            )

    @property
    def passed(self) -> bool:
        return all(it.ok for it in self.items)

    def failures(self) -> list[ReportItem]:
        return [it for it in self.items if not it.ok]

    def render(self) -> str:
        lines = [f"== {self.name} =="]
        if self.fingerprint:
            params = ", ".join(f"{k}={v}" for k, v in sorted(self.fingerprint.items()))
            lines.append(f"   ({params})")
        for it in self.items:
            parts = [f"[{it.status.upper():>12}] {it.id}"]
            if it.margin is not None:
                parts.append(f"margin={it.margin:.3e}")
            if it.depth is not None:
                parts.append(f"depth={it.depth}")
            if it.precision is not None:
                parts.append(f"prec={it.precision}")
            if it.seconds is not None:
                parts.append(f"t={it.seconds:.2f}s")
            if it.detail:
                parts.append(it.detail)
            lines.append("  " + "  ".join(parts))
        lines.append(f"-- overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            {
                "name": self.name,
                "fingerprint": self.fingerprint,
                "overall": "pass" if self.passed else "fail",
                "items": [asdict(it) for it in self.items],
            },
            indent=2,
            sort_keys=True,
        )

    @staticmethod
    def combined(name: str, reports: Iterable["Report"], fingerprint: dict | None = None) -> "Report":
        out = Report(name=name, fingerprint=fingerprint or {})
        for r in reports:
            out.extend(r, prefix=f"{r.name}/")
        return out
