"""Machine-readable pass/fail evidence."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

VERSION = "0.1.0"


def plain(v: Any):
    """Turn witness payloads into JSON-friendly values with a stable order."""
    if v is None or isinstance(v, (bool, int, float, str)):
        return v
    if isinstance(v, dict):
        return {str(k): plain(x) for k, x in sorted(v.items(), key=lambda kv: str(kv[0]))}
    if isinstance(v, (list, tuple)):
        return [plain(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted((plain(x) for x in v), key=lambda x: json.dumps(x, sort_keys=True))
    return str(v)


@dataclass
class Check:
    name: str
    passed: bool
    witness: Any = None
    counterexample: Any = None
    millis: float | None = None

    def as_dict(self, seed=None, timing: bool = False) -> dict:
        d = {"check": self.name, "verdict": "pass" if self.passed else "fail"}
        if self.witness is not None:
            d["witness"] = plain(self.witness)
        if self.counterexample is not None:
            d["counterexample"] = plain(self.counterexample)
        d["millis"] = round(self.millis, 3) if timing and self.millis is not None else None
        d["seed"] = seed
        return d


@dataclass
class VerificationReport:
    """A named bundle of checks.  Passes iff every check passes."""

    name: str
    checks: list[Check] = field(default_factory=list)
    seed: int | None = None
    caps: dict = field(default_factory=dict)
    millis: float | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __bool__(self):
        return self.passed

    def add(self, name: str, passed: bool, witness=None, counterexample=None, millis=None) -> Check:
        c = Check(name, bool(passed), witness, counterexample, millis)
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport", prefix: str | None = None):
        for c in other.checks:
            name = f"{prefix}.{c.name}" if prefix else c.name
            self.checks.append(Check(name, c.passed, c.witness, c.counterexample, c.millis))

    @contextmanager
    def timed(self, name: str):
        """Run a block that returns its verdict through the yielded dict."""
        box: dict = {"passed": False}
        t0 = time.perf_counter()
        try:
            yield box
        finally:
            self.add(name, box.get("passed", False), box.get("witness"), box.get("counterexample"),
                     (time.perf_counter() - t0) * 1000)

    def get(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self, timing: bool = False) -> dict:
        d = {
            "report": self.name,
            "version": VERSION,
            "seed": self.seed,
            "caps": plain(self.caps),
            "verdict": "pass" if self.passed else "fail",
            "checks": [c.as_dict(self.seed, timing) for c in sorted(self.checks, key=lambda c: c.name)],
        }
        if timing:
            d["millis"] = None if self.millis is None else round(self.millis, 3)
        return d

    def to_json(self, timing: bool = False) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=False)

    def to_text(self) -> str:
        lines = [f"{self.name}: {'PASS' if self.passed else 'FAIL'}"]
        for c in sorted(self.checks, key=lambda c: c.name):
            line = f"  [{'pass' if c.passed else 'FAIL'}] {c.name}"
            if c.witness is not None:
                line += f"  {plain(c.witness)}"
            if not c.passed and c.counterexample is not None:
                line += f"  counterexample={plain(c.counterexample)}"
            lines.append(line)
        return "\n".join(lines)
