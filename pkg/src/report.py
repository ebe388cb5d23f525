"""
Structured verification and estimation results.

Every verifier and estimator in the package hands back a Report: a list of
named pass/fail checks plus the exact values that back them. Reports are what
the command line prints and what the exit code is computed from.
"""

import csv
import dataclasses
import datetime
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional, TextIO, Union

import numpy as np

from .log import loggerInstance

SCHEMA_VERSION = "1.0"

# Integers at or beyond this magnitude lose precision as JSON numbers in most readers
_SAFE_INT = 2**53


class CheckStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    SKIP = "skip"


@dataclass(frozen=True)
class Check:
    name: str
    status: CheckStatus
    detail: str = ""
    provenance: str = ""

    @property
    def passed(self) -> bool:
        return self.status is not CheckStatus.FAIL

    def __str__(self) -> str:
        suffix = f" - {self.detail}" if self.detail else ""
        return f"[{self.status.name}] {self.name}{suffix}"


@dataclass
class Report:
    command: str
    checks: list[Check] = field(default_factory=lambda: [])
    values: dict[str, Any] = field(default_factory=lambda: {})
    notes: list[str] = field(default_factory=lambda: [])
    timestamp: str = field(
        default_factory=lambda: datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    )

    def check(self, name: str, condition: bool, detail: str = "", provenance: str = "") -> bool:
        """Record a check and return its outcome."""
        status = CheckStatus.PASS if condition else CheckStatus.FAIL
        self.checks.append(Check(name, status, detail, provenance))
        loggerInstance.logger.log_check(f"{self.command}/{name}", bool(condition), detail)
        return bool(condition)

    def skip(self, name: str, detail: str = "", provenance: str = "") -> None:
        self.checks.append(Check(name, CheckStatus.SKIP, detail, provenance))
        loggerInstance.logger.log_debug(f"check {self.command}/{name}: SKIP ({detail})")

    def record(self, key: str, value: Any) -> None:
        self.values[key] = value

    def note(self, text: str) -> None:
        self.notes.append(text)

    def merge(self, other: "Report", prefix: Optional[str] = None) -> None:
        """Fold another report into this one, namespacing its checks and values."""
        tag = prefix if prefix is not None else other.command
        for c in other.checks:
            self.checks.append(Check(f"{tag}/{c.name}", c.status, c.detail, c.provenance))
        for key, value in other.values.items():
            self.values[f"{tag}/{key}"] = value
        self.notes.extend(f"{tag}: {n}" for n in other.notes)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if c.status is CheckStatus.FAIL]

    def to_dict(self, include_timestamp: bool = True) -> dict[str, Any]:
        data: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "passed": self.passed,
            "checks": [
                {
                    "name": c.name,
                    "status": c.status.value,
                    "detail": c.detail,
                    "provenance": c.provenance,
                }
                for c in self.checks
            ],
            "values": to_jsonable(self.values),
            "notes": list(self.notes),
        }
        if include_timestamp:
            data["timestamp"] = self.timestamp
        return data

    def to_json(self, include_timestamp: bool = True, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(include_timestamp), indent=indent, sort_keys=False)

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        failed = len(self.failures)
        return f"{self.command}: {verdict} ({len(self.checks)} checks, {failed} failed)"


def to_jsonable(obj: Any) -> Any:
    """Recursively convert values into JSON-safe structures.

    Fractions become "p/q" strings and integers too large for a double become
    decimal strings, so no exact value is ever emitted as a float.
    """
    if isinstance(obj, Report):
        return obj.to_dict()
    if isinstance(obj, Enum):
        return obj.name
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else _int_out(obj.numerator)
    if isinstance(obj, int):
        return _int_out(obj)
    if isinstance(obj, np.integer):
        return _int_out(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return str(obj)


def _int_out(value: int) -> Union[int, str]:
    return value if abs(value) < _SAFE_INT else str(value)


def write_csv(rows: Iterable[Mapping[str, Any]], stream: TextIO) -> None:
    """Write a flat table; column order follows the first row."""
    rows = list(rows)
    if not rows:
        return
    writer = csv.DictWriter(stream, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})


def csv_text(rows: Iterable[Mapping[str, Any]]) -> str:
    buffer = io.StringIO()
    write_csv(rows, buffer)
    return buffer.getvalue()


def _csv_cell(value: Any) -> Any:
    converted = to_jsonable(value)
    if isinstance(converted, (list, dict)):
        return json.dumps(converted)
    return "" if converted is None else converted


def write_report(report: Report, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.to_json() + "\n", encoding="utf-8")
    loggerInstance.logger.log_info(f"Report for {report.command} written to {path}")
