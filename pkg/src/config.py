"""
Run configuration: JSON config files, environment defaults and rational parsing.
"""

import json
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

OUTPUT_DIR_ENV = "ITM_OUTPUT_DIR"
WORKERS_ENV = "ITM_WORKERS"

FORMATS = ("json", "csv")

_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


class ConfigError(ValueError):
    """Malformed configuration file, flag value or rational literal."""


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or an integer into an exact Fraction.

    Decimal literals are refused: "0.1" is not the rational 1/10 a user means
    once it has been through a float anywhere upstream.
    """
    if not _RATIONAL.match(text):
        raise ConfigError(f"Malformed rational {text!r}: expected p/q or an integer")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError as e:
        raise ConfigError(f"Malformed rational {text!r}: zero denominator") from e


def parse_rational_list(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_rational(part) for part in text.split(",") if part.strip())


def parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise ConfigError(f"Malformed integer list {text!r}") from e


def output_dir() -> Optional[Path]:
    value = os.getenv(OUTPUT_DIR_ENV, "")
    return Path(value) if value else None


def worker_count() -> int:
    """Worker pool size: $ITM_WORKERS if set, else min(8, 2 * cpu count)."""
    value = os.getenv(WORKERS_ENV, "")
    if value:
        try:
            workers = int(value)
        except ValueError as e:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {value!r}") from e
        if workers < 1:
            raise ConfigError(f"{WORKERS_ENV} must be positive, got {workers}")
        return workers
    return min(8, (os.cpu_count() or 1) * 2)


@dataclass
class RunConfig:
    command: str
    params: dict[str, Any] = field(default_factory=lambda: {})
    out: Optional[str] = None
    seed: int = 0
    format: str = "json"

    _FIELDS = ("command", "params", "out", "seed", "format")

    def __post_init__(self) -> None:
        if not self.command:
            raise ConfigError("RunConfig needs a command")
        if self.format not in FORMATS:
            raise ConfigError(f"Unknown format {self.format!r}; expected one of {FORMATS}")
        if not isinstance(self.params, dict):
            raise ConfigError("RunConfig params must be a JSON object")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        unknown = sorted(set(data) - set(cls._FIELDS))
        if unknown:
            raise ConfigError(f"Unknown config fields: {', '.join(unknown)}")
        if "command" not in data:
            raise ConfigError("Config is missing 'command'")
        return cls(
            command=str(data["command"]),
            params=data.get("params", {}),
            out=data.get("out"),
            seed=int(data.get("seed", 0)),
            format=str(data.get("format", "json")),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "params": dict(self.params),
            "out": self.out,
            "seed": self.seed,
            "format": self.format,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"Config {path} must hold a JSON object")
        return cls.from_dict(data)

    def to_argv(self) -> list[str]:
        """Render the config as command-line arguments.

        Positional parameters go under the key "target" (e.g. the construction
        name); list values are comma-joined and true booleans become bare flags.
        """
        argv: list[str] = [self.command]
        target = self.params.get("target")
        if target is not None:
            argv.append(str(target))
        for key, value in self.params.items():
            if key == "target" or value is None or value is False:
                continue
            flag = "--" + key.replace("_", "-")
            if value is True:
                argv.append(flag)
            elif isinstance(value, (list, tuple)):
                argv.extend([flag, ",".join(str(v) for v in value)])
            else:
                argv.extend([flag, str(value)])
        argv.extend(["--seed", str(self.seed), "--format", self.format])
        if self.out:
            argv.extend(["--out", self.out])
        return argv
