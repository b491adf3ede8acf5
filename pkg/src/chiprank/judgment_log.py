"""Append-only JSON-lines log of judgments, and its replay.

One record per line keeps corruption isolated: replay returns every
parseable record in file order plus an itemized list of bad lines.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import IO

from .elo import Comparison, Outcome

_FIELDS = ("comparison_id", "operator_id", "left", "right", "outcome", "unix_timestamp_ms")


@dataclass(frozen=True)
class JudgmentRecord:
    comparison_id: str
    operator_id: str
    left: str
    right: str
    outcome: Outcome
    unix_timestamp_ms: int
    repeat_of: str | None = None

    def to_comparison(self) -> Comparison:
        return Comparison(
            left=self.left,
            right=self.right,
            outcome=self.outcome,
            operator_id=self.operator_id,
            timestamp=datetime.fromtimestamp(self.unix_timestamp_ms / 1000.0, tz=timezone.utc),
            comparison_id=self.comparison_id,
            repeat_of=self.repeat_of,
        )


@dataclass(frozen=True)
class LogParseError:
    line_number: int
    message: str


@dataclass
class ReplayResult:
    records: list[JudgmentRecord]
    errors: list[LogParseError]

    def comparisons(self) -> list[Comparison]:
        return [r.to_comparison() for r in self.records]


def record_to_line(record: JudgmentRecord) -> str:
    payload = {
        "comparison_id": record.comparison_id,
        "operator_id": record.operator_id,
        "left": record.left,
        "right": record.right,
        "outcome": record.outcome.value,
        "unix_timestamp_ms": record.unix_timestamp_ms,
        "repeat_of": record.repeat_of,
    }
    return json.dumps(payload, separators=(",", ":"))


def parse_line(line: str) -> JudgmentRecord:
    raw = json.loads(line)
    if not isinstance(raw, dict):
        raise ValueError("record is not an object")
    missing = [f for f in _FIELDS if f not in raw]
    if missing:
        raise ValueError(f"missing fields: {', '.join(missing)}")
    record = JudgmentRecord(
        comparison_id=str(raw["comparison_id"]),
        operator_id=str(raw["operator_id"]),
        left=str(raw["left"]),
        right=str(raw["right"]),
        outcome=Outcome(raw["outcome"]),
        unix_timestamp_ms=int(raw["unix_timestamp_ms"]),
        repeat_of=None if raw.get("repeat_of") is None else str(raw["repeat_of"]),
    )
    if record.left == record.right:
        raise ValueError("left and right reference the same image")
    return record


class JudgmentLogWriter:
    """Single-writer append handle; every record is flushed to disk before
    the append returns."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh: IO[str] = open(self.path, "a", encoding="utf-8")

    def append(self, record: JudgmentRecord) -> None:
        self._fh.write(record_to_line(record) + "\n")
        self._fh.flush()
        os.fsync(self._fh.fileno())

    def close(self) -> None:
        if not self._fh.closed:
            self._fh.close()

    def __enter__(self) -> "JudgmentLogWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def append_judgment(path: Path, record: JudgmentRecord) -> None:
    """One-shot durable append (open, write, fsync, close)."""
    with JudgmentLogWriter(path) as writer:
        writer.append(record)


def replay_log(path: Path) -> ReplayResult:
    """Parse a judgment log; bad lines are reported, never silently skipped."""
    path = Path(path)
    records: list[JudgmentRecord] = []
    errors: list[LogParseError] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(parse_line(line))
            except (ValueError, KeyError, TypeError) as exc:
                errors.append(LogParseError(line_number, str(exc)))
    return ReplayResult(records=records, errors=errors)
