"""Event-log model: parsing, validation, splitting, statistics, concurrency.

Timestamps are stored as integer epoch milliseconds in UTC. The canonical
CSV schema is ``case_id,activity,resource,start_timestamp,end_timestamp``
with ISO-8601 timestamps (``YYYY-MM-DDTHH:MM:SS.mmm+HH:MM``); the resource
column may be empty.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Iterable, Optional

from .errors import (
    InsufficientDataError,
    InvalidArgumentError,
    ParseError,
    SchemaError,
    ValidationError,
)

CSV_COLUMNS = ("case_id", "activity", "resource", "start_timestamp", "end_timestamp")

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def parse_timestamp(text: str) -> int:
    """Parse an ISO-8601 timestamp to epoch milliseconds (UTC).

    Naive timestamps are interpreted as UTC. Sub-millisecond digits are
    rounded to the nearest millisecond.
    """
    raw = text.strip()
    if raw.endswith("Z") or raw.endswith("z"):
        raw = raw[:-1] + "+00:00"
    dt = datetime.fromisoformat(raw)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    delta = dt - _EPOCH
    micros = delta // timedelta(microseconds=1)
    return round(micros / 1000)


def format_timestamp(ms: int) -> str:
    """Render epoch milliseconds as ``YYYY-MM-DDTHH:MM:SS.mmm+00:00``."""
    seconds, millis = divmod(ms, 1000)
    dt = _EPOCH + timedelta(seconds=seconds)
    return f"{dt:%Y-%m-%dT%H:%M:%S}.{millis:03d}+00:00"


@dataclass(frozen=True, slots=True)
class Event:
    """One activity execution: who did what, when."""

    case_id: str
    activity: str
    resource: Optional[str]
    start_ms: int
    end_ms: int

    def __post_init__(self):
        if not self.activity:
            raise ValidationError(f"event in case {self.case_id!r} has empty activity label")
        if self.end_ms < self.start_ms:
            raise ValidationError(
                f"event {self.activity!r} in case {self.case_id!r} ends before it starts"
            )

    @property
    def duration_s(self) -> float:
        return (self.end_ms - self.start_ms) / 1000.0


def _event_order(e: Event):
    return (e.start_ms, e.end_ms, e.activity)


@dataclass(frozen=True, slots=True)
class Trace:
    """Ordered sequence of events sharing one case identifier."""

    case_id: str
    events: tuple[Event, ...]

    def __post_init__(self):
        if not self.events:
            raise ValidationError(f"trace {self.case_id!r} has no events")
        for e in self.events:
            if e.case_id != self.case_id:
                raise ValidationError(
                    f"trace {self.case_id!r} contains event of case {e.case_id!r}"
                )
        ordered = tuple(sorted(self.events, key=_event_order))
        object.__setattr__(self, "events", ordered)

    def __len__(self) -> int:
        return len(self.events)

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)

    @property
    def start_ms(self) -> int:
        return min(e.start_ms for e in self.events)

    @property
    def end_ms(self) -> int:
        return max(e.end_ms for e in self.events)

    @property
    def cycle_time_s(self) -> float:
        return (self.end_ms - self.start_ms) / 1000.0


@dataclass(frozen=True, slots=True)
class EventLog:
    """Collection of traces plus the label alphabets they induce."""

    traces: tuple[Trace, ...]
    activity_alphabet: frozenset[str] = field(default=frozenset())
    resource_alphabet: frozenset[str] = field(default=frozenset())

    def __post_init__(self):
        seen = set()
        for t in self.traces:
            if t.case_id in seen:
                raise ValidationError(f"duplicate case_id {t.case_id!r}")
            seen.add(t.case_id)
        acts = frozenset(e.activity for t in self.traces for e in t.events)
        ress = frozenset(
            e.resource for t in self.traces for e in t.events if e.resource
        )
        object.__setattr__(self, "activity_alphabet", acts)
        object.__setattr__(self, "resource_alphabet", ress)

    def __len__(self) -> int:
        return len(self.traces)

    @property
    def num_events(self) -> int:
        return sum(len(t) for t in self.traces)


@dataclass(frozen=True, slots=True)
class LogStatistics:
    num_traces: int
    num_events: int
    num_activities: int
    avg_activities_per_trace: float
    max_activities_per_trace: int
    mean_duration_s: float
    max_duration_s: float

    def to_dict(self) -> dict:
        return {
            "num_traces": self.num_traces,
            "num_events": self.num_events,
            "num_activities": self.num_activities,
            "avg_activities_per_trace": self.avg_activities_per_trace,
            "max_activities_per_trace": self.max_activities_per_trace,
            "mean_duration_s": self.mean_duration_s,
            "max_duration_s": self.max_duration_s,
        }


@dataclass(frozen=True, slots=True)
class ConcurrencyRelation:
    """Symmetric set of activity pairs observed in both directly-follows orders."""

    pairs: frozenset[tuple[str, str]]

    def __post_init__(self):
        sym = set()
        for a, b in self.pairs:
            sym.add((a, b))
            sym.add((b, a))
        object.__setattr__(self, "pairs", frozenset(sym))

    def __contains__(self, pair) -> bool:
        return tuple(pair) in self.pairs

    @staticmethod
    def empty() -> "ConcurrencyRelation":
        return ConcurrencyRelation(frozenset())


@dataclass(frozen=True)
class ColumnMapping:
    """Names of the CSV columns holding each event field."""

    case: str = "case_id"
    activity: str = "activity"
    start: str = "start_timestamp"
    end: str = "end_timestamp"
    resource: Optional[str] = "resource"


def build_log(traces: Iterable[Trace]) -> EventLog:
    return EventLog(tuple(traces))


def log_from_rows(rows: Iterable[tuple[str, str, Optional[str], int, int]]) -> EventLog:
    """Build an EventLog from (case, activity, resource, start_ms, end_ms) rows.

    Traces appear in order of first occurrence of their case id.
    """
    by_case: dict[str, list[Event]] = {}
    for case, activity, resource, start_ms, end_ms in rows:
        by_case.setdefault(case, []).append(
            Event(case, activity, resource if resource else None, start_ms, end_ms)
        )
    return build_log(Trace(case, tuple(events)) for case, events in by_case.items())


def parse_csv(path, mapping: ColumnMapping | None = None) -> EventLog:
    """Parse a delimited event log into a validated EventLog.

    Raises SchemaError for missing columns, ParseError (with the 1-based
    line number) for unparseable rows, and ValidationError listing the
    offending case ids when any event ends before it starts.
    """
    mapping = mapping or ColumnMapping()
    rows: list[tuple[str, str, Optional[str], int, int]] = []
    bad_order: list[tuple[int, str]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        required = [mapping.case, mapping.activity, mapping.start, mapping.end]
        for col in required:
            if col not in header:
                raise SchemaError(f"missing column {col!r} in {path}")
        has_resource = mapping.resource is not None and mapping.resource in header
        for line_no, row in enumerate(reader, start=2):
            case = (row.get(mapping.case) or "").strip()
            activity = (row.get(mapping.activity) or "").strip()
            if not case:
                raise ParseError(f"{path}:{line_no}: empty case id")
            if not activity:
                raise ParseError(f"{path}:{line_no}: empty activity label")
            try:
                start_ms = parse_timestamp(row[mapping.start])
                end_ms = parse_timestamp(row[mapping.end])
            except (ValueError, TypeError) as exc:
                raise ParseError(f"{path}:{line_no}: bad timestamp ({exc})") from exc
            if end_ms < start_ms:
                bad_order.append((line_no, case))
                continue
            resource = (row.get(mapping.resource) or "").strip() if has_resource else ""
            rows.append((case, activity, resource or None, start_ms, end_ms))
    if bad_order:
        lines = ", ".join(str(n) for n, _ in bad_order)
        cases = ", ".join(sorted({c for _, c in bad_order}))
        raise ValidationError(
            f"{path}: end before start on line(s) {lines} (case(s): {cases})"
        )
    if not rows:
        raise ValidationError(f"{path}: no event rows")
    return log_from_rows(rows)


def write_csv(log: EventLog, path) -> None:
    """Write a log in the canonical CSV schema (lossless at ms precision)."""
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for trace in log.traces:
                for e in trace.events:
                    writer.writerow(
                        (
                            e.case_id,
                            e.activity,
                            e.resource or "",
                            format_timestamp(e.start_ms),
                            format_timestamp(e.end_ms),
                        )
                    )
    except OSError as exc:
        raise OSError(f"cannot write event log to {path}: {exc}") from exc


def compute_statistics(log: EventLog) -> LogStatistics:
    """Trace/event counts and per-trace duration summary of a log."""
    if not log.traces:
        raise InsufficientDataError("statistics of an empty log")
    lengths = [len(t) for t in log.traces]
    durations = [t.cycle_time_s for t in log.traces]
    return LogStatistics(
        num_traces=len(log.traces),
        num_events=sum(lengths),
        num_activities=len(log.activity_alphabet),
        avg_activities_per_trace=sum(lengths) / len(lengths),
        max_activities_per_trace=max(lengths),
        mean_duration_s=sum(durations) / len(durations),
        max_duration_s=max(durations),
    )


def temporal_split(log: EventLog, ratio: float) -> tuple[EventLog, EventLog]:
    """Split traces by start time: the earliest ceil(ratio*N) go to train.

    The two folds partition the input. A ratio that leaves either fold
    empty raises InsufficientDataError.
    """
    if not (0.0 < ratio < 1.0):
        raise InvalidArgumentError(f"split ratio must lie in (0, 1), got {ratio}")
    if len(log.traces) < 2:
        raise InsufficientDataError("temporal split needs at least 2 traces")
    ordered = sorted(log.traces, key=lambda t: (t.start_ms, t.case_id))
    cut = math.ceil(ratio * len(ordered))
    train, test = ordered[:cut], ordered[cut:]
    if not train or not test:
        raise InsufficientDataError(
            f"degenerate split: ratio {ratio} on {len(ordered)} traces leaves an empty fold"
        )
    return build_log(train), build_log(test)


def discover_concurrency(log: EventLog) -> ConcurrencyRelation:
    """Activities observed directly following each other in both orders."""
    follows: set[tuple[str, str]] = set()
    for trace in log.traces:
        acts = trace.activities
        for i in range(len(acts) - 1):
            follows.add((acts[i], acts[i + 1]))
    pairs = {
        (a, b)
        for (a, b) in follows
        if a != b and (b, a) in follows
    }
    return ConcurrencyRelation(frozenset(pairs))
