"""File-based ingestion of external data exports into registry snapshots.

Three adapters, one per consent group: weather observations and fitness
summaries arrive as delimited text, calendars as iCalendar. Everything funnels
into SourceRecord (group, timestamp, raw string map), the seam where a live
API client would plug in. snapshot_at() then picks the freshest record per
group inside a staleness window and types the values against the registry.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta, timezone
from zoneinfo import ZoneInfo

from .errors import EmptyFile, MalformedCalendar, MissingHeader
from .factors import (
    CATEGORICAL,
    EnvSnapshot,
    FactorRegistry,
    FactorValue,
    parse_rfc3339,
    validate_snapshot,
)

WEATHER_COLUMNS = ("time", "temperature_c", "precipitation_mm", "cloud_cover_pct", "condition")
FITNESS_COLUMNS = ("date", "steps_day", "sleep_hours", "resting_hr")

# How long a record stays usable for snapshot resolution.
STALENESS = {
    "weather": timedelta(hours=3),
    "calendar": "same-day",
    "fitness": "same-day",
}


@dataclass(frozen=True)
class SourceRecord:
    source_group: str
    observed_at: datetime
    raw: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class RejectedRow:
    row_number: int  # 1-based, counting the header as row 1
    reason: str


@dataclass
class ParseResult:
    records: list[SourceRecord] = field(default_factory=list)
    rejects: list[RejectedRow] = field(default_factory=list)


def _decode(data: bytes | str) -> str:
    return data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data


def _read_table(text: str, required: tuple[str, ...]) -> tuple[list[str], list[list[str]]]:
    if not text.strip():
        raise EmptyFile("no content")
    sample = text.splitlines()[0]
    try:
        dialect = csv.Sniffer().sniff(sample, delimiters=",;\t")
    except csv.Error:
        dialect = csv.excel
    reader = csv.reader(io.StringIO(text), dialect)
    rows = [r for r in reader if any(cell.strip() for cell in r)]
    header = [h.strip().lower() for h in rows[0]]
    missing = [c for c in required if c not in header]
    if missing:
        raise MissingHeader(missing)
    return header, rows[1:]


def parse_weather_table(data: bytes | str) -> ParseResult:
    """Weather observations: one record per row, malformed rows to rejects."""
    header, body = _read_table(_decode(data), WEATHER_COLUMNS)
    idx = {c: header.index(c) for c in WEATHER_COLUMNS}
    result = ParseResult()
    for n, row in enumerate(body, start=2):
        try:
            observed_at = parse_rfc3339(row[idx["time"]].strip())
            raw = {}
            for col in ("temperature_c", "precipitation_mm", "cloud_cover_pct"):
                cell = row[idx[col]].strip()
                if cell:
                    float(cell)  # malformed numerics reject the row
                    raw[col] = cell
            condition = row[idx["condition"]].strip()
            if condition:
                raw["condition"] = condition
        except (ValueError, IndexError) as e:
            result.rejects.append(RejectedRow(n, str(e)))
            continue
        result.records.append(SourceRecord("weather", observed_at, raw))
    return result


def parse_fitness_table(data: bytes | str) -> ParseResult:
    """Daily fitness summaries keyed by calendar date."""
    header, body = _read_table(_decode(data), FITNESS_COLUMNS)
    idx = {c: header.index(c) for c in FITNESS_COLUMNS}
    result = ParseResult()
    for n, row in enumerate(body, start=2):
        try:
            day = date.fromisoformat(row[idx["date"]].strip())
            raw = {}
            for col in ("steps_day", "sleep_hours", "resting_hr"):
                cell = row[idx[col]].strip()
                if cell:
                    float(cell)
                    raw[col] = cell
        except (ValueError, IndexError) as e:
            result.rejects.append(RejectedRow(n, str(e)))
            continue
        observed_at = datetime.combine(day, time(0, 0), tzinfo=timezone.utc)
        result.records.append(SourceRecord("fitness", observed_at, raw))
    return result


# --- iCalendar ---------------------------------------------------------------

_DT_RE = re.compile(r"^(\d{8})(?:T(\d{6})(Z)?)?$")
_DUR_RE = re.compile(
    r"^(?P<sign>[+-])?P(?:(?P<days>\d+)D)?(?:T(?:(?P<h>\d+)H)?(?:(?P<m>\d+)M)?(?:(?P<s>\d+)S)?)?$"
)


def _unfold(text: str) -> list[str]:
    lines: list[str] = []
    for raw in text.replace("\r\n", "\n").replace("\r", "\n").split("\n"):
        if raw[:1] in (" ", "\t") and lines:
            lines[-1] += raw[1:]
        elif raw:
            lines.append(raw)
    return lines


def _parse_ics_dt(value: str, params: dict[str, str]) -> tuple[datetime, bool]:
    """Returns (moment, is_all_day). TZID resolves via zoneinfo, else UTC."""
    m = _DT_RE.match(value.strip())
    if not m:
        raise ValueError(f"bad iCalendar date {value!r}")
    d = datetime.strptime(m.group(1), "%Y%m%d")
    if m.group(2) is None:
        return d.replace(tzinfo=timezone.utc), True
    t = datetime.strptime(m.group(2), "%H%M%S").time()
    dt = datetime.combine(d.date(), t)
    if m.group(3):
        return dt.replace(tzinfo=timezone.utc), False
    tzid = params.get("TZID")
    if tzid:
        try:
            return dt.replace(tzinfo=ZoneInfo(tzid)), False
        except Exception:
            pass
    return dt.replace(tzinfo=timezone.utc), False


def _parse_duration(value: str) -> timedelta:
    m = _DUR_RE.match(value.strip())
    if not m:
        raise ValueError(f"bad duration {value!r}")
    td = timedelta(
        days=int(m.group("days") or 0),
        hours=int(m.group("h") or 0),
        minutes=int(m.group("m") or 0),
        seconds=int(m.group("s") or 0),
    )
    return -td if m.group("sign") == "-" else td


def _content_lines(lines: list[str]):
    for line in lines:
        name, _, value = line.partition(":")
        prop, *param_parts = name.split(";")
        params = {}
        for p in param_parts:
            k, _, v = p.partition("=")
            params[k.upper()] = v
        yield prop.upper(), params, value


def parse_calendar_events(data: bytes | str) -> ParseResult:
    """Fold VEVENTs into per-day records {event_count_day, busy_hours_day}.

    Busy hours clip to day boundaries, so an event crossing midnight spreads
    over both days; the event also counts once on every day it touches.
    All-day events count toward the day but add no busy hours.
    """
    text = _decode(data)
    if not text.strip():
        raise EmptyFile("no content")
    lines = _unfold(text)
    if not any(l.upper().startswith("BEGIN:VCALENDAR") for l in lines):
        raise MalformedCalendar("missing BEGIN:VCALENDAR")

    result = ParseResult()
    events: list[tuple[datetime, datetime, bool]] = []
    in_event = False
    start = end = duration = None
    all_day = False
    event_no = 0
    for prop, params, value in _content_lines(lines):
        if prop == "BEGIN" and value.upper() == "VEVENT":
            in_event, start, end, duration, all_day = True, None, None, None, False
            event_no += 1
        elif prop == "END" and value.upper() == "VEVENT":
            in_event = False
            if start is None:
                result.rejects.append(RejectedRow(event_no, "VEVENT without DTSTART"))
                continue
            if end is None:
                end = start + duration if duration else start
            if end < start:
                result.rejects.append(RejectedRow(event_no, "event ends before it starts"))
                continue
            events.append((start, end, all_day))
        elif in_event:
            try:
                if prop == "DTSTART":
                    start, all_day = _parse_ics_dt(value, params)
                elif prop == "DTEND":
                    end, _ = _parse_ics_dt(value, params)
                elif prop == "DURATION":
                    duration = _parse_duration(value)
            except ValueError as e:
                result.rejects.append(RejectedRow(event_no, str(e)))
                in_event = False

    per_day: dict[date, list[float]] = {}  # day -> [count, busy_hours]
    for start, end, is_all_day in events:
        if is_all_day:
            entry = per_day.setdefault(start.date(), [0, 0.0])
            entry[0] += 1
            continue
        day = start.date()
        while True:
            day_start = datetime.combine(day, time(0, 0), tzinfo=start.tzinfo)
            day_end = day_start + timedelta(days=1)
            overlap = min(end, day_end) - max(start, day_start)
            entry = per_day.setdefault(day, [0, 0.0])
            entry[0] += 1
            entry[1] += max(overlap.total_seconds(), 0.0) / 3600.0
            if end <= day_end:
                break
            day = day + timedelta(days=1)

    for day in sorted(per_day):
        count, busy = per_day[day]
        result.records.append(
            SourceRecord(
                "calendar",
                datetime.combine(day, time(0, 0), tzinfo=timezone.utc),
                {
                    "date": day.isoformat(),
                    "event_count_day": str(int(count)),
                    "busy_hours_day": f"{busy:.4f}",
                },
            )
        )
    return result


# --- snapshot resolution -----------------------------------------------------


def _aware(dt: datetime) -> datetime:
    return dt.replace(tzinfo=timezone.utc) if dt.tzinfo is None else dt


def _fresh(record: SourceRecord, at: datetime) -> bool:
    observed = _aware(record.observed_at)
    at = _aware(at)
    if observed > at:
        return False
    window = STALENESS[record.source_group]
    if window == "same-day":
        return observed.date() == at.date()
    return at - observed <= window


def snapshot_at(
    records: list[SourceRecord], at: datetime, reg: FactorRegistry
) -> EnvSnapshot:
    """Latest fresh record per group, typed against the registry.

    Records must be time-sorted. Stale groups simply leave their factors
    missing; out-of-range numerics clamp so the result always validates.
    """
    chosen: dict[str, SourceRecord] = {}
    for record in records:
        if _fresh(record, at):
            chosen[record.source_group] = record  # later records overwrite
    values: dict[str, FactorValue] = {}
    for d in reg.descriptors():
        record = chosen.get(d.source_group)
        if record is None or d.factor_id not in record.raw:
            continue
        cell = record.raw[d.factor_id]
        if d.kind == CATEGORICAL:
            if cell:
                values[d.factor_id] = cell
        else:
            try:
                values[d.factor_id] = float(cell)
            except ValueError:
                continue
    return validate_snapshot(EnvSnapshot(values=values, captured_at=at), reg, policy="clamp")
