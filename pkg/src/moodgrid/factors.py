"""Environmental factors: registry, sparse snapshots, and check-in records.

Missingness is first-class here. A snapshot stores only the factors that were
actually observed; everything else is simply absent. No sentinel numerics,
ever, because absence drives both the similarity rule (missing history rows
contribute zero weight) and the personalization loop (absent factors are not
scored).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Union

import yaml

from .errors import KindMismatch, OutOfRange, UnknownFactor
from .grid import GridIndex

FactorValue = Union[float, str]

NUMERIC = "numeric"
CATEGORICAL = "categorical"
SOURCE_GROUPS = ("weather", "calendar", "fitness")


def parse_rfc3339(s: str) -> datetime:
    """Parse an RFC 3339 timestamp. Python 3.10 fromisoformat rejects 'Z'."""
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    return datetime.fromisoformat(s)


def format_rfc3339(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.isoformat()


@dataclass(frozen=True)
class FactorDescriptor:
    factor_id: str
    kind: str  # numeric | categorical
    unit: str = ""
    canonical_range: tuple[float, float] | None = None
    source_group: str = "weather"

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise ValueError(f"kind must be numeric or categorical, got {self.kind!r}")
        if self.source_group not in SOURCE_GROUPS:
            raise ValueError(f"unknown source group: {self.source_group!r}")
        if self.canonical_range is not None:
            lo, hi = self.canonical_range
            if not lo < hi:
                raise ValueError(f"canonical_range needs lo < hi, got {self.canonical_range!r}")


class FactorRegistry:
    """Immutable set of factor descriptors, keyed by factor_id."""

    def __init__(self, descriptors: Iterable[FactorDescriptor], range_policy: str = "reject"):
        if range_policy not in ("reject", "clamp"):
            raise ValueError(f"range_policy must be reject or clamp, got {range_policy!r}")
        self.range_policy = range_policy
        self._by_id: dict[str, FactorDescriptor] = {}
        for d in descriptors:
            if d.factor_id in self._by_id:
                raise ValueError(f"duplicate factor_id: {d.factor_id!r}")
            self._by_id[d.factor_id] = d

    def __contains__(self, factor_id: str) -> bool:
        return factor_id in self._by_id

    def __len__(self) -> int:
        return len(self._by_id)

    def __getitem__(self, factor_id: str) -> FactorDescriptor:
        try:
            return self._by_id[factor_id]
        except KeyError:
            raise UnknownFactor(factor_id) from None

    def factor_ids(self) -> list[str]:
        return list(self._by_id)

    def descriptors(self) -> list[FactorDescriptor]:
        return list(self._by_id.values())

    def group(self, source_group: str) -> list[FactorDescriptor]:
        return [d for d in self._by_id.values() if d.source_group == source_group]

    @classmethod
    def from_file(cls, path: str | Path) -> "FactorRegistry":
        """Load a registry from a YAML document (see docs/formats.md)."""
        doc = yaml.safe_load(Path(path).read_text())
        if not isinstance(doc, dict) or "factors" not in doc:
            raise ValueError(f"registry file {path} lacks a 'factors' list")
        descriptors = []
        for entry in doc["factors"]:
            rng = entry.get("canonical_range")
            descriptors.append(
                FactorDescriptor(
                    factor_id=entry["factor_id"],
                    kind=entry["kind"],
                    unit=entry.get("unit", ""),
                    canonical_range=tuple(rng) if rng else None,
                    source_group=entry.get("source_group", "weather"),
                )
            )
        return cls(descriptors, range_policy=doc.get("range_policy", "reject"))

    def to_file(self, path: str | Path) -> None:
        doc = {
            "range_policy": self.range_policy,
            "factors": [
                {
                    "factor_id": d.factor_id,
                    "kind": d.kind,
                    "unit": d.unit,
                    "canonical_range": list(d.canonical_range) if d.canonical_range else None,
                    "source_group": d.source_group,
                }
                for d in self._by_id.values()
            ],
        }
        Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))


def default_registry(range_policy: str = "reject") -> FactorRegistry:
    """The shipped 9-factor registry covering all three consent groups."""
    return FactorRegistry(
        [
            FactorDescriptor("temperature_c", NUMERIC, "degC", (-40.0, 50.0), "weather"),
            FactorDescriptor("precipitation_mm", NUMERIC, "mm", (0.0, 500.0), "weather"),
            FactorDescriptor("cloud_cover_pct", NUMERIC, "%", (0.0, 100.0), "weather"),
            FactorDescriptor("condition", CATEGORICAL, "", None, "weather"),
            FactorDescriptor("event_count_day", NUMERIC, "events", (0.0, 60.0), "calendar"),
            FactorDescriptor("busy_hours_day", NUMERIC, "hours", (0.0, 24.0), "calendar"),
            FactorDescriptor("steps_day", NUMERIC, "steps", (0.0, 100000.0), "fitness"),
            FactorDescriptor("sleep_hours", NUMERIC, "hours", (0.0, 24.0), "fitness"),
            FactorDescriptor("resting_hr", NUMERIC, "bpm", (20.0, 220.0), "fitness"),
        ],
        range_policy=range_policy,
    )


@dataclass(frozen=True)
class EnvSnapshot:
    """Per-check-in factor values. Unobserved factors are absent from `values`."""

    values: Mapping[str, FactorValue] = field(default_factory=dict)
    captured_at: datetime | None = None

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))

    def present(self) -> list[str]:
        return list(self.values)

    def get(self, factor_id: str) -> FactorValue | None:
        return self.values.get(factor_id)

    def __len__(self) -> int:
        return len(self.values)


def validate_snapshot(
    s: EnvSnapshot, reg: FactorRegistry, policy: str | None = None
) -> EnvSnapshot:
    """Check a snapshot against the registry; returns a safe copy.

    Unknown factors always reject. Numeric values outside the canonical range
    are clamped or rejected per `policy` (default: the registry's own policy).
    Type errors (a token where a number is declared, or vice versa) reject.
    """
    policy = policy or reg.range_policy
    out: dict[str, FactorValue] = {}
    for factor_id, value in s.values.items():
        d = reg[factor_id]  # raises UnknownFactor
        if d.kind == NUMERIC:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise KindMismatch(factor_id, NUMERIC, value)
            v = float(value)
            if v != v or v in (float("inf"), float("-inf")):
                raise OutOfRange(factor_id, v)
            if d.canonical_range is not None:
                lo, hi = d.canonical_range
                if not lo <= v <= hi:
                    if policy == "reject":
                        raise OutOfRange(factor_id, v)
                    v = min(max(v, lo), hi)
            out[factor_id] = v
        else:
            if not isinstance(value, str):
                raise KindMismatch(factor_id, CATEGORICAL, value)
            out[factor_id] = value
    return EnvSnapshot(values=out, captured_at=s.captured_at)


@dataclass(frozen=True)
class CheckIn:
    """One self-report: a chosen grid cell plus the environment at that moment."""

    user_id: str
    at: datetime
    emotion: GridIndex
    env: EnvSnapshot = field(default_factory=EnvSnapshot)


# --- wire format -----------------------------------------------------------
#
# One JSON object per check-in, newline-delimited in dataset files:
#   {"user_id": "...", "at": "<RFC 3339>", "emotion": 0..63, "env": {...}}


def checkin_to_dict(c: CheckIn) -> dict:
    return {
        "user_id": c.user_id,
        "at": format_rfc3339(c.at),
        "emotion": c.emotion.to_ordinal(),
        "env": dict(c.env.values),
    }


def checkin_from_dict(d: Mapping) -> CheckIn:
    at = parse_rfc3339(d["at"])
    env = d.get("env") or {}
    if not isinstance(env, Mapping):
        raise ValueError(f"env must be a map, got {type(env).__name__}")
    values: dict[str, FactorValue] = {}
    for k, v in env.items():
        if isinstance(v, bool):
            raise ValueError(f"boolean factor value for {k!r}")
        values[k] = float(v) if isinstance(v, (int, float)) else str(v)
    return CheckIn(
        user_id=str(d["user_id"]),
        at=at,
        emotion=GridIndex.from_ordinal(int(d["emotion"])),
        env=EnvSnapshot(values=values, captured_at=at),
    )


def write_checkins(path: str | Path, checkins: Iterable[CheckIn]) -> int:
    n = 0
    with open(path, "w") as f:
        for c in checkins:
            f.write(json.dumps(checkin_to_dict(c), sort_keys=True) + "\n")
            n += 1
    return n


def read_checkins(path: str | Path) -> list[CheckIn]:
    out = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                out.append(checkin_from_dict(json.loads(line)))
    return out


def group_by_user(checkins: Iterable[CheckIn]) -> dict[str, list[CheckIn]]:
    """Split a dataset per user, each history sorted by timestamp."""
    users: dict[str, list[CheckIn]] = {}
    for c in checkins:
        users.setdefault(c.user_id, []).append(c)
    for history in users.values():
        history.sort(key=lambda c: c.at)
    return users
