"""Durable, append-only persistence with rebuildable state.

Every mutation is one JSON line in the log, fsynced before the caller gets an
acknowledgment. In-memory state (profiles, weights, source records,
idempotency acks) is a pure fold over the log: reopening the store replays it
through the same apply functions the live path uses, so a rebuild after a
crash lands on exactly the state the last acknowledged write produced. A torn
final line is detected, reported, and truncated away before new appends.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .config import EngineConfig
from .errors import OutOfOrderCheckIn, UnknownUser, UserExists
from .factors import (
    CheckIn,
    EnvSnapshot,
    FactorRegistry,
    checkin_from_dict,
    checkin_to_dict,
    default_registry,
    format_rfc3339,
    parse_rfc3339,
    validate_snapshot,
)
from .ingestion import SourceRecord, snapshot_at
from .personalization import PersonalWeights, UserProfile, process_feedback
from .predictor import Prediction, predict


@dataclass(frozen=True)
class CorruptLogEntry:
    offset: int  # byte offset of the first undecodable entry
    reason: str


class EventLog:
    """Line-delimited JSON log; appends are flushed and fsynced."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._write_lock = threading.Lock()
        self._fh = None

    def recover(self) -> tuple[list[dict], CorruptLogEntry | None]:
        """Read entries up to the first corruption; truncate the tail past it."""
        entries: list[dict] = []
        corruption = None
        if not self.path.exists():
            self.path.touch()
        data = self.path.read_bytes()
        offset = 0
        while offset < len(data):
            newline = data.find(b"\n", offset)
            if newline == -1:
                corruption = CorruptLogEntry(offset, "truncated final entry")
                break
            line = data[offset : newline]
            try:
                entry = json.loads(line)
                if not isinstance(entry, dict) or "type" not in entry:
                    raise ValueError("not an event object")
            except (ValueError, UnicodeDecodeError) as e:
                corruption = CorruptLogEntry(offset, str(e))
                break
            entries.append(entry)
            offset = newline + 1
        if corruption is not None:
            with open(self.path, "r+b") as f:
                f.truncate(corruption.offset)
        self._fh = open(self.path, "ab")
        return entries, corruption

    def append(self, entry: dict) -> None:
        line = (json.dumps(entry, sort_keys=True) + "\n").encode()
        with self._write_lock:
            self._fh.write(line)
            self._fh.flush()
            os.fsync(self._fh.fileno())

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


class Store:
    """Event-sourced user store: single writer per user, shared-nothing reads."""

    def __init__(
        self,
        path: str | Path,
        registry: FactorRegistry | None = None,
        config: EngineConfig | None = None,
    ):
        self.registry = registry or default_registry()
        self.base_config = config or EngineConfig()
        self.users: dict[str, UserProfile] = {}
        self.sources: dict[str, list[SourceRecord]] = {}
        self.acks: dict[str, dict[str, dict]] = {}  # user -> idempotency key -> ack
        self._lock = threading.RLock()
        self._user_locks: dict[str, threading.RLock] = {}
        self.log = EventLog(path)
        entries, self.corruption = self.log.recover()
        for entry in entries:
            self._apply(entry)

    # -- locking ---------------------------------------------------------

    def _user_lock(self, user_id: str) -> threading.RLock:
        with self._lock:
            if user_id not in self.users:
                raise UnknownUser(user_id)
            return self._user_locks[user_id]

    # -- event application (shared by live path and rebuild) --------------

    def _apply(self, entry: dict) -> dict | None:
        kind = entry["type"]
        if kind == "profile_created":
            profile = UserProfile(
                user_id=entry["user_id"],
                weights=PersonalWeights.for_registry(self.registry, self.base_config.w_init),
                overrides=entry.get("overrides") or None,
            )
            self.users[profile.user_id] = profile
            self.sources[profile.user_id] = []
            self.acks[profile.user_id] = {}
            self._user_locks[profile.user_id] = threading.RLock()
            return None
        if kind == "checkin_recorded":
            checkin = checkin_from_dict(entry["checkin"])
            profile = self.users[checkin.user_id]
            process_feedback(profile, checkin, self.registry, self.base_config)
            ack = {
                "user_id": checkin.user_id,
                "at": format_rfc3339(checkin.at),
                "emotion": checkin.emotion.to_ordinal(),
                "weights": profile.weights.as_dict(),
                "feedback_rounds": profile.weights.feedback_rounds,
                "history_len": len(profile.history),
            }
            key = entry.get("idempotency_key")
            if key:
                self.acks[checkin.user_id][key] = ack
            return ack
        if kind == "config_changed":
            self.users[entry["user_id"]].overrides = entry.get("overrides") or None
            return None
        if kind == "sources_added":
            records = [
                SourceRecord(
                    source_group=entry["group"],
                    observed_at=parse_rfc3339(r["observed_at"]),
                    raw={k: str(v) for k, v in r["raw"].items()},
                )
                for r in entry["records"]
            ]
            self.sources[entry["user_id"]].extend(records)
            self.sources[entry["user_id"]].sort(key=lambda r: r.observed_at)
            return None
        raise ValueError(f"unknown event type {kind!r}")

    # -- public operations -------------------------------------------------

    def create_user(self, user_id: str | None = None, overrides: dict | None = None) -> UserProfile:
        user_id = user_id or f"u-{uuid.uuid4().hex[:12]}"
        self.base_config.with_overrides(overrides)  # reject bad keys up front
        with self._lock:
            if user_id in self.users:
                raise UserExists(user_id)
            self.log.append({"type": "profile_created", "user_id": user_id, "overrides": overrides})
            self._apply({"type": "profile_created", "user_id": user_id, "overrides": overrides})
            return self.users[user_id]

    def record_checkin(
        self, user_id: str, checkin: CheckIn, idempotency_key: str | None = None
    ) -> dict:
        """Validate, persist, then fold in; duplicate keys return the cached ack."""
        with self._user_lock(user_id):
            if idempotency_key and idempotency_key in self.acks[user_id]:
                return self.acks[user_id][idempotency_key]
            profile = self.users[user_id]
            if checkin.user_id != user_id:
                raise UnknownUser(checkin.user_id)
            env = validate_snapshot(checkin.env, self.registry)
            checkin = CheckIn(user_id=user_id, at=checkin.at, emotion=checkin.emotion, env=env)
            # Everything that can fail must fail before the log append.
            profile.effective_config(self.base_config)
            if profile.history and checkin.at <= profile.history[-1].at:
                raise OutOfOrderCheckIn(
                    f"check-in at {checkin.at} is not after {profile.history[-1].at}"
                )
            entry = {
                "type": "checkin_recorded",
                "checkin": checkin_to_dict(checkin),
                "idempotency_key": idempotency_key,
            }
            self.log.append(entry)
            return self._apply(entry)

    def set_config(self, user_id: str, overrides: dict | None) -> UserProfile:
        self.base_config.with_overrides(overrides)  # validate keys/values
        with self._user_lock(user_id):
            entry = {"type": "config_changed", "user_id": user_id, "overrides": overrides}
            self.log.append(entry)
            self._apply(entry)
            return self.users[user_id]

    def add_sources(self, user_id: str, group: str, records: list[SourceRecord]) -> int:
        if group not in ("weather", "calendar", "fitness"):
            raise ValueError(f"unknown source group {group!r}")
        with self._user_lock(user_id):
            entry = {
                "type": "sources_added",
                "user_id": user_id,
                "group": group,
                "records": [
                    {"observed_at": format_rfc3339(r.observed_at), "raw": dict(r.raw)}
                    for r in records
                ],
            }
            self.log.append(entry)
            self._apply(entry)
            return len(records)

    def get_profile(self, user_id: str) -> UserProfile:
        with self._lock:
            if user_id not in self.users:
                raise UnknownUser(user_id)
            return self.users[user_id]

    def predict_for(
        self,
        user_id: str,
        snapshot: EnvSnapshot | str,
        at: datetime | None = None,
    ) -> Prediction:
        """Predict for a user; snapshot "auto" resolves from stored source records."""
        with self._user_lock(user_id):
            profile = self.users[user_id]
            if snapshot == "auto":
                at = at or datetime.now(timezone.utc)
                snapshot = snapshot_at(self.sources[user_id], at, self.registry)
            else:
                snapshot = validate_snapshot(snapshot, self.registry)
            config = profile.effective_config(self.base_config)
            # Work on a stable view; predict never mutates the profile.
            view = UserProfile(
                user_id=profile.user_id,
                history=list(profile.history),
                weights=profile.weights,
                overrides=profile.overrides,
            )
        return predict(view, snapshot, self.registry, config)

    def snapshot_state(self) -> dict:
        """Full comparable dump, for crash-consistency checks."""
        with self._lock:
            return {
                user_id: {
                    "history": [checkin_to_dict(c) for c in p.history],
                    "weights": p.weights.as_dict(),
                    "w_init": p.weights.w_init,
                    "feedback_rounds": p.weights.feedback_rounds,
                    "overrides": p.overrides,
                    "sources": [
                        {
                            "group": r.source_group,
                            "observed_at": format_rfc3339(r.observed_at),
                            "raw": dict(r.raw),
                        }
                        for r in self.sources[user_id]
                    ],
                    "acks": dict(self.acks[user_id]),
                }
                for user_id, p in self.users.items()
            }

    def close(self) -> None:
        self.log.close()
