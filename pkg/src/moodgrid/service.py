"""HTTP surface for the check-in / predict / feedback loop.

Thin layer over Store: request parsing, auth, and error mapping live here;
all state transitions live in the store. Bearer-token auth guards everything
except the health probe (and is off entirely when no token is configured).
"""

from __future__ import annotations

import json
from typing import Union

from fastapi import Depends, FastAPI, Header, HTTPException, Query
from pydantic import BaseModel, Field

from .errors import (
    EmptyHistory,
    KindMismatch,
    MoodGridError,
    NoHistoryFallbackImpossible,
    OutOfOrderCheckIn,
    OutOfRange,
    UnknownFactor,
    UnknownUser,
    UserExists,
)
from .factors import CheckIn, EnvSnapshot, parse_rfc3339
from .grid import GridIndex
from .ingestion import SourceRecord
from .store import Store

_STATUS = {
    UnknownUser: 404,
    UserExists: 409,
    OutOfOrderCheckIn: 409,
    UnknownFactor: 400,
    OutOfRange: 400,
    KindMismatch: 400,
    EmptyHistory: 422,
    NoHistoryFallbackImpossible: 422,
}


def _fail(e: Exception) -> HTTPException:
    if isinstance(e, MoodGridError):
        return HTTPException(_STATUS.get(type(e), 400), detail=str(e))
    return HTTPException(400, detail=str(e))


class CreateUserBody(BaseModel):
    user_id: Union[str, None] = None
    overrides: Union[dict, None] = None


class CheckinBody(BaseModel):
    at: str
    emotion: int = Field(ge=0, le=63)
    env: dict[str, Union[float, str]] = Field(default_factory=dict)
    idempotency_key: Union[str, None] = None


class SourceRecordBody(BaseModel):
    observed_at: str
    raw: dict[str, str]


class SourcesBody(BaseModel):
    records: list[SourceRecordBody]


def create_app(store: Store, auth_token: str | None = None) -> FastAPI:
    app = FastAPI(title="moodgrid", version="0.1.0")

    def require_auth(authorization: Union[str, None] = Header(default=None)) -> None:
        if auth_token is None:
            return
        if authorization != f"Bearer {auth_token}":
            raise HTTPException(401, detail="missing or invalid bearer token")

    guarded = [Depends(require_auth)]

    @app.get("/v1/health")
    def health() -> dict:
        return {"status": "ok", "users": len(store.users)}

    @app.post("/v1/users", status_code=201, dependencies=guarded)
    def create_user(body: CreateUserBody) -> dict:
        try:
            profile = store.create_user(body.user_id, body.overrides)
        except (MoodGridError, ValueError) as e:
            raise _fail(e)
        return {
            "user_id": profile.user_id,
            "weights": profile.weights.as_dict(),
            "overrides": profile.overrides,
        }

    @app.post("/v1/users/{user_id}/checkins", status_code=201, dependencies=guarded)
    def record_checkin(user_id: str, body: CheckinBody) -> dict:
        try:
            checkin = CheckIn(
                user_id=user_id,
                at=parse_rfc3339(body.at),
                emotion=GridIndex.from_ordinal(body.emotion),
                env=EnvSnapshot(values=body.env, captured_at=parse_rfc3339(body.at)),
            )
            return store.record_checkin(user_id, checkin, body.idempotency_key)
        except (MoodGridError, ValueError) as e:
            raise _fail(e)

    @app.get("/v1/users/{user_id}/prediction", dependencies=guarded)
    def get_prediction(user_id: str, snapshot: str = Query(default="auto")) -> dict:
        try:
            if snapshot == "auto":
                pred = store.predict_for(user_id, "auto")
            else:
                values = json.loads(snapshot)
                if not isinstance(values, dict):
                    raise ValueError("snapshot must be a JSON object or 'auto'")
                pred = store.predict_for(user_id, EnvSnapshot(values=values))
            return pred.to_dict()
        except (MoodGridError, ValueError) as e:
            raise _fail(e)

    @app.get("/v1/users/{user_id}/weights", dependencies=guarded)
    def get_weights(user_id: str) -> dict:
        try:
            profile = store.get_profile(user_id)
        except MoodGridError as e:
            raise _fail(e)
        return {
            "user_id": user_id,
            "weights": profile.weights.as_dict(),
            "w_init": profile.weights.w_init,
            "feedback_rounds": profile.weights.feedback_rounds,
            "history_len": len(profile.history),
        }

    @app.post("/v1/users/{user_id}/sources/{group}", status_code=201, dependencies=guarded)
    def add_sources(user_id: str, group: str, body: SourcesBody) -> dict:
        try:
            records = [
                SourceRecord(
                    source_group=group,
                    observed_at=parse_rfc3339(r.observed_at),
                    raw=dict(r.raw),
                )
                for r in body.records
            ]
            added = store.add_sources(user_id, group, records)
        except (MoodGridError, ValueError) as e:
            raise _fail(e)
        return {"user_id": user_id, "group": group, "added": added}

    return app
