import json
from datetime import datetime, timedelta, timezone

import pytest
from fastapi.testclient import TestClient

from moodgrid.service import create_app
from moodgrid.store import Store

T0 = datetime(2025, 3, 1, 8, 0, tzinfo=timezone.utc)


def iso(hours):
    return (T0 + timedelta(hours=hours)).isoformat()


@pytest.fixture
def client(tmp_path):
    store = Store(tmp_path / "events.log")
    with TestClient(create_app(store)) as c:
        yield c
    store.close()


@pytest.fixture
def auth_client(tmp_path):
    store = Store(tmp_path / "events.log")
    with TestClient(create_app(store, auth_token="sekrit")) as c:
        yield c
    store.close()


def checkin_body(hours, emotion, env=None, key=None):
    body = {"at": iso(hours), "emotion": emotion, "env": env or {}}
    if key:
        body["idempotency_key"] = key
    return body


def seed_fixture_user(client, user="alice"):
    assert client.post("/v1/users", json={"user_id": user}).status_code == 201
    for h, (e, temp) in enumerate([(5, 10.0), (9, 20.0), (9, 40.0)]):
        r = client.post(
            f"/v1/users/{user}/checkins",
            json=checkin_body(h, e, {"temperature_c": temp}),
        )
        assert r.status_code == 201


def test_health_is_open(auth_client):
    r = auth_client.get("/v1/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_auth_required_when_token_configured(auth_client):
    assert auth_client.post("/v1/users", json={}).status_code == 401
    ok = auth_client.post(
        "/v1/users", json={"user_id": "a"}, headers={"Authorization": "Bearer sekrit"}
    )
    assert ok.status_code == 201


def test_create_user_and_duplicate(client):
    r = client.post("/v1/users", json={"user_id": "alice"})
    assert r.status_code == 201
    assert set(r.json()["weights"].values()) == {1}
    assert client.post("/v1/users", json={"user_id": "alice"}).status_code == 409


def test_first_checkin_acks_with_initial_weights(client):
    client.post("/v1/users", json={"user_id": "alice"})
    r = client.post("/v1/users/alice/checkins", json=checkin_body(0, 5, {"temperature_c": 10.0}))
    assert r.status_code == 201
    body = r.json()
    assert body["history_len"] == 1
    assert set(body["weights"].values()) == {1}


def test_matching_second_checkin_increments_weight(client):
    client.post("/v1/users", json={"user_id": "alice"})
    client.post("/v1/users/alice/checkins", json=checkin_body(0, 9, {"temperature_c": 20.0}))
    r = client.post("/v1/users/alice/checkins", json=checkin_body(1, 9, {"temperature_c": 21.0}))
    assert r.json()["weights"]["temperature_c"] == 2


def test_duplicate_idempotency_key_no_double_append(client):
    client.post("/v1/users", json={"user_id": "alice"})
    b = checkin_body(0, 5, {"temperature_c": 10.0}, key="abc")
    r1 = client.post("/v1/users/alice/checkins", json=b)
    r2 = client.post("/v1/users/alice/checkins", json=b)
    assert r1.json() == r2.json()
    assert client.get("/v1/users/alice/weights").json()["history_len"] == 1


def test_out_of_order_checkin_409(client):
    client.post("/v1/users", json={"user_id": "alice"})
    client.post("/v1/users/alice/checkins", json=checkin_body(5, 5))
    assert client.post("/v1/users/alice/checkins", json=checkin_body(4, 5)).status_code == 409


def test_unknown_factor_400(client):
    client.post("/v1/users", json={"user_id": "alice"})
    r = client.post("/v1/users/alice/checkins", json=checkin_body(0, 5, {"mystery": 1.0}))
    assert r.status_code == 400


def test_emotion_out_of_range_422_schema(client):
    client.post("/v1/users", json={"user_id": "alice"})
    r = client.post("/v1/users/alice/checkins", json=checkin_body(0, 64))
    assert r.status_code == 422  # body schema validation


def test_unknown_user_404(client):
    assert client.get("/v1/users/ghost/weights").status_code == 404
    assert client.get("/v1/users/ghost/prediction").status_code == 404
    assert client.post("/v1/users/ghost/checkins", json=checkin_body(0, 5)).status_code == 404


def test_prediction_with_explicit_snapshot(client):
    seed_fixture_user(client)
    snap = json.dumps({"temperature_c": 15.0})
    r = client.get("/v1/users/alice/prediction", params={"snapshot": snap})
    assert r.status_code == 200
    body = r.json()
    assert body["candidates"][0]["emotion"] == 9
    assert [c["emotion"] for c in body["candidates"]] == [9, 5]
    assert body["factors_used"] == ["temperature_c"]
    assert not body["fallback"]


def test_prediction_auto_without_sources_is_modal_fallback(client):
    seed_fixture_user(client)
    r = client.get("/v1/users/alice/prediction", params={"snapshot": "auto"})
    assert r.status_code == 200
    assert r.json()["fallback"] is True
    assert r.json()["candidates"][0]["emotion"] == 9


def test_prediction_empty_history_422(client):
    client.post("/v1/users", json={"user_id": "alice"})
    assert client.get("/v1/users/alice/prediction").status_code == 422


def test_sources_upload_feeds_auto_prediction(client):
    seed_fixture_user(client)
    now = datetime.now(timezone.utc)
    r = client.post(
        "/v1/users/alice/sources/weather",
        json={"records": [
            {"observed_at": (now - timedelta(minutes=30)).isoformat(),
             "raw": {"temperature_c": "15.0"}},
        ]},
    )
    assert r.status_code == 201
    assert r.json()["added"] == 1
    pred = client.get("/v1/users/alice/prediction", params={"snapshot": "auto"}).json()
    assert pred["fallback"] is False
    assert pred["candidates"][0]["emotion"] == 9


def test_sources_bad_group_400(client):
    client.post("/v1/users", json={"user_id": "alice"})
    r = client.post("/v1/users/alice/sources/astrology", json={"records": []})
    assert r.status_code == 400


def test_weights_endpoint_shape(client):
    seed_fixture_user(client)
    body = client.get("/v1/users/alice/weights").json()
    assert body["user_id"] == "alice"
    assert body["history_len"] == 3
    assert body["feedback_rounds"] == 2
    assert "temperature_c" in body["weights"]


def test_malformed_snapshot_param_400(client):
    seed_fixture_user(client)
    r = client.get("/v1/users/alice/prediction", params={"snapshot": "[1,2]"})
    assert r.status_code == 400
