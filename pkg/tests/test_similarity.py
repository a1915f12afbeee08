from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from moodgrid.errors import EmptyHistory, KindMismatch
from moodgrid.factors import CheckIn, EnvSnapshot, default_registry
from moodgrid.grid import GridIndex
from moodgrid.similarity import EPS_DIV, normalize_factor, raw_similarity, retrieve

T0 = datetime(2025, 3, 1, tzinfo=timezone.utc)
REG = default_registry()


def mk_history(temps, emotions=None):
    emotions = emotions or [5] * len(temps)
    out = []
    for t, (temp, e) in enumerate(zip(temps, emotions)):
        values = {} if temp is None else {"temperature_c": float(temp)}
        out.append(
            CheckIn("u", T0 + timedelta(hours=t), GridIndex.from_ordinal(e), EnvSnapshot(values=values))
        )
    return out


def test_raw_similarity_numeric():
    # 1/(|20-15| + 1e-6)
    assert raw_similarity(20.0, 15.0, "numeric") == pytest.approx(0.2, rel=1e-5)


def test_raw_similarity_missing_history_is_exactly_zero():
    assert raw_similarity(None, 15.0, "numeric") == 0.0
    assert raw_similarity(None, "rain", "categorical") == 0.0


def test_raw_similarity_categorical():
    assert raw_similarity("rain", "rain", "categorical") == 1.0 / EPS_DIV
    assert raw_similarity("snow", "rain", "categorical") == pytest.approx(1.0, rel=1e-5)


def test_raw_similarity_kind_mismatch():
    with pytest.raises(KindMismatch):
        raw_similarity("rain", 15.0, "numeric")
    with pytest.raises(KindMismatch):
        raw_similarity(3.0, "rain", "categorical")


def test_normalize_factor_frozen_example():
    out = normalize_factor([0.2, 0.2, 0.04])
    assert out == pytest.approx([5 / 11, 5 / 11, 1 / 11])
    assert sum(out) == pytest.approx(1.0, abs=1e-12)


def test_normalize_factor_all_zero_stays_zero():
    assert normalize_factor([0.0, 0.0, 0.0]) == [0.0, 0.0, 0.0]


def test_normalize_factor_singleton():
    assert normalize_factor([5.0]) == [1.0]


def test_retrieve_three_checkin_fixture():
    history = mk_history([10, 20, 40], emotions=[5, 9, 9])
    table = retrieve(history, EnvSnapshot(values={"temperature_c": 15.0}), REG)
    w = table.factor_weights("temperature_c")
    assert w == pytest.approx([5 / 11, 5 / 11, 1 / 11], rel=1e-4)
    assert table.active_factors() == ["temperature_c"]


def test_retrieve_empty_snapshot_gives_empty_table():
    table = retrieve(mk_history([10, 20]), EnvSnapshot(), REG)
    assert table.weights == {}
    assert table.active_factors() == []


def test_retrieve_missing_row_gets_zero_and_rest_renormalizes():
    history = mk_history([10, None, 40])
    table = retrieve(history, EnvSnapshot(values={"temperature_c": 15.0}), REG)
    w = table.factor_weights("temperature_c")
    assert w[1] == 0.0
    assert sum(w) == pytest.approx(1.0, abs=1e-9)
    assert w[0] > w[2]


def test_retrieve_factor_absent_from_all_history_is_inactive():
    history = mk_history([None, None])
    table = retrieve(history, EnvSnapshot(values={"temperature_c": 15.0}), REG)
    assert table.factor_weights("temperature_c") == [0.0, 0.0]
    assert not table.is_active("temperature_c")


def test_retrieve_empty_history_raises():
    with pytest.raises(EmptyHistory):
        retrieve([], EnvSnapshot(values={"temperature_c": 15.0}), REG)


@st.composite
def history_and_snapshot(draw):
    n = draw(st.integers(min_value=1, max_value=12))
    history = []
    for t in range(n):
        values = {}
        if draw(st.booleans()):
            values["temperature_c"] = draw(st.floats(-40, 50, allow_nan=False))
        if draw(st.booleans()):
            values["sleep_hours"] = draw(st.floats(0, 24, allow_nan=False))
        if draw(st.booleans()):
            values["condition"] = draw(st.sampled_from(["clear", "clouds", "rain"]))
        history.append(
            CheckIn(
                "u",
                T0 + timedelta(hours=t),
                GridIndex.from_ordinal(draw(st.integers(0, 63))),
                EnvSnapshot(values=values),
            )
        )
    snapshot = EnvSnapshot(
        values={
            "temperature_c": draw(st.floats(-40, 50, allow_nan=False)),
            "sleep_hours": draw(st.floats(0, 24, allow_nan=False)),
            "condition": draw(st.sampled_from(["clear", "clouds", "rain"])),
        }
    )
    return history, snapshot


@given(history_and_snapshot())
def test_active_factor_weights_sum_to_one(case):
    history, snapshot = case
    table = retrieve(history, snapshot, REG)
    for factor_id in table.active_factors():
        assert sum(table.factor_weights(factor_id)) == pytest.approx(1.0, abs=1e-9)


@given(history_and_snapshot())
def test_missing_history_rows_weigh_exactly_zero(case):
    history, snapshot = case
    table = retrieve(history, snapshot, REG)
    for factor_id, weights in table.weights.items():
        for t, w in enumerate(weights):
            if history[t].env.get(factor_id) is None:
                assert w == 0.0


@given(
    st.floats(-40, 50, allow_nan=False),
    st.floats(-40, 50, allow_nan=False),
    st.floats(-40, 50, allow_nan=False),
)
def test_locality_strict_monotonicity(cur, a, b):
    # distance gaps far below the 1e-6 regularizer are not resolvable in
    # float; require a gap the reciprocal can actually see
    if abs(b - cur) - abs(a - cur) > 1e-9:
        assert raw_similarity(a, cur, "numeric") > raw_similarity(b, cur, "numeric")


@given(history_and_snapshot())
def test_exact_match_dominates(case):
    history, snapshot = case
    table = retrieve(history, snapshot, REG)
    for factor_id, weights in table.weights.items():
        current = snapshot.get(factor_id)
        for t, w in enumerate(weights):
            if history[t].env.get(factor_id) == current:
                assert w >= max(weights) - 1e-15
