import json
from pathlib import Path

import pytest

from moodgrid.evaluation import evaluate, model_factory, segment_user
from moodgrid.factors import checkin_to_dict, default_registry, validate_snapshot
from moodgrid.grid import EmotionPoint
from moodgrid.simulator import (
    DEFAULT_MISSINGNESS,
    Scenario,
    UserSpec,
    generate_checkins,
    generate_dataset,
    load_scenario,
    run_scenario,
)

REG = default_registry()

PLANTED = UserSpec(
    user_id="u",
    seed=3,
    sensitivities={"temperature_c": (80.0, 60.0)},
    base_mood=EmotionPoint(41, 42),
    noise_sd=0.0,
    checkin_pattern="consistent",
)


def serialize(checkins):
    return "\n".join(json.dumps(checkin_to_dict(c), sort_keys=True) for c in checkins)


def test_same_seed_gives_identical_stream():
    a = generate_checkins(PLANTED, 20, REG)
    b = generate_checkins(PLANTED, 20, REG)
    assert serialize(a) == serialize(b)


def test_different_seed_changes_stream():
    other = UserSpec(
        user_id="u", seed=4, sensitivities={"temperature_c": (80.0, 60.0)},
        base_mood=EmotionPoint(41, 42), checkin_pattern="consistent",
    )
    assert serialize(generate_checkins(other, 20, REG)) != serialize(
        generate_checkins(PLANTED, 20, REG)
    )


def test_consistent_schedule_two_per_day():
    checkins = generate_checkins(PLANTED, 30, REG)
    assert len(checkins) == 60
    ats = [c.at for c in checkins]
    assert ats == sorted(ats)
    per_day = {}
    for c in checkins:
        per_day.setdefault(c.at.date(), 0)
        per_day[c.at.date()] += 1
    assert set(per_day.values()) == {2}


def test_inconsistent_schedule_sparse_and_non_consecutive():
    spec = UserSpec(user_id="u", seed=9, checkin_pattern="inconsistent")
    checkins = generate_checkins(spec, 120, REG)
    days = sorted({c.at.date() for c in checkins})
    assert len(days) == len(checkins)  # at most one per day
    assert all((b - a).days > 1 for a, b in zip(days, days[1:]))
    assert len(checkins) > 10


def test_full_weather_dropout_removes_all_weather_factors():
    spec = UserSpec(user_id="u", seed=5, missingness={"weather": 1.0})
    for c in generate_checkins(spec, 15, REG):
        assert not any(
            f in c.env.values
            for f in ("temperature_c", "precipitation_mm", "cloud_cover_pct", "condition")
        )


def test_missingness_rate_converges():
    spec = UserSpec(user_id="u", seed=13, missingness={"weather": 0.35, "calendar": 0.6})
    checkins = generate_checkins(spec, 550, REG)  # 1100 check-ins
    assert len(checkins) >= 1000
    dropped_weather = sum("temperature_c" not in c.env.values for c in checkins) / len(checkins)
    dropped_cal = sum("event_count_day" not in c.env.values for c in checkins) / len(checkins)
    assert dropped_weather == pytest.approx(0.35, abs=0.03)
    assert dropped_cal == pytest.approx(0.6, abs=0.03)


def test_zero_noise_mood_is_monotone_in_temperature():
    checkins = generate_checkins(PLANTED, 40, REG)
    with_temp = [(c.env.get("temperature_c"), c.emotion.col) for c in checkins]
    with_temp.sort(key=lambda p: p[0])
    cols = [col for _, col in with_temp]
    assert all(a <= b for a, b in zip(cols, cols[1:]))


def test_missingness_mask_does_not_change_moods():
    sparse_spec = UserSpec(
        user_id="u", seed=3, sensitivities={"temperature_c": (80.0, 60.0)},
        base_mood=EmotionPoint(41, 42), noise_sd=0.0,
        checkin_pattern="consistent", missingness=dict(DEFAULT_MISSINGNESS),
    )
    full = generate_checkins(PLANTED, 30, REG)
    sparse = generate_checkins(sparse_spec, 30, REG)
    assert [c.emotion for c in full] == [c.emotion for c in sparse]
    assert [c.at for c in full] == [c.at for c in sparse]


def test_generated_snapshots_validate():
    spec = UserSpec(user_id="u", seed=21, sensitivities={"steps_day": (20.0, 10.0)})
    for c in generate_checkins(spec, 20, REG):
        validate_snapshot(c.env, REG)  # must not raise


def test_generated_segments_match_pattern():
    for seed in range(10):
        con = UserSpec(user_id="c", seed=seed, checkin_pattern="consistent")
        inc = UserSpec(user_id="i", seed=seed, checkin_pattern="inconsistent")
        assert segment_user(generate_checkins(con, 10, REG)).label == "consistent"
        assert segment_user(generate_checkins(inc, 30, REG)).label == "inconsistent"


def test_scoreable_rows_count():
    scenario = Scenario(users=(PLANTED,), days=30, registry=REG)
    report = evaluate(generate_dataset(scenario), model_factory("frequency", REG))
    assert report.total_rows == 59  # 2/day for 30 days, first row unscoreable


def test_run_scenario_reports_are_comparable():
    scenario = Scenario(users=(PLANTED,), days=20, registry=REG)
    reports = run_scenario(scenario, ["mspsc", "frequency"])
    assert set(reports) == {"mspsc", "frequency"}
    assert reports["mspsc"].total_rows == reports["frequency"].total_rows == 39
    for r in reports.values():
        assert 0.0 <= r.pct_correct <= 100.0


def test_load_scenario_file():
    scenario = load_scenario(Path(__file__).resolve().parents[1] / "configs" / "planted_weather.yaml")
    assert scenario.days == 60
    assert scenario.users[0].user_id == "weather-driven"
    assert scenario.users[0].sensitivities["temperature_c"] == (80.0, 60.0)
    assert scenario.users[0].noise_sd == 0.0


def test_scenario_defaults_user_seed_from_scenario_seed(tmp_path):
    doc = "days: 5\nseed: 9\nusers:\n  - checkin_pattern: consistent\n"
    p = tmp_path / "s.yaml"
    p.write_text(doc)
    scenario = load_scenario(p)
    assert scenario.users[0].seed == 90000
    assert scenario.users[0].user_id == "sim-000"


def test_invalid_spec_rejected():
    with pytest.raises(ValueError):
        UserSpec(user_id="u", seed=1, noise_sd=-1.0)
    with pytest.raises(ValueError):
        UserSpec(user_id="u", seed=1, checkin_pattern="sometimes")
    with pytest.raises(ValueError):
        UserSpec(user_id="u", seed=1, missingness={"weather": 1.5})
