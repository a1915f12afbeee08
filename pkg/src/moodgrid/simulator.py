"""Synthetic users with planted environmental sensitivities.

Ground truth the engine should recover: each user's mood is a linear function
of (normalized) factor values plus optional Gaussian noise, reported as the
nearest grid cell. Missingness masks what the snapshot records, never what
drove the mood, so a sparse run of the same seed has identical moods and
timestamps as the full run and differs only in which factors were observed.
Randomness is split into independent streams (trajectories, mood noise,
missingness, schedule) for exactly that reason.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
import yaml

from .config import EngineConfig
from .evaluation import EvalReport, evaluate, model_factory
from .factors import (
    CheckIn,
    EnvSnapshot,
    FactorRegistry,
    NUMERIC,
    default_registry,
    validate_snapshot,
)
from .grid import EmotionPoint, clamp_point, nearest_cell

SIM_EPOCH = datetime(2025, 1, 6, tzinfo=timezone.utc)  # a Monday; weekday rhythm matters

# Paper-profile missingness: the availability of each consent group inverted
# into a per-check-in drop probability.
DEFAULT_MISSINGNESS = {"weather": 0.646, "calendar": 0.895, "fitness": 0.987}

# Mood contribution of categorical weather tokens, in lieu of a numeric range.
CONDITION_SCORES = {"clear": 1.0, "clouds": 0.0, "rain": -1.0, "snow": -0.5}


@dataclass(frozen=True)
class UserSpec:
    """Recipe for one synthetic user."""

    user_id: str
    seed: int
    sensitivities: dict[str, tuple[float, float]] = field(default_factory=dict)
    base_mood: EmotionPoint = EmotionPoint(50.0, 50.0)
    noise_sd: float = 0.0
    checkin_pattern: str = "consistent"  # consistent | inconsistent
    missingness: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        if self.checkin_pattern not in ("consistent", "inconsistent"):
            raise ValueError(f"unknown pattern {self.checkin_pattern!r}")
        for g, p in self.missingness.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"missingness[{g}] must be in [0,1], got {p}")


@dataclass(frozen=True)
class Scenario:
    users: tuple[UserSpec, ...]
    days: int
    registry: FactorRegistry

    def __post_init__(self):
        if self.days < 1:
            raise ValueError("days must be >= 1")


def _normalized(factor_id: str, value: float | str, reg: FactorRegistry) -> float:
    d = reg[factor_id]
    if d.kind != NUMERIC:
        return CONDITION_SCORES.get(str(value), 0.0)
    if d.canonical_range is None:
        return float(value)
    lo, hi = d.canonical_range
    return 2.0 * (float(value) - lo) / (hi - lo) - 1.0


def _weather_at(day: int, hour: float, traj: np.random.Generator) -> dict[str, float | str]:
    temp = 12.0 + 9.0 * math.sin(2 * math.pi * day / 28.0)
    temp += 4.0 * math.sin(2 * math.pi * (hour - 15.0) / 24.0)
    temp += 0.8 * traj.standard_normal()
    cloud = 50.0 + 35.0 * math.sin(2 * math.pi * day / 11.0 + 1.3) + 6.0 * traj.standard_normal()
    cloud = min(max(cloud, 0.0), 100.0)
    precip = float(traj.exponential(3.0)) if cloud > 65.0 else 0.0
    if precip > 0.2:
        condition = "snow" if temp < 0.0 else "rain"
    elif cloud > 60.0:
        condition = "clouds"
    else:
        condition = "clear"
    return {
        "temperature_c": temp,
        "precipitation_mm": precip,
        "cloud_cover_pct": cloud,
        "condition": condition,
    }


def _day_factors(day: int, prev: dict[str, float], traj: np.random.Generator) -> dict[str, float]:
    weekday = (SIM_EPOCH + timedelta(days=day)).weekday()
    lam = 5.0 if weekday < 5 else 1.0
    events = float(traj.poisson(lam))
    busy = max(0.0, 0.7 * events + 0.5 * traj.standard_normal())
    # Fitness factors follow a mean-reverting walk from yesterday's value.
    steps = 0.6 * prev.get("steps_day", 7500.0) + 0.4 * 7500.0 + 1500.0 * traj.standard_normal()
    sleep = 0.5 * prev.get("sleep_hours", 7.2) + 0.5 * 7.2 + 0.7 * traj.standard_normal()
    hr = 0.7 * prev.get("resting_hr", 62.0) + 0.3 * 62.0 + 1.5 * traj.standard_normal()
    return {
        "event_count_day": max(0.0, events),
        "busy_hours_day": min(busy, 16.0),
        "steps_day": max(0.0, steps),
        "sleep_hours": min(max(sleep, 0.0), 14.0),
        "resting_hr": min(max(hr, 35.0), 120.0),
    }


def _schedule(pattern: str, days: int, sched: np.random.Generator) -> list[list[float]]:
    """Check-in hours per day. Consistent: two a day; inconsistent: at most one
    on non-consecutive days."""
    hours: list[list[float]] = []
    prev_used = False
    for _ in range(days):
        if pattern == "consistent":
            hours.append(
                [9.0 + float(sched.uniform(-0.75, 0.75)), 18.0 + float(sched.uniform(-0.75, 0.75))]
            )
            prev_used = True
        else:
            if prev_used:
                hours.append([])
                prev_used = False
            elif sched.random() < 0.5:
                hours.append([10.0 + float(sched.uniform(0.0, 8.0))])
                prev_used = True
            else:
                hours.append([])
                prev_used = False
    return hours


def generate_checkins(
    spec: UserSpec, days: int, reg: FactorRegistry | None = None
) -> list[CheckIn]:
    """Deterministic check-in stream for one user: same spec, same bytes."""
    reg = reg or default_registry()
    ss = np.random.SeedSequence(spec.seed)
    traj, noise, miss, sched = (np.random.default_rng(c) for c in ss.spawn(4))

    group_of = {d.factor_id: d.source_group for d in reg.descriptors()}
    out: list[CheckIn] = []
    day_state: dict[str, float] = {}
    schedule = _schedule(spec.checkin_pattern, days, sched)
    for day in range(days):
        day_state = _day_factors(day, day_state, traj)
        for hour in schedule[day]:
            true_values: dict[str, float | str] = dict(day_state)
            true_values.update(_weather_at(day, hour, traj))

            att, en = spec.base_mood.attitude, spec.base_mood.energy
            for factor_id, (c_att, c_en) in spec.sensitivities.items():
                v = true_values.get(factor_id)
                if v is None:
                    continue
                norm = _normalized(factor_id, v, reg)
                att += c_att * norm
                en += c_en * norm
            att += float(noise.normal(0.0, spec.noise_sd))
            en += float(noise.normal(0.0, spec.noise_sd))
            mood = clamp_point(att, en)

            # One drop draw per group in fixed order, so the mask stream is
            # stable across different missingness settings.
            dropped = {
                g: miss.random() < spec.missingness.get(g, 0.0)
                for g in ("weather", "calendar", "fitness")
            }
            observed = {
                f: v for f, v in true_values.items() if not dropped[group_of[f]]
            }
            at = SIM_EPOCH + timedelta(days=day, hours=hour)
            snapshot = validate_snapshot(
                EnvSnapshot(values=observed, captured_at=at), reg, policy="clamp"
            )
            out.append(
                CheckIn(user_id=spec.user_id, at=at, emotion=nearest_cell(mood), env=snapshot)
            )
    return out


def generate_dataset(scenario: Scenario) -> dict[str, list[CheckIn]]:
    users: dict[str, list[CheckIn]] = {}
    for spec in scenario.users:
        users[spec.user_id] = generate_checkins(spec, scenario.days, scenario.registry)
    return users


def run_scenario(
    scenario: Scenario,
    models: list[str],
    eps: float = 13.0,
    config: EngineConfig | None = None,
    segment: str = "all",
) -> dict[str, EvalReport]:
    """Generate the scenario once and evaluate every requested model on it."""
    dataset = generate_dataset(scenario)
    reports = {}
    for name in models:
        factory = model_factory(name, scenario.registry, config)
        reports[name] = evaluate(dataset, factory, eps=eps, segment=segment, model_name=name)
    return reports


def _user_from_entry(entry: dict, index: int, scenario_seed: int) -> UserSpec:
    sens = {
        f: (float(pair[0]), float(pair[1]))
        for f, pair in (entry.get("sensitivities") or {}).items()
    }
    base = entry.get("base_mood", [50.0, 50.0])
    return UserSpec(
        user_id=str(entry.get("user_id", f"sim-{index:03d}")),
        seed=int(entry.get("seed", scenario_seed * 10_000 + index)),
        sensitivities=sens,
        base_mood=EmotionPoint(float(base[0]), float(base[1])),
        noise_sd=float(entry.get("noise_sd", 0.0)),
        checkin_pattern=entry.get("checkin_pattern", "consistent"),
        missingness=dict(entry.get("missingness") or {}),
    )


def load_scenario(path: str | Path) -> Scenario:
    """Read a scenario config (YAML; see docs/formats.md)."""
    doc = yaml.safe_load(Path(path).read_text())
    reg_spec = doc.get("registry", "default")
    reg = default_registry() if reg_spec == "default" else FactorRegistry.from_file(reg_spec)
    seed = int(doc.get("seed", 0))
    users = tuple(
        _user_from_entry(entry, i, seed) for i, entry in enumerate(doc.get("users", []))
    )
    if not users:
        raise ValueError(f"scenario {path} declares no users")
    return Scenario(users=users, days=int(doc["days"]), registry=reg)
