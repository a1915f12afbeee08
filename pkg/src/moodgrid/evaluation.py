"""Replay evaluation: accuracy within tolerance, deltas, user segmentation.

The replay walks each user's history in time order. Row t is predicted from
rows strictly before it, scored, and only then shown to the model as feedback,
so no model ever trains on its own test row. The first row of every user has
nothing to predict from and is not scored.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from datetime import timedelta
from typing import Callable, Iterable, Protocol

import numpy as np

from .config import EngineConfig
from .errors import InsufficientData
from .factors import CheckIn, EnvSnapshot, FactorRegistry, NUMERIC, group_by_user
from .grid import EmotionPoint, GridIndex, clamp_point, grid_center, nearest_cell, within_tolerance
from .personalization import PersonalWeights, UserProfile, process_feedback
from .predictor import Prediction, modal_emotion, predict

CONSISTENT = "consistent"
INCONSISTENT = "inconsistent"


@dataclass(frozen=True)
class UserSegment:
    label: str  # consistent | inconsistent


def segment_user(history: list[CheckIn]) -> UserSegment:
    """Classify a user's check-in rhythm.

    Consistent: some 7-consecutive-day window has >= 2 check-ins every day.
    Inconsistent: never more than 1 per day and no two active days adjacent.
    Histories matching neither strict rule fall back to "had any 2-a-day at
    all" as the dividing line, so every user gets exactly one label.
    """
    per_day = Counter(c.at.date() for c in history)
    heavy_days = {d for d, n in per_day.items() if n >= 2}
    for d in heavy_days:
        if all(d + timedelta(days=i) in heavy_days for i in range(7)):
            return UserSegment(CONSISTENT)
    days = sorted(per_day)
    sparse = all(n <= 1 for n in per_day.values()) and all(
        (b - a).days > 1 for a, b in zip(days, days[1:])
    )
    if sparse:
        return UserSegment(INCONSISTENT)
    return UserSegment(CONSISTENT if heavy_days else INCONSISTENT)


class ReplayModel(Protocol):
    """Stateful per-user model driven by the replay loop."""

    def predict(self, snapshot: EnvSnapshot) -> Prediction: ...

    def observe(self, checkin: CheckIn) -> None: ...


@dataclass
class RowOutcome:
    """One scored replay row."""

    user_id: str
    position: int  # index within the user's stream; position 0 is never scored
    n_candidates: int
    correct_any: bool  # some presented candidate within eps on both axes
    correct_top: bool  # the top candidate alone within eps
    delta_attitude: float  # per-axis error of the closest candidate
    delta_energy: float


@dataclass
class EvalReport:
    total_rows: int
    pct_correct: float
    n_correct: int
    avg_candidates_per_row: float
    avg_delta_energy: float
    avg_delta_attitude: float
    segment: str = "all"
    model: str = ""
    pct_correct_top: float = 0.0  # top-candidate-only accuracy

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "segment": self.segment,
            "total_rows": self.total_rows,
            "pct_correct": round(self.pct_correct, 2),
            "n_correct": self.n_correct,
            "avg_candidates_per_row": round(self.avg_candidates_per_row, 2),
            "avg_delta_energy": round(self.avg_delta_energy, 2),
            "avg_delta_attitude": round(self.avg_delta_attitude, 2),
            "pct_correct_top": round(self.pct_correct_top, 2),
        }


def _closest_candidate(pred: Prediction, actual: GridIndex) -> EmotionPoint:
    target = grid_center(actual)
    best = None
    best_d = float("inf")
    for cell, _ in pred.candidates:
        c = grid_center(cell)
        d = max(abs(c.attitude - target.attitude), abs(c.energy - target.energy))
        if d < best_d:
            best, best_d = c, d
    return best


def score_row(pred: Prediction, actual: GridIndex, eps: float) -> tuple[bool, bool, float, float]:
    target = grid_center(actual)
    correct_any = any(
        within_tolerance(grid_center(cell), target, eps) for cell, _ in pred.candidates
    )
    correct_top = within_tolerance(grid_center(pred.top), target, eps)
    closest = _closest_candidate(pred, actual)
    return (
        correct_any,
        correct_top,
        abs(closest.attitude - target.attitude),
        abs(closest.energy - target.energy),
    )


def replay_user(
    user_id: str, history: list[CheckIn], model: ReplayModel, eps: float
) -> list[RowOutcome]:
    """Predict-then-reveal over one user's time-ordered history."""
    rows: list[RowOutcome] = []
    for position, checkin in enumerate(history):
        if position > 0:
            pred = model.predict(checkin.env)
            correct_any, correct_top, d_att, d_en = score_row(pred, checkin.emotion, eps)
            rows.append(
                RowOutcome(
                    user_id=user_id,
                    position=position,
                    n_candidates=len(pred.candidates),
                    correct_any=correct_any,
                    correct_top=correct_top,
                    delta_attitude=d_att,
                    delta_energy=d_en,
                )
            )
        model.observe(checkin)
    return rows


def aggregate(rows: Iterable[RowOutcome], segment: str = "all", model: str = "") -> EvalReport:
    rows = list(rows)
    n = len(rows)
    if n == 0:
        return EvalReport(0, 0.0, 0, 0.0, 0.0, 0.0, segment=segment, model=model)
    n_correct = sum(r.correct_any for r in rows)
    return EvalReport(
        total_rows=n,
        pct_correct=100.0 * n_correct / n,
        n_correct=n_correct,
        avg_candidates_per_row=sum(r.n_candidates for r in rows) / n,
        avg_delta_energy=sum(r.delta_energy for r in rows) / n,
        avg_delta_attitude=sum(r.delta_attitude for r in rows) / n,
        segment=segment,
        model=model,
        pct_correct_top=100.0 * sum(r.correct_top for r in rows) / n,
    )


def aggregate_per_user(rows: Iterable[RowOutcome], model: str = "") -> dict[str, EvalReport]:
    """Per-user breakdown of the same row outcomes the headline report uses."""
    by_user: dict[str, list[RowOutcome]] = {}
    for r in rows:
        by_user.setdefault(r.user_id, []).append(r)
    return {u: aggregate(rs, model=model) for u, rs in sorted(by_user.items())}


def evaluate(
    dataset: list[CheckIn] | dict[str, list[CheckIn]],
    model_factory: Callable[[str], ReplayModel],
    eps: float = 13.0,
    segment: str = "all",
    model_name: str = "",
) -> EvalReport:
    """Replay every user in the dataset and aggregate one report.

    `segment` filters users by their full-history label before replay.
    """
    users = dataset if isinstance(dataset, dict) else group_by_user(dataset)
    rows: list[RowOutcome] = []
    for user_id in sorted(users):
        history = users[user_id]
        if segment != "all" and segment_user(history).label != segment:
            continue
        rows.extend(replay_user(user_id, history, model_factory(user_id), eps))
    return aggregate(rows, segment=segment, model=model_name)


# --- models ------------------------------------------------------------------


class PersonalizedModel:
    """The similarity + feedback engine, replayed per user."""

    def __init__(self, user_id: str, reg: FactorRegistry, config: EngineConfig | None = None):
        self.reg = reg
        self.config = config or EngineConfig()
        self.profile = UserProfile(
            user_id=user_id,
            weights=PersonalWeights.for_registry(reg, self.config.w_init),
        )

    def predict(self, snapshot: EnvSnapshot) -> Prediction:
        return predict(self.profile, snapshot, self.reg, self.config)

    def observe(self, checkin: CheckIn) -> None:
        process_feedback(self.profile, checkin, self.reg, self.config)


def baseline_frequency(history: list[CheckIn]) -> Prediction:
    """Single candidate: the modal historical emotion."""
    if not history:
        raise InsufficientData("frequency baseline needs at least one check-in")
    modal = modal_emotion(history)
    count = sum(1 for c in history if c.emotion == modal)
    return Prediction(
        candidates=((modal, float(count)),),
        generated_at=history[-1].at,
    )


def _numeric_matrix(
    history: list[CheckIn], snapshot: EnvSnapshot, reg: FactorRegistry
) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Mean-imputed history matrix and snapshot vector over usable numeric factors.

    A factor is usable if it was observed at least once in the history (the
    imputation mean must exist). Snapshot gaps impute with the same mean.
    """
    factor_ids = []
    cols = []
    snap = []
    for d in reg.descriptors():
        if d.kind != NUMERIC:
            continue
        observed = [
            float(c.env.get(d.factor_id))
            for c in history
            if c.env.get(d.factor_id) is not None
        ]
        if not observed:
            continue
        mean = sum(observed) / len(observed)
        col = [
            float(c.env.get(d.factor_id)) if c.env.get(d.factor_id) is not None else mean
            for c in history
        ]
        s = snapshot.get(d.factor_id)
        factor_ids.append(d.factor_id)
        cols.append(col)
        snap.append(float(s) if s is not None else mean)
    if not factor_ids:
        return [], np.zeros((len(history), 0)), np.zeros(0)
    return factor_ids, np.array(cols, dtype=float).T, np.array(snap, dtype=float)


def baseline_knn(
    history: list[CheckIn], snapshot: EnvSnapshot, k: int, reg: FactorRegistry
) -> Prediction:
    """Majority cell among the k nearest histories.

    Distance is the max over numeric factors of |diff| scaled by that factor's
    observed spread, so no single wide-ranged factor dominates.
    """
    if not history:
        raise InsufficientData("knn baseline needs at least one check-in")
    factor_ids, X, s = _numeric_matrix(history, snapshot, reg)
    if factor_ids:
        spread = X.max(axis=0) - X.min(axis=0)
        spread[spread == 0.0] = 1.0
        dist = np.abs(X - s) / spread
        d = dist.max(axis=1)
    else:
        d = np.zeros(len(history))
    order = sorted(range(len(history)), key=lambda t: (d[t], -t))
    neighbors = order[: max(1, k)]
    tally: dict[GridIndex, list] = {}
    for t in neighbors:
        entry = tally.setdefault(history[t].emotion, [0, -1])
        entry[0] += 1
        entry[1] = max(entry[1], t)
    winner = max(tally, key=lambda e: tuple(tally[e]))
    return Prediction(
        candidates=((winner, float(tally[winner][0])),),
        generated_at=history[-1].at,
        factors_used=tuple(factor_ids),
    )


def linreg_point(
    history: list[CheckIn], snapshot: EnvSnapshot, reg: FactorRegistry
) -> EmotionPoint:
    """Per-axis least-squares fit on the snapshot's numeric factors.

    Fits cell-center coordinates against factor values over the rows where
    every queried factor is present, then evaluates at the snapshot.
    """
    queried = [
        f
        for f in snapshot.present()
        if f in reg and reg[f].kind == NUMERIC and snapshot.get(f) is not None
    ]
    if not queried:
        raise InsufficientData("no numeric factors in the snapshot to regress on")
    rows = [c for c in history if all(c.env.get(f) is not None for f in queried)]
    if len(rows) < 2:
        raise InsufficientData(f"need >= 2 rows with {queried} present, have {len(rows)}")
    X = np.array([[1.0] + [float(c.env.get(f)) for f in queried] for c in rows])
    centers = [grid_center(c.emotion) for c in rows]
    x = np.array([1.0] + [float(snapshot.get(f)) for f in queried])
    beta_att, *_ = np.linalg.lstsq(X, np.array([p.attitude for p in centers]), rcond=None)
    beta_en, *_ = np.linalg.lstsq(X, np.array([p.energy for p in centers]), rcond=None)
    return clamp_point(float(x @ beta_att), float(x @ beta_en))


def baseline_linreg(
    history: list[CheckIn], snapshot: EnvSnapshot, reg: FactorRegistry
) -> Prediction:
    point = linreg_point(history, snapshot, reg)
    return Prediction(
        candidates=((nearest_cell(point), 1.0),),
        generated_at=history[-1].at,
    )


class FrequencyModel:
    def __init__(self, user_id: str):
        self.history: list[CheckIn] = []

    def predict(self, snapshot: EnvSnapshot) -> Prediction:
        return baseline_frequency(self.history)

    def observe(self, checkin: CheckIn) -> None:
        self.history.append(checkin)


class KNNModel:
    def __init__(self, user_id: str, reg: FactorRegistry, k: int = 5):
        self.history: list[CheckIn] = []
        self.reg = reg
        self.k = k

    def predict(self, snapshot: EnvSnapshot) -> Prediction:
        return baseline_knn(self.history, snapshot, self.k, self.reg)

    def observe(self, checkin: CheckIn) -> None:
        self.history.append(checkin)


class LinRegModel:
    """Least-squares baseline; rows it cannot fit fall back to the mode."""

    def __init__(self, user_id: str, reg: FactorRegistry):
        self.history: list[CheckIn] = []
        self.reg = reg

    def predict(self, snapshot: EnvSnapshot) -> Prediction:
        try:
            return baseline_linreg(self.history, snapshot, self.reg)
        except InsufficientData:
            return baseline_frequency(self.history)

    def observe(self, checkin: CheckIn) -> None:
        self.history.append(checkin)


MODEL_NAMES = ("mspsc", "frequency", "knn", "linreg")


def model_factory(
    name: str, reg: FactorRegistry, config: EngineConfig | None = None
) -> Callable[[str], ReplayModel]:
    """Factory of fresh per-user replay models, keyed by CLI model name."""
    config = config or EngineConfig()
    if name == "mspsc":
        return lambda user_id: PersonalizedModel(user_id, reg, config)
    if name == "frequency":
        return lambda user_id: FrequencyModel(user_id)
    if name == "knn":
        return lambda user_id: KNNModel(user_id, reg, k=config.k)
    if name == "linreg":
        return lambda user_id: LinRegModel(user_id, reg)
    raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")
