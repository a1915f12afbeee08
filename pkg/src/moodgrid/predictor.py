"""Ranked emotion prediction from history, snapshot, and learned weights.

The score of a cell is the weight-scaled similarity mass of the history rows
that reported it: score(e) = sum over active factors i and rows t of
w_i * z[i][t] * [row t's emotion == e]. Scores are relative, not calibrated;
scaling every factor weight by the same positive constant changes no ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone

from .config import EngineConfig
from .errors import EmptyHistory, NoHistoryFallbackImpossible
from .factors import CheckIn, EnvSnapshot, FactorRegistry
from .grid import GridIndex
from .personalization import PersonalWeights, UserProfile
from .similarity import SimilarityTable, retrieve

# Score attached to the modal-emotion fallback candidate, which has no real
# similarity mass behind it. Recognizably tiny; clients badge on `fallback`.
FALLBACK_SCORE = 1e-12


@dataclass(frozen=True)
class Prediction:
    """Ranked candidate cells. Scores strictly positive and non-increasing."""

    candidates: tuple[tuple[GridIndex, float], ...]
    generated_at: datetime
    factors_used: tuple[str, ...] = ()
    fallback: bool = False

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("a prediction carries at least one candidate")
        cells = [c for c, _ in self.candidates]
        if len(set(cells)) != len(cells):
            raise ValueError("candidates must be distinct")
        scores = [s for _, s in self.candidates]
        if any(s <= 0 for s in scores):
            raise ValueError("candidate scores must be positive")
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise ValueError("candidate scores must be non-increasing")

    @property
    def top(self) -> GridIndex:
        return self.candidates[0][0]

    def to_dict(self) -> dict:
        return {
            "candidates": [
                {"emotion": c.to_ordinal(), "score": s} for c, s in self.candidates
            ],
            "generated_at": self.generated_at.isoformat(),
            "factors_used": list(self.factors_used),
            "fallback": self.fallback,
        }


def score_emotions(
    table: SimilarityTable, history: list[CheckIn], weights: PersonalWeights
) -> dict[GridIndex, float]:
    """Score every emotion observed in the history; unobserved cells are omitted."""
    if not history:
        raise EmptyHistory("cannot score without history")
    scores: dict[GridIndex, float] = {}
    for c in history:
        scores.setdefault(c.emotion, 0.0)
    for factor_id in table.weights:
        w = weights.get(factor_id)
        if w == 0:
            continue
        for t, z in enumerate(table.factor_weights(factor_id)):
            if z > 0.0:
                scores[history[t].emotion] += w * z
    return scores


def modal_emotion(history: list[CheckIn]) -> GridIndex:
    """Most frequent historical cell; ties go to the most recently reported."""
    if not history:
        raise NoHistoryFallbackImpossible("no history to take a mode over")
    tally: dict[GridIndex, list] = {}
    for t, c in enumerate(history):
        entry = tally.setdefault(c.emotion, [0, -1])
        entry[0] += 1
        entry[1] = t
    return max(tally, key=lambda e: tuple(tally[e]))


def select_candidates(
    scores: dict[GridIndex, float],
    history: list[CheckIn],
    theta: float = 0.8,
    n_max: int = 5,
    factors_used: tuple[str, ...] = (),
    generated_at: datetime | None = None,
) -> Prediction:
    """Keep cells scoring at least theta * best, best first, capped at n_max.

    Score ties rank the cell reported more recently first. Empty or all-zero
    scores fall back to the modal historical emotion as a single low-signal
    candidate.
    """
    if generated_at is None:
        generated_at = datetime.now(timezone.utc)
    best = max(scores.values(), default=0.0)
    if best <= 0.0:
        return Prediction(
            candidates=((modal_emotion(history), FALLBACK_SCORE),),
            generated_at=generated_at,
            factors_used=(),
            fallback=True,
        )
    last_seen = {c.emotion: t for t, c in enumerate(history)}
    kept = [(e, s) for e, s in scores.items() if s > 0.0 and s >= theta * best]
    kept.sort(key=lambda es: (-es[1], -last_seen.get(es[0], -1)))
    return Prediction(
        candidates=tuple(kept[:n_max]),
        generated_at=generated_at,
        factors_used=tuple(factors_used),
    )


def predict(
    profile: UserProfile,
    snapshot: EnvSnapshot,
    reg: FactorRegistry,
    config: EngineConfig | None = None,
) -> Prediction:
    """retrieve -> score -> select. Deterministic for fixed inputs and config."""
    config = profile.effective_config(config or EngineConfig())
    table = retrieve(profile.history, snapshot, reg)
    scores = score_emotions(table, profile.history, profile.weights)
    return select_candidates(
        scores,
        profile.history,
        theta=config.theta,
        n_max=config.n_max,
        factors_used=tuple(table.active_factors()),
        generated_at=snapshot.captured_at,
    )
