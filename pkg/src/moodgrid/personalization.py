"""Per-user factor weights, learned from feedback.

Every ground-truth check-in doubles as a grading event: for each factor the
user just reported, the top-k most similar historical check-ins vote on an
emotion, and the factor's integer weight goes up by one if the vote landed
within tolerance of what the user actually picked, or drops to the floor
(zero by default) if it missed. Factors the user never reports are never
graded and keep their initial weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .config import EngineConfig
from .errors import EmptyCluster, InactiveFactor, OutOfOrderCheckIn, UnknownUser
from .factors import CheckIn, FactorRegistry
from .grid import GridIndex, grid_center, within_tolerance
from .similarity import SimilarityTable, retrieve


@dataclass(frozen=True)
class Cluster:
    """Top-k history positions for one factor, by descending similarity."""

    factor_id: str
    members: tuple[tuple[int, float], ...]  # (history position, weight), weight > 0


@dataclass
class PersonalWeights:
    """Nonnegative integer weight per factor, plus the update counter."""

    weights: dict[str, int] = field(default_factory=dict)
    w_init: int = 1
    feedback_rounds: int = 0

    @classmethod
    def for_registry(cls, reg: FactorRegistry, w_init: int = 1) -> "PersonalWeights":
        return cls(weights={f: w_init for f in reg.factor_ids()}, w_init=w_init)

    def get(self, factor_id: str) -> int:
        return self.weights.get(factor_id, self.w_init)

    def as_dict(self) -> dict[str, int]:
        return dict(self.weights)


@dataclass
class UserProfile:
    """Check-in history plus the personalization state for one user."""

    user_id: str
    history: list[CheckIn] = field(default_factory=list)
    weights: PersonalWeights = field(default_factory=PersonalWeights)
    overrides: dict | None = None  # per-user k/eps/theta/n_max tweaks

    def effective_config(self, base: EngineConfig) -> EngineConfig:
        return base.with_overrides(self.overrides)


def build_cluster(table: SimilarityTable, factor_id: str, k: int) -> Cluster:
    """The k history positions with the highest weight for this factor.

    Equal weights rank the more recent check-in first. Zero-weight positions
    (the factor was missing there) never enter the cluster.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not table.is_active(factor_id):
        raise InactiveFactor(factor_id)
    weights = table.factor_weights(factor_id)
    ranked = sorted(
        ((t, w) for t, w in enumerate(weights) if w > 0.0),
        key=lambda tw: (-tw[1], -tw[0]),
    )
    return Cluster(factor_id=factor_id, members=tuple(ranked[:k]))


def cluster_vote(cluster: Cluster, history: list[CheckIn]) -> GridIndex:
    """Majority emotion among cluster members.

    Ties break by larger summed similarity weight, then by the more recent
    member.
    """
    if not cluster.members:
        raise EmptyCluster(f"no members for factor {cluster.factor_id!r}")
    tally: dict[GridIndex, list] = {}  # emotion -> [count, weight sum, latest t]
    for t, w in cluster.members:
        entry = tally.setdefault(history[t].emotion, [0, 0.0, -1])
        entry[0] += 1
        entry[1] += w
        entry[2] = max(entry[2], t)
    return max(tally, key=lambda e: tuple(tally[e]))


def update_weight(
    w: int, predicted: GridIndex, actual: GridIndex, eps: float, floor: int = 0
) -> int:
    """Increment on a within-tolerance vote, reset to the floor on a miss."""
    if within_tolerance(grid_center(predicted), grid_center(actual), eps):
        return w + 1
    return floor


def process_feedback(
    profile: UserProfile,
    new_checkin: CheckIn,
    reg: FactorRegistry,
    config: EngineConfig | None = None,
) -> UserProfile:
    """Grade each reported factor against the new check-in, then append it.

    The cluster for a factor is built exactly as a prediction for the new
    snapshot would build it (from the pre-existing history only), so the vote
    is a genuine predict-then-reveal comparison. Factors absent from the new
    snapshot, or never seen in the history, are left untouched.
    """
    config = profile.effective_config(config or EngineConfig())
    if new_checkin.user_id != profile.user_id:
        raise UnknownUser(new_checkin.user_id)
    if profile.history and new_checkin.at <= profile.history[-1].at:
        raise OutOfOrderCheckIn(
            f"check-in at {new_checkin.at} is not after {profile.history[-1].at}"
        )
    if profile.history:
        table = retrieve(profile.history, new_checkin.env, reg)
        for factor_id in new_checkin.env.values:
            if not table.is_active(factor_id):
                continue
            cluster = build_cluster(table, factor_id, config.k)
            vote = cluster_vote(cluster, profile.history)
            profile.weights.weights[factor_id] = update_weight(
                profile.weights.get(factor_id),
                vote,
                new_checkin.emotion,
                config.eps,
                config.w_floor,
            )
        profile.weights.feedback_rounds += 1
    profile.history.append(new_checkin)
    return profile
