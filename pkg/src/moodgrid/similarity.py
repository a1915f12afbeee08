"""Per-factor similarity between the current snapshot and the history.

For each factor present in the snapshot, every historical check-in gets a raw
closeness score (reciprocal absolute distance for numerics, match/no-match for
categoricals), then the scores are normalized per factor so they sum to one
over the history. Check-ins that lack the factor contribute exactly zero both
before and after normalization, which is what lets sparse histories flow
through without imputation.
"""

from dataclasses import dataclass, field

from .errors import EmptyHistory, KindMismatch
from .factors import CATEGORICAL, NUMERIC, CheckIn, EnvSnapshot, FactorRegistry, FactorValue

# Reciprocal-distance regularizer: keeps exact matches finite (1e6) while
# preserving the closeness ordering everywhere else.
EPS_DIV = 1e-6


def raw_similarity(hist: FactorValue | None, current: FactorValue, kind: str) -> float:
    """Unnormalized closeness of one historical value to the current one.

    Absent history values score exactly 0. Numeric values score
    1/(|hist-current| + EPS_DIV); categorical values score as numeric
    distance 0 on equality and 1 otherwise.
    """
    if hist is None:
        return 0.0
    if kind == NUMERIC:
        if isinstance(hist, str) or isinstance(current, str):
            raise KindMismatch("<numeric factor>", NUMERIC, hist if isinstance(hist, str) else current)
        return 1.0 / (abs(float(hist) - float(current)) + EPS_DIV)
    if kind == CATEGORICAL:
        if not isinstance(hist, str) or not isinstance(current, str):
            raise KindMismatch("<categorical factor>", CATEGORICAL, hist if not isinstance(hist, str) else current)
        return 1.0 / EPS_DIV if hist == current else 1.0 / (1.0 + EPS_DIV)
    raise ValueError(f"unknown factor kind: {kind!r}")


def normalize_factor(raw: list[float]) -> list[float]:
    """Scale raw scores so they sum to 1; all-zero input stays all-zero."""
    total = sum(raw)
    if total <= 0.0:
        return [0.0] * len(raw)
    return [r / total for r in raw]


@dataclass
class SimilarityTable:
    """Normalized weights per (factor, history position).

    `weights[factor_id][t]` aligns with the history list passed to
    retrieve(). Factors whose weights are all zero (value never observed in
    the history) are inactive: they stay in the table but carry no signal.
    """

    weights: dict[str, list[float]] = field(default_factory=dict)

    def active_factors(self) -> list[str]:
        return [f for f, w in self.weights.items() if any(x > 0.0 for x in w)]

    def factor_weights(self, factor_id: str) -> list[float]:
        return self.weights[factor_id]

    def is_active(self, factor_id: str) -> bool:
        return factor_id in self.weights and any(x > 0.0 for x in self.weights[factor_id])


def retrieve(history: list[CheckIn], snapshot: EnvSnapshot, reg: FactorRegistry) -> SimilarityTable:
    """Weight every historical check-in against the current snapshot, per factor.

    Only factors present in the snapshot appear in the table; a snapshot with
    no factors yields an empty table (legal, maximal sparsity).
    """
    if not history:
        raise EmptyHistory("cannot retrieve against an empty history")
    table = SimilarityTable()
    for factor_id, current in snapshot.values.items():
        kind = reg[factor_id].kind
        try:
            raw = [raw_similarity(c.env.get(factor_id), current, kind) for c in history]
        except KindMismatch as e:
            raise KindMismatch(factor_id, e.expected, e.got) from None
        table.weights[factor_id] = normalize_factor(raw)
    return table
