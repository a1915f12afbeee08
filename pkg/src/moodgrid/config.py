"""Engine tuning knobs, shared by personalization, prediction, and the service."""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class EngineConfig:
    k: int = 5  # cluster size for the per-factor majority vote
    eps: float = 13.0  # per-axis tolerance; spans one cell pitch on the 0..100 scale
    theta: float = 0.8  # keep candidates scoring >= theta * best
    n_max: int = 5  # cap on presented candidates
    w_init: int = 1  # fresh-factor weight; 1 reduces a new user to the unpersonalized vote
    w_floor: int = 0  # value a missed vote resets to; 0 is the faithful behavior

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.eps < 0:
            raise ValueError("eps must be >= 0")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must be in (0, 1]")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.w_init < 0 or self.w_floor < 0:
            raise ValueError("weights are nonnegative")

    def with_overrides(self, overrides: dict | None) -> "EngineConfig":
        """Apply per-user overrides (unknown keys rejected)."""
        if not overrides:
            return self
        allowed = {"k", "eps", "theta", "n_max", "w_init", "w_floor"}
        bad = set(overrides) - allowed
        if bad:
            raise ValueError(f"unknown config overrides: {sorted(bad)}")
        return replace(self, **overrides)
