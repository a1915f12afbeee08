#!/usr/bin/env python3
"""Sweep weather dropout from 0 to 0.9 on the planted user and watch accuracy.

The mood stream is identical at every dropout level (the mask only hides
observations), so the curve isolates how the engine copes with missing data.

Usage: python scripts/sparsity_sweep.py [--days 60] [--seed 3]
"""

import argparse

from moodgrid.evaluation import model_factory, replay_user
from moodgrid.factors import default_registry
from moodgrid.grid import EmotionPoint
from moodgrid.simulator import UserSpec, generate_checkins


def top_accuracy(history, model_name, reg, burn_in=20):
    model = model_factory(model_name, reg)("u")
    rows = [r for r in replay_user("u", history, model, eps=13.0) if r.position >= burn_in]
    return 100.0 * sum(r.correct_top for r in rows) / len(rows)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--days", type=int, default=60)
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    reg = default_registry()
    print(f"{'weather dropout':>16}{'engine %':>10}{'frequency %':>13}")
    for dropout in (0.0, 0.2, 0.4, 0.646, 0.8, 0.9):
        spec = UserSpec(
            user_id="u",
            seed=args.seed,
            sensitivities={"temperature_c": (80.0, 60.0)},
            base_mood=EmotionPoint(41, 42),
            noise_sd=0.0,
            checkin_pattern="consistent",
            missingness={"weather": dropout},
        )
        history = generate_checkins(spec, args.days, reg)
        engine = top_accuracy(history, "mspsc", reg)
        freq = top_accuracy(history, "frequency", reg)
        print(f"{dropout:>16.3f}{engine:>10.1f}{freq:>13.1f}")


if __name__ == "__main__":
    main()
