#!/usr/bin/env python3
"""Replay the planted-weather scenario across all models and print a table.

Usage: python scripts/planted_recovery.py [--scenario configs/planted_weather.yaml]
"""

import argparse
from pathlib import Path

from moodgrid.evaluation import MODEL_NAMES
from moodgrid.simulator import load_scenario, run_scenario

ROOT = Path(__file__).resolve().parents[1]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--scenario", default=str(ROOT / "configs" / "planted_weather.yaml"))
    parser.add_argument("--eps", type=float, default=13.0)
    args = parser.parse_args()

    scenario = load_scenario(args.scenario)
    reports = run_scenario(scenario, list(MODEL_NAMES), eps=args.eps)

    header = f"{'model':<12}{'rows':>6}{'% correct':>11}{'% top':>8}{'avg cand':>10}{'d(en)':>8}{'d(att)':>8}"
    print(header)
    print("-" * len(header))
    for name, r in reports.items():
        print(
            f"{name:<12}{r.total_rows:>6}{r.pct_correct:>11.2f}{r.pct_correct_top:>8.2f}"
            f"{r.avg_candidates_per_row:>10.2f}{r.avg_delta_energy:>8.2f}{r.avg_delta_attitude:>8.2f}"
        )


if __name__ == "__main__":
    main()
