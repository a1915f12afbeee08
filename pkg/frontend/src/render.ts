/** Pure view-model builders. The DOM layer in main.ts applies these verbatim;
 * keeping them DOM-free is what lets the layout be snapshot-tested. */

import { highlightRanks, layoutRows } from "./grid.js";
import type { PanelState } from "./controller.js";
import type { PredictionDto, WeightsDto } from "./types.js";

export interface CellView {
  ordinal: number;
  selected: boolean;
  rank: number | null; // 1-based candidate rank, null if not highlighted
}

export function gridView(selected: number | null, prediction: PredictionDto | null): CellView[][] {
  const ranks = prediction
    ? highlightRanks(prediction.candidates.map((c) => c.emotion))
    : new Map<number, number>();
  return layoutRows().map((row) =>
    row.map((ordinal) => ({
      ordinal,
      selected: ordinal === selected,
      rank: ranks.get(ordinal) ?? null,
    })),
  );
}

export interface PredictionView {
  rows: Array<{ rank: number; emotion: number; score: string }>;
  factorsUsed: string[];
  lowData: boolean; // modal fallback: no factor carried signal
  stale: boolean;
  onboarding: boolean;
}

export function predictionView(state: PanelState): PredictionView {
  const p = state.prediction;
  return {
    rows: (p?.candidates ?? []).map((c, i) => ({
      rank: i + 1,
      emotion: c.emotion,
      score: c.score.toPrecision(3),
    })),
    factorsUsed: p?.factors_used ?? [],
    lowData: p?.fallback ?? false,
    stale: state.stale,
    onboarding: state.onboarding,
  };
}

export interface WeightsView {
  rows: Array<{ factor: string; weight: number; active: boolean }>;
  feedbackRounds: number;
  historyLen: number;
}

export function weightsView(weights: WeightsDto | null): WeightsView {
  if (!weights) return { rows: [], feedbackRounds: 0, historyLen: 0 };
  const rows = Object.entries(weights.weights)
    .map(([factor, weight]) => ({
      factor,
      weight,
      active: weight !== weights.w_init,
    }))
    .sort((a, b) => b.weight - a.weight || a.factor.localeCompare(b.factor));
  return { rows, feedbackRounds: weights.feedback_rounds, historyLen: weights.history_len };
}
