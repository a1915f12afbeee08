import { describe, expect, it } from "vitest";

import type { PanelState } from "../src/controller.js";
import { gridView, predictionView, weightsView } from "../src/render.js";
import type { PredictionDto, WeightsDto } from "../src/types.js";

const prediction: PredictionDto = {
  candidates: [
    { emotion: 9, score: 0.545 },
    { emotion: 5, score: 0.454 },
  ],
  generated_at: "2025-03-01T12:00:00Z",
  factors_used: ["temperature_c"],
  fallback: false,
};

function state(overrides: Partial<PanelState> = {}): PanelState {
  return {
    prediction,
    weights: null,
    stale: false,
    queued: 0,
    onboarding: false,
    lastError: null,
    ...overrides,
  };
}

describe("grid view", () => {
  it("marks candidates with rank badges at the right screen position", () => {
    const view = gridView(null, prediction);
    // ordinal 9 = col 1, row 1 -> rendered row index 6 (energy up), col 1
    expect(view[6]![1]!.ordinal).toBe(9);
    expect(view[6]![1]!.rank).toBe(1);
    // ordinal 5 = col 5, row 0 -> bottom rendered row
    expect(view[7]![5]!.ordinal).toBe(5);
    expect(view[7]![5]!.rank).toBe(2);
    const flat = view.flat();
    expect(flat.filter((c) => c.rank !== null).length).toBe(2);
  });

  it("plain grid when there is no prediction", () => {
    const view = gridView(null, null);
    expect(view.flat().every((c) => c.rank === null && !c.selected)).toBe(true);
    expect(view.length).toBe(8);
  });

  it("marks the selected cell", () => {
    const view = gridView(12, null);
    expect(view.flat().filter((c) => c.selected).map((c) => c.ordinal)).toEqual([12]);
  });
});

describe("prediction panel view", () => {
  it("shows ranked candidates with scores and factors", () => {
    const pv = predictionView(state());
    expect(pv.rows).toEqual([
      { rank: 1, emotion: 9, score: "0.545" },
      { rank: 2, emotion: 5, score: "0.454" },
    ]);
    expect(pv.factorsUsed).toEqual(["temperature_c"]);
    expect(pv.lowData).toBe(false);
  });

  it("flags the modal fallback as low data", () => {
    const pv = predictionView(
      state({ prediction: { ...prediction, fallback: true, factors_used: [] } }),
    );
    expect(pv.lowData).toBe(true);
  });

  it("carries stale and onboarding flags through", () => {
    expect(predictionView(state({ stale: true })).stale).toBe(true);
    expect(predictionView(state({ prediction: null, onboarding: true })).onboarding).toBe(true);
  });
});

describe("weights panel view", () => {
  it("sorts by weight and marks factors that moved off the init value", () => {
    const weights: WeightsDto = {
      user_id: "u",
      weights: { temperature_c: 5, sleep_hours: 1, condition: 0 },
      w_init: 1,
      feedback_rounds: 6,
      historyLen: 7,
      history_len: 7,
    } as unknown as WeightsDto;
    const wv = weightsView(weights);
    expect(wv.rows.map((r) => r.factor)).toEqual(["temperature_c", "sleep_hours", "condition"]);
    expect(wv.rows[0]!.active).toBe(true); // grew past init
    expect(wv.rows[1]!.active).toBe(false); // untouched
    expect(wv.rows[2]!.active).toBe(true); // reset to zero
    expect(wv.feedbackRounds).toBe(6);
  });

  it("renders empty without weights", () => {
    expect(weightsView(null).rows).toEqual([]);
  });
});
