/** Round-trip acceptance against a live service instance.
 *
 * Spawns the real backend (python -m moodgrid serve), drives the same modules
 * the browser uses (ApiClient + OfflineQueue + SessionController), and checks
 * that a submitted cell shows up in the weights panel and a fresh prediction,
 * and that a rapid double-submit records exactly one check-in.
 */

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { SessionController } from "../src/controller.js";
import { MemoryStorage, OfflineQueue } from "../src/queue.js";

const PORT = 18931 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;
const TOKEN = "roundtrip-test-token";

let service: ChildProcess;

async function waitForHealth(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${BASE}/v1/health`);
      if (r.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((r) => setTimeout(r, 200));
  }
  throw new Error("service did not become healthy in time");
}

beforeAll(async () => {
  const storeDir = mkdtempSync(join(tmpdir(), "moodgrid-roundtrip-"));
  service = spawn(
    "python3",
    ["-m", "moodgrid", "serve", "--addr", `127.0.0.1:${PORT}`,
     "--store", join(storeDir, "events.log"), "--token", TOKEN, "--log-level", "warning"],
    { stdio: "ignore" },
  );
  await waitForHealth();
}, 40_000);

afterAll(() => {
  service?.kill("SIGTERM");
});

describe("UI round-trip against the live service", () => {
  const api = new ApiClient({ baseUrl: BASE, token: TOKEN });

  it("submit -> weights panel reflects it -> fresh prediction highlights it", async () => {
    const { user_id } = await api.createUser();
    const controller = new SessionController(api, user_id, new OfflineQueue(new MemoryStorage()));

    await controller.refresh();
    expect(controller.state.onboarding).toBe(true); // empty history: 422 path

    const first = await controller.submit({
      index: 9,
      confirmedAt: new Date(Date.now() - 60_000).toISOString(),
    });
    expect(first.queued).toBe(false);
    expect(first.ack?.history_len).toBe(1);
    expect(controller.state.weights?.history_len).toBe(1);
    expect(controller.state.onboarding).toBe(false);

    const second = await controller.submit({
      index: 10,
      confirmedAt: new Date().toISOString(),
    });
    expect(second.ack?.history_len).toBe(2);

    // weights panel shows the feedback effect of the second check-in
    expect(controller.state.weights?.feedback_rounds).toBe(1);
    // fresh prediction arrived and highlights a real cell
    const prediction = controller.state.prediction;
    expect(prediction).not.toBeNull();
    expect(prediction!.candidates.length).toBeGreaterThan(0);
    expect(prediction!.candidates[0]!.emotion).toBeGreaterThanOrEqual(0);
    expect(prediction!.candidates[0]!.emotion).toBeLessThan(64);
  }, 20_000);

  it("duplicate double-submit records exactly one check-in", async () => {
    const { user_id } = await api.createUser();
    const controller = new SessionController(api, user_id, new OfflineQueue(new MemoryStorage()));
    const at = new Date().toISOString();

    const [a, b] = await Promise.all([
      controller.submit({ index: 27, confirmedAt: at }),
      controller.submit({ index: 27, confirmedAt: at }),
    ]);
    expect(a.ack).toEqual(b.ack);

    const weights = await api.getWeights(user_id);
    expect(weights.history_len).toBe(1);
  }, 20_000);

  it("server-assigned idempotency also dedupes an explicit replay", async () => {
    const { user_id } = await api.createUser();
    const body = {
      at: new Date().toISOString(),
      emotion: 5,
      env: { temperature_c: 12.0 },
      idempotency_key: "fixed-key-1",
    };
    const ack1 = await api.submitCheckin(user_id, body);
    const ack2 = await api.submitCheckin(user_id, body);
    expect(ack1).toEqual(ack2);
    expect((await api.getWeights(user_id)).history_len).toBe(1);
  }, 20_000);
});
