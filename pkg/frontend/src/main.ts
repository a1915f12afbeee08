/** DOM bootstrap. All logic lives in the tested modules; this file only
 * paints view models and forwards events. */

import { ApiClient } from "./api.js";
import { loadConfig, saveConfig } from "./config.js";
import { SessionController } from "./controller.js";
import { isValidOrdinal, moveSelection, type ArrowKey } from "./grid.js";
import { OfflineQueue } from "./queue.js";
import { gridView, predictionView, weightsView } from "./render.js";

const POLL_MS = 15_000;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function boot(): Promise<void> {
  const config = loadConfig();
  const api = new ApiClient({ baseUrl: config.baseUrl, token: config.token });
  if (!config.userId) {
    const created = await api.createUser();
    config.userId = created.user_id;
    saveConfig(config);
  }
  const controller = new SessionController(
    api,
    config.userId,
    new OfflineQueue(window.localStorage),
  );

  let selected: number | null = null;
  const gridRoot = el<HTMLDivElement>("grid");
  const statusLine = el<HTMLDivElement>("status");

  function paint(): void {
    const view = gridView(selected, controller.state.prediction);
    gridRoot.replaceChildren(
      ...view.flatMap((row) =>
        row.map((cell) => {
          const button = document.createElement("button");
          button.className = "cell";
          button.dataset.ordinal = String(cell.ordinal);
          if (cell.selected) button.classList.add("selected");
          if (cell.rank !== null) {
            button.classList.add("candidate");
            const badge = document.createElement("span");
            badge.className = "rank";
            badge.textContent = String(cell.rank);
            button.appendChild(badge);
          }
          button.addEventListener("click", () => onSelect(cell.ordinal));
          return button;
        }),
      ),
    );

    const pv = predictionView(controller.state);
    el("prediction").innerHTML = pv.onboarding
      ? "<em>No history yet. Pick a cell below to start.</em>"
      : pv.rows
          .map((r) => `<div>#${r.rank} cell ${r.emotion} <small>${r.score}</small></div>`)
          .join("") || "<em>no prediction</em>";
    el("prediction-meta").textContent = [
      pv.lowData ? "low data" : "",
      pv.stale ? "stale" : "",
      pv.factorsUsed.length ? `factors: ${pv.factorsUsed.join(", ")}` : "",
    ]
      .filter(Boolean)
      .join(" · ");

    const wv = weightsView(controller.state.weights);
    el("weights").innerHTML =
      wv.rows
        .map(
          (r) =>
            `<tr class="${r.active ? "active" : ""}"><td>${r.factor}</td><td>${r.weight}</td></tr>`,
        )
        .join("") || "<tr><td colspan=2><em>none yet</em></td></tr>";
    el("weights-meta").textContent =
      `${wv.historyLen} check-ins · ${wv.feedbackRounds} feedback rounds` +
      (controller.state.queued ? ` · ${controller.state.queued} queued offline` : "");
    statusLine.textContent = controller.state.lastError ?? "";
  }

  async function onSelect(ordinal: number): Promise<void> {
    if (!isValidOrdinal(ordinal)) return;
    selected = ordinal;
    paint();
    await controller.submit({ index: ordinal, confirmedAt: new Date().toISOString() });
    paint();
  }

  document.addEventListener("keydown", (event) => {
    const keys: ArrowKey[] = ["ArrowUp", "ArrowDown", "ArrowLeft", "ArrowRight"];
    if ((keys as string[]).includes(event.key)) {
      selected = moveSelection(selected ?? 27, event.key as ArrowKey);
      paint();
      event.preventDefault();
    } else if (event.key === "Enter" && selected !== null) {
      void onSelect(selected);
    }
  });

  window.addEventListener("online", () => void controller.retryQueued().then(paint));
  setInterval(() => void controller.refresh().then(paint), POLL_MS);

  await controller.refresh();
  paint();
}

void boot();
