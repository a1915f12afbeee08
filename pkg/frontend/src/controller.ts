/** Session flow: selection -> submit -> panels refresh.
 *
 * At most one mutation is in flight. A rapid duplicate submit of the same
 * cell while the first is pending reuses the pending idempotency key, so the
 * service records exactly one check-in.
 */

import { ApiClient, ApiError, NetworkError } from "./api.js";
import { OfflineQueue, freshKey } from "./queue.js";
import type { CheckinAck, GridSelection, PredictionDto, WeightsDto } from "./types.js";

export interface PanelState {
  prediction: PredictionDto | null;
  weights: WeightsDto | null;
  stale: boolean; // last refresh failed; panels show old data
  queued: number;
  onboarding: boolean; // user has no history yet (service said 422)
  lastError: string | null;
}

export interface SubmitResult {
  ack: CheckinAck | null; // null when queued for later
  queued: boolean;
}

export class SessionController {
  readonly state: PanelState = {
    prediction: null,
    weights: null,
    stale: false,
    queued: 0,
    onboarding: false,
    lastError: null,
  };

  private pending: { emotion: number; key: string; done: Promise<SubmitResult> } | null = null;

  constructor(
    private api: ApiClient,
    private userId: string,
    private queue: OfflineQueue = new OfflineQueue(),
    private now: () => Date = () => new Date(),
  ) {}

  /** POST the selection; on success refresh prediction and weights so the
   * feedback effect is visible immediately. Offline: queue and report. */
  submit(selection: GridSelection): Promise<SubmitResult> {
    if (this.pending && this.pending.emotion === selection.index) {
      return this.pending.done;
    }
    const key = freshKey();
    const done = this.doSubmit(selection, key).finally(() => {
      this.pending = null;
    });
    this.pending = { emotion: selection.index, key, done };
    return done;
  }

  private async doSubmit(selection: GridSelection, key: string): Promise<SubmitResult> {
    this.queue.enqueue(this.userId, {
      at: selection.confirmedAt,
      emotion: selection.index,
      env: {},
      idempotency_key: key,
    });
    const outcome = await this.queue.flush((uid, body) => this.api.submitCheckin(uid, body));
    this.state.queued = outcome.remaining;
    const mine = outcome.sent.find((s) => s.job.body.idempotency_key === key);
    const rejected = outcome.rejected.find((r) => r.job.body.idempotency_key === key);
    if (rejected) {
      this.state.lastError = rejected.error.message;
      return { ack: null, queued: false };
    }
    if (!mine) {
      // network failure left it queued; it will replay in order later
      this.state.lastError = null;
      return { ack: null, queued: true };
    }
    this.state.lastError = null;
    await this.refresh();
    return { ack: mine.ack, queued: false };
  }

  /** Retry anything still queued (call on "online" or on a timer). */
  async retryQueued(): Promise<number> {
    const outcome = await this.queue.flush((uid, body) => this.api.submitCheckin(uid, body));
    this.state.queued = outcome.remaining;
    if (outcome.sent.length > 0) await this.refresh();
    return outcome.remaining;
  }

  /** Re-fetch both panels; failures flip the stale flag instead of clearing. */
  async refresh(): Promise<void> {
    try {
      this.state.weights = await this.api.getWeights(this.userId);
      this.state.prediction = await this.api.getPrediction(this.userId);
      this.state.stale = false;
      this.state.onboarding = false;
    } catch (e) {
      if (e instanceof ApiError && e.status === 422) {
        // no history yet: show onboarding instead of grid highlights
        this.state.prediction = null;
        this.state.onboarding = true;
        this.state.stale = false;
        return;
      }
      if (e instanceof NetworkError || e instanceof ApiError) {
        this.state.stale = true;
        return;
      }
      throw e;
    }
  }
}
