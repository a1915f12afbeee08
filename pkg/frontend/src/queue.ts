/** Offline mutation queue with strict FIFO replay.
 *
 * The service rejects out-of-order check-ins, so replay order is load-bearing:
 * a network failure stops the flush and keeps everything queued in place,
 * while a server-side rejection (4xx) drops only the offending job and keeps
 * going. Every job carries an idempotency key, so replaying after an
 * ambiguous failure can never double-record.
 */

import { ApiError, NetworkError } from "./api.js";
import type { CheckinAck, CheckinBody } from "./types.js";

export interface QueuedJob {
  id: string;
  userId: string;
  body: CheckinBody; // always carries idempotency_key
}

export interface KeyValueStorage {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

export class MemoryStorage implements KeyValueStorage {
  private map = new Map<string, string>();
  getItem(key: string): string | null {
    return this.map.get(key) ?? null;
  }
  setItem(key: string, value: string): void {
    this.map.set(key, value);
  }
}

export interface FlushOutcome {
  sent: Array<{ job: QueuedJob; ack: CheckinAck }>;
  rejected: Array<{ job: QueuedJob; error: ApiError }>;
  remaining: number; // still queued behind a network failure
}

export type SubmitFn = (userId: string, body: CheckinBody) => Promise<CheckinAck>;

const STORAGE_KEY = "moodgrid_queue_v1";

let counter = 0;
export function freshKey(): string {
  counter += 1;
  return `${Date.now().toString(36)}-${counter.toString(36)}-${Math.random().toString(36).slice(2, 8)}`;
}

export class OfflineQueue {
  private storage: KeyValueStorage;
  private flushing = false;

  constructor(storage?: KeyValueStorage) {
    this.storage = storage ?? new MemoryStorage();
  }

  private load(): QueuedJob[] {
    const raw = this.storage.getItem(STORAGE_KEY);
    if (!raw) return [];
    try {
      return JSON.parse(raw) as QueuedJob[];
    } catch {
      return [];
    }
  }

  private save(jobs: QueuedJob[]): void {
    this.storage.setItem(STORAGE_KEY, JSON.stringify(jobs));
  }

  size(): number {
    return this.load().length;
  }

  peekAll(): QueuedJob[] {
    return this.load();
  }

  /** Returns the queued job; re-enqueueing the same idempotency key is a
   * no-op that returns the existing job (rapid double-submit guard). */
  enqueue(userId: string, body: CheckinBody): QueuedJob {
    const jobs = this.load();
    const key = body.idempotency_key;
    const existing = key
      ? jobs.find((j) => j.userId === userId && j.body.idempotency_key === key)
      : undefined;
    if (existing) return existing;
    const job: QueuedJob = { id: freshKey(), userId, body };
    jobs.push(job);
    this.save(jobs);
    return job;
  }

  /** Replay queued jobs in order. Only one flush runs at a time; concurrent
   * calls resolve empty to keep the single-writer discipline. */
  async flush(submit: SubmitFn): Promise<FlushOutcome> {
    if (this.flushing) return { sent: [], rejected: [], remaining: this.size() };
    this.flushing = true;
    const outcome: FlushOutcome = { sent: [], rejected: [], remaining: 0 };
    try {
      let jobs = this.load();
      while (jobs.length > 0) {
        const job = jobs[0]!;
        try {
          const ack = await submit(job.userId, job.body);
          outcome.sent.push({ job, ack });
        } catch (e) {
          if (e instanceof NetworkError) {
            break; // service unreachable: keep the whole tail for later
          }
          if (e instanceof ApiError) {
            outcome.rejected.push({ job, error: e });
          } else {
            throw e;
          }
        }
        jobs = jobs.slice(1);
        this.save(jobs);
      }
      outcome.remaining = jobs.length;
      return outcome;
    } finally {
      this.flushing = false;
    }
  }
}
