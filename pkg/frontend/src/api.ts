/** Typed client for the /v1 API. Base URL and token are the only settings. */

import type { CheckinAck, CheckinBody, PredictionDto, WeightsDto } from "./types.js";

export interface ApiConfig {
  baseUrl: string;
  token?: string;
  fetchFn?: typeof fetch;
}

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/** Network-level failure (server unreachable); retryable, unlike ApiError. */
export class NetworkError extends Error {}

export class ApiClient {
  private baseUrl: string;
  private token?: string;
  private fetchFn: typeof fetch;

  constructor(config: ApiConfig) {
    this.baseUrl = config.baseUrl.replace(/\/+$/, "");
    this.token = config.token;
    this.fetchFn = config.fetchFn ?? fetch;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "content-type": "application/json" };
    if (this.token) headers["authorization"] = `Bearer ${this.token}`;
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}${path}`, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (e) {
      throw new NetworkError(e instanceof Error ? e.message : String(e));
    }
    const text = await response.text();
    if (!response.ok) {
      let detail = text;
      try {
        detail = JSON.parse(text).detail ?? text;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, String(detail));
    }
    return JSON.parse(text) as T;
  }

  health(): Promise<{ status: string; users: number }> {
    return this.request("GET", "/v1/health");
  }

  createUser(userId?: string): Promise<{ user_id: string }> {
    return this.request("POST", "/v1/users", { user_id: userId ?? null });
  }

  submitCheckin(userId: string, body: CheckinBody): Promise<CheckinAck> {
    return this.request("POST", `/v1/users/${encodeURIComponent(userId)}/checkins`, body);
  }

  getPrediction(userId: string, snapshot: "auto" | Record<string, number | string> = "auto"): Promise<PredictionDto> {
    const param = snapshot === "auto" ? "auto" : JSON.stringify(snapshot);
    return this.request(
      "GET",
      `/v1/users/${encodeURIComponent(userId)}/prediction?snapshot=${encodeURIComponent(param)}`,
    );
  }

  getWeights(userId: string): Promise<WeightsDto> {
    return this.request("GET", `/v1/users/${encodeURIComponent(userId)}/weights`);
  }
}
