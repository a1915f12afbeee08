/** DTOs mirrored from the /v1 HTTP API. The client renders these verbatim;
 * it never derives scores or candidates on its own. */

export interface Candidate {
  emotion: number; // grid ordinal row*8 + col, 0..63
  score: number;
}

export interface PredictionDto {
  candidates: Candidate[];
  generated_at: string;
  factors_used: string[];
  fallback: boolean;
}

export interface WeightsDto {
  user_id: string;
  weights: Record<string, number>;
  w_init: number;
  feedback_rounds: number;
  history_len: number;
}

export interface CheckinAck {
  user_id: string;
  at: string;
  emotion: number;
  weights: Record<string, number>;
  feedback_rounds: number;
  history_len: number;
}

export interface CheckinBody {
  at: string;
  emotion: number;
  env: Record<string, number | string>;
  idempotency_key?: string;
}

export interface GridSelection {
  index: number; // ordinal 0..63
  confirmedAt: string;
}
