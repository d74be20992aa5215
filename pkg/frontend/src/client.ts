/** Typed REST client for the service, plus the regenerate state machine.
 *
 * The state machine keeps the UI optimistic and race-free: at most one
 * regenerate request is in flight, the previous result stays on screen for
 * side-by-side comparison, stale responses (superseded tokens) are
 * discarded, and failures preserve the whole editing state behind an error
 * banner with retry.
 */

import type {
  EvaluateRequest,
  EvaluateResponse,
  GenerateRequest,
  GenerateResponse,
  HealthResponse,
  PredictGraphRequest,
  PredictGraphResponse,
  RetrieveRequest,
  RetrieveResponse,
} from "./types.js";

export type Fetcher = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`service returned ${status}: ${detail}`);
  }
}

export class StudioClient {
  constructor(
    readonly base: string,
    private readonly fetcher: Fetcher = (url, init) => fetch(url, init),
  ) {}

  private async post<T>(path: string, body: unknown): Promise<T> {
    const resp = await this.fetcher(`${this.base}${path}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) {
      throw new ServiceError(resp.status, await resp.text());
    }
    return (await resp.json()) as T;
  }

  async health(): Promise<HealthResponse> {
    const resp = await this.fetcher(`${this.base}/v1/health`);
    if (!resp.ok) throw new ServiceError(resp.status, await resp.text());
    return (await resp.json()) as HealthResponse;
  }

  generate(req: GenerateRequest): Promise<GenerateResponse> {
    return this.post("/v1/generate", req);
  }

  predictGraph(req: PredictGraphRequest): Promise<PredictGraphResponse> {
    return this.post("/v1/graphs/predict", req);
  }

  evaluate(req: EvaluateRequest): Promise<EvaluateResponse> {
    return this.post("/v1/evaluate", req);
  }

  retrieve(req: RetrieveRequest): Promise<RetrieveResponse> {
    return this.post("/v1/retrieve", req);
  }

  assetUrl(assetId: string): string {
    return `${this.base}/v1/assets/${assetId}`;
  }
}

export interface RegenerateState {
  /** Token of the request currently in flight, or null when idle. */
  inFlight: number | null;
  /** Monotonic token source; each request claims the next value. */
  nextToken: number;
  current: GenerateResponse | null;
  /** Result before the latest one, kept for side-by-side comparison. */
  previous: GenerateResponse | null;
  error: string | null;
}

export function idleRegenerate(): RegenerateState {
  return { inFlight: null, nextToken: 1, current: null, previous: null, error: null };
}

export type BeginResult =
  | { ok: true; state: RegenerateState; token: number }
  | { ok: false; state: RegenerateState; busy: true };

/** Claim the in-flight slot; refuses while another request is pending. */
export function beginRegenerate(state: RegenerateState): BeginResult {
  if (state.inFlight !== null) return { ok: false, state, busy: true };
  const token = state.nextToken;
  return {
    ok: true,
    token,
    state: { ...state, inFlight: token, nextToken: token + 1, error: null },
  };
}

export function resolveRegenerate(
  state: RegenerateState,
  token: number,
  response: GenerateResponse,
): RegenerateState {
  if (state.inFlight !== token) return state; // stale: a newer request owns the UI
  return {
    ...state,
    inFlight: null,
    previous: state.current,
    current: response,
    error: null,
  };
}

export function failRegenerate(
  state: RegenerateState,
  token: number,
  error: unknown,
): RegenerateState {
  if (state.inFlight !== token) return state;
  const message = error instanceof Error ? error.message : String(error);
  return { ...state, inFlight: null, error: message };
}

export function dismissError(state: RegenerateState): RegenerateState {
  return { ...state, error: null };
}

/** Fire one regenerate round trip, reporting state transitions to `update`. */
export async function runRegenerate(
  client: StudioClient,
  state: RegenerateState,
  request: GenerateRequest,
  update: (next: RegenerateState) => void,
): Promise<RegenerateState> {
  const begun = beginRegenerate(state);
  if (!begun.ok) return state;
  update(begun.state);
  let next: RegenerateState;
  try {
    const response = await client.generate(request);
    next = resolveRegenerate(begun.state, begun.token, response);
  } catch (error) {
    next = failRegenerate(begun.state, begun.token, error);
  }
  update(next);
  return next;
}
