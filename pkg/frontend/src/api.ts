// Typed client for the /v1 API. Every call either resolves with the parsed
// body or rejects with ApiCallError carrying the server's error envelope.

import type {
  ActionLogWire,
  ActionWire,
  Actor,
  ApiError,
  ChallengeSpecWire,
  Design,
  EpisodeResult,
  Frame,
  IndividualWire,
  LeaderboardEntry,
  RunView,
} from "./types.js";

export class ApiCallError extends Error {
  readonly error: ApiError;

  constructor(error: ApiError) {
    super(`${error.code}: ${error.message}`);
    this.error = error;
  }

  get code(): string {
    return this.error.code;
  }
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async call<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json();
    if (!resp.ok) {
      throw new ApiCallError(payload as ApiError);
    }
    return payload as T;
  }

  challenges(): Promise<{ challenges: ChallengeSpecWire[] }> {
    return this.call("GET", "/v1/challenges");
  }

  evaluate(
    challengeId: string,
    design: Design,
    seed: number,
    frames = false,
  ): Promise<EpisodeResult> {
    return this.call("POST", "/v1/evaluate", {
      challenge_id: challengeId,
      design,
      seed,
      frames,
    });
  }

  trajectory(framesRef: string): Promise<{ frames: Frame[] }> {
    return this.call("GET", framesRef);
  }

  createSession(actor: Actor, challengeId: string): Promise<{ session_id: string }> {
    return this.call("POST", "/v1/sessions", { actor, challenge_id: challengeId });
  }

  appendAction(
    sessionId: string,
    action: ActionWire,
  ): Promise<{ seq: number; chain: Design | null }> {
    return this.call("POST", `/v1/sessions/${sessionId}/actions`, { action });
  }

  replay(sessionId: string, upto?: number): Promise<{ log: ActionLogWire; chain: Design | null }> {
    const query = upto === undefined ? "" : `?upto=${upto}`;
    return this.call("GET", `/v1/sessions/${sessionId}/replay${query}`);
  }

  createRun(challengeId: string, params?: Record<string, unknown>): Promise<{ run_id: string }> {
    return this.call("POST", "/v1/runs", { challenge_id: challengeId, params });
  }

  run(runId: string): Promise<RunView> {
    return this.call("GET", `/v1/runs/${runId}`);
  }

  advance(runId: string, generations: number): Promise<unknown> {
    return this.call("POST", `/v1/runs/${runId}/advance`, { generations });
  }

  pause(runId: string): Promise<unknown> {
    return this.call("POST", `/v1/runs/${runId}/pause`, {});
  }

  resume(runId: string): Promise<unknown> {
    return this.call("POST", `/v1/runs/${runId}/resume`, {});
  }

  stop(runId: string): Promise<unknown> {
    return this.call("POST", `/v1/runs/${runId}/stop`, {});
  }

  inject(
    runId: string,
    design: Design,
    actor: Actor,
  ): Promise<{ run_id: string; injected: IndividualWire; best: IndividualWire }> {
    return this.call("POST", `/v1/runs/${runId}/inject`, { design, actor });
  }

  leaderboard(challengeId: string): Promise<{ entries: LeaderboardEntry[] }> {
    return this.call("GET", `/v1/leaderboard/${challengeId}`);
  }

  recordScore(challengeId: string, actor: Actor, result: EpisodeResult): Promise<{ rank: number }> {
    const clean: EpisodeResult = {
      score: result.score,
      metrics: result.metrics,
      seed: result.seed,
      design_hash: result.design_hash,
    };
    return this.call("POST", `/v1/leaderboard/${challengeId}`, { actor, result: clean });
  }
}
