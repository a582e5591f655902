// Typed client for the /v1 API. Every call either resolves with the parsed
// body or rejects with ApiCallError carrying the server's error envelope.
export class ApiCallError extends Error {
    error;
    constructor(error) {
        super(`${error.code}: ${error.message}`);
        this.error = error;
    }
    get code() {
        return this.error.code;
    }
}
export class ApiClient {
    base;
    constructor(base = "") {
        this.base = base;
    }
    async call(method, path, body) {
        const resp = await fetch(this.base + path, {
            method,
            headers: body === undefined ? undefined : { "content-type": "application/json" },
            body: body === undefined ? undefined : JSON.stringify(body),
        });
        const payload = await resp.json();
        if (!resp.ok) {
            throw new ApiCallError(payload);
        }
        return payload;
    }
    challenges() {
        return this.call("GET", "/v1/challenges");
    }
    evaluate(challengeId, design, seed, frames = false) {
        return this.call("POST", "/v1/evaluate", {
            challenge_id: challengeId,
            design,
            seed,
            frames,
        });
    }
    trajectory(framesRef) {
        return this.call("GET", framesRef);
    }
    createSession(actor, challengeId) {
        return this.call("POST", "/v1/sessions", { actor, challenge_id: challengeId });
    }
    appendAction(sessionId, action) {
        return this.call("POST", `/v1/sessions/${sessionId}/actions`, { action });
    }
    replay(sessionId, upto) {
        const query = upto === undefined ? "" : `?upto=${upto}`;
        return this.call("GET", `/v1/sessions/${sessionId}/replay${query}`);
    }
    createRun(challengeId, params) {
        return this.call("POST", "/v1/runs", { challenge_id: challengeId, params });
    }
    run(runId) {
        return this.call("GET", `/v1/runs/${runId}`);
    }
    advance(runId, generations) {
        return this.call("POST", `/v1/runs/${runId}/advance`, { generations });
    }
    pause(runId) {
        return this.call("POST", `/v1/runs/${runId}/pause`, {});
    }
    resume(runId) {
        return this.call("POST", `/v1/runs/${runId}/resume`, {});
    }
    stop(runId) {
        return this.call("POST", `/v1/runs/${runId}/stop`, {});
    }
    inject(runId, design, actor) {
        return this.call("POST", `/v1/runs/${runId}/inject`, { design, actor });
    }
    leaderboard(challengeId) {
        return this.call("GET", `/v1/leaderboard/${challengeId}`);
    }
    recordScore(challengeId, actor, result) {
        const clean = {
            score: result.score,
            metrics: result.metrics,
            seed: result.seed,
            design_hash: result.design_hash,
        };
        return this.call("POST", `/v1/leaderboard/${challengeId}`, { actor, result: clean });
    }
}
