"""HTTP/JSON service: the single contract the web UI and clients consume.

Endpoints under /v1 expose the challenge catalog, design evaluation, session
logging with replay, evolutionary run control (create / advance-by-N /
pause / resume / inject), the diversity archive, and the human-vs-agent
leaderboard. Runs advance asynchronously; progress is polled via GET, and a
generation is applied atomically under the run's lock so a poll never sees a
half-applied generation.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import evolve
from .challenges import (
    ChallengeId,
    ChallengeSpec,
    default_specs,
    result_to_wire,
    run_episode,
    spec_to_wire,
)
from .evolve import (
    EvoParams,
    IllegalTransitionError,
    RunCommand,
    RunDoneError,
    RunState,
    RunStatus,
    run_state_from_wire,
    run_state_to_wire,
)
from .shapes import ChainError
from .store import (
    InvalidActionError,
    SeqOutOfRangeError,
    SessionStore,
    StoreError,
    UnknownRunError,
    UnknownSessionError,
)
from .wire import (
    WireError,
    actor_from_wire,
    actor_to_wire,
    design_from_wire,
    design_to_wire,
    log_to_wire,
)

ERROR_CODES = {
    "invalid_request": 400,
    "invalid_design": 400,
    "invalid_action": 400,
    "invalid_params": 400,
    "seq_out_of_range": 400,
    "unknown_challenge": 404,
    "unknown_session": 404,
    "unknown_run": 404,
    "unknown_trajectory": 404,
    "run_done": 409,
    "illegal_transition": 409,
    "internal": 500,
}


class ApiException(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.http_status = ERROR_CODES[code]
        self.message = message

    def body(self) -> dict:
        return {"code": self.code, "message": self.message, "http_status": self.http_status}


@dataclass
class ManagedRun:
    state: RunState
    lock: threading.Lock = field(default_factory=threading.Lock)
    pending_generations: int = 0
    worker: Optional[threading.Thread] = None


class RunManager:
    """Owns live evolutionary runs: one lock and at most one worker per run."""

    def __init__(self, store: SessionStore):
        self.store = store
        self._runs: dict[str, ManagedRun] = {}
        self._registry_lock = threading.Lock()

    def create(self, challenge: ChallengeSpec, params: EvoParams) -> RunState:
        state = evolve.init_run(challenge, params)
        managed = ManagedRun(state=state)
        with self._registry_lock:
            self._runs[state.run_id] = managed
        self.store.save_run(state.run_id, run_state_to_wire(state))
        return state

    def get(self, run_id: str) -> ManagedRun:
        with self._registry_lock:
            managed = self._runs.get(run_id)
        if managed is None:
            # runs created by other processes (e.g. the CLI) are adoptable
            try:
                state = run_state_from_wire(self.store.load_run(run_id))
            except UnknownRunError:
                raise ApiException("unknown_run", f"no run {run_id!r}")
            with self._registry_lock:
                managed = self._runs.setdefault(run_id, ManagedRun(state=state))
        return managed

    def _persist(self, managed: ManagedRun) -> None:
        self.store.save_run(managed.state.run_id, run_state_to_wire(managed.state))

    def advance(self, run_id: str, generations: int) -> dict:
        managed = self.get(run_id)
        with managed.lock:
            if managed.state.status is RunStatus.DONE:
                raise ApiException("run_done", "run is done")
            managed.pending_generations += generations
            self._ensure_worker(managed)
            return self.view_summary(managed)

    def _ensure_worker(self, managed: ManagedRun) -> None:
        # caller holds managed.lock
        if managed.worker is not None and managed.worker.is_alive():
            return
        if managed.state.status is not RunStatus.RUNNING:
            return

        def work() -> None:
            while True:
                with managed.lock:
                    if (
                        managed.pending_generations <= 0
                        or managed.state.status is not RunStatus.RUNNING
                    ):
                        return
                    evolve.next_generation(managed.state)
                    managed.pending_generations -= 1
                    self._persist(managed)

        managed.worker = threading.Thread(target=work, daemon=True)
        managed.worker.start()

    def control(self, run_id: str, command: RunCommand) -> dict:
        managed = self.get(run_id)
        with managed.lock:
            try:
                evolve.run_control(managed.state, command)
            except IllegalTransitionError as exc:
                raise ApiException("illegal_transition", str(exc))
            if command is RunCommand.RESUME:
                self._ensure_worker(managed)
            self._persist(managed)
            return self.view_summary(managed)

    def inject(self, run_id: str, design, actor) -> dict:
        managed = self.get(run_id)
        with managed.lock:
            try:
                evolve.inject(managed.state, design, actor)
            except RunDoneError as exc:
                raise ApiException("run_done", str(exc))
            injected = next(
                i for i in managed.state.population if i.origin is evolve.Origin.INJECTED
            )
            self._persist(managed)
            return {
                "run_id": run_id,
                "injected": individual_view(injected),
                "best": individual_view(managed.state.best_ever),
            }

    def view_summary(self, managed: ManagedRun) -> dict:
        return {
            "run_id": managed.state.run_id,
            "status": managed.state.status.value,
            "generation": managed.state.generation,
            "pending_generations": managed.pending_generations,
        }

    def view(self, run_id: str) -> dict:
        managed = self.get(run_id)
        with managed.lock:
            state = managed.state
            return {
                "run_id": state.run_id,
                "challenge_id": state.challenge.id.value,
                "status": state.status.value,
                "generation": state.generation,
                "pending_generations": managed.pending_generations,
                "params": evolve.params_to_wire(state.params),
                "population": [individual_view(i) for i in state.population],
                "best": individual_view(state.best_ever),
                "archive": [individual_view(i) for i in state.archive],
                "history": [[b, m] for b, m in state.history],
            }


def individual_view(ind: evolve.Individual) -> dict:
    return {
        "genotype": design_to_wire(ind.genotype),
        "fitness": ind.fitness,
        "origin": ind.origin.value,
        "genotype_hash": ind.genotype_hash,
        "injected_by": None if ind.injected_by is None else actor_to_wire(ind.injected_by),
    }


def api_schema() -> dict:
    with resources.files("coevo.schemas").joinpath("api.schema.json").open() as fh:
        return json.load(fh)


def create_app(
    data_dir: str | Path,
    ui_dir: Optional[str | Path] = None,
    max_concurrent_evaluations: Optional[int] = None,
) -> FastAPI:
    store = SessionStore(data_dir)
    runs = RunManager(store)
    specs = default_specs()
    eval_slots = threading.Semaphore(max_concurrent_evaluations or os.cpu_count() or 4)
    session_locks: dict[str, threading.Lock] = {}
    session_locks_guard = threading.Lock()

    app = FastAPI(title="coevo", version="0.1.0")

    def session_lock(session_id: str) -> threading.Lock:
        with session_locks_guard:
            return session_locks.setdefault(session_id, threading.Lock())

    def lookup_spec(challenge_id: str) -> ChallengeSpec:
        try:
            return specs[ChallengeId(challenge_id)]
        except ValueError:
            raise ApiException("unknown_challenge", f"no challenge {challenge_id!r}")

    def parse_design(data: Any):
        try:
            return design_from_wire(data)
        except WireError as exc:
            raise ApiException("invalid_design", str(exc))

    def parse_actor(data: Any):
        try:
            return actor_from_wire(data)
        except WireError as exc:
            raise ApiException("invalid_request", str(exc))

    @app.exception_handler(ApiException)
    async def api_error_handler(_req: Request, exc: ApiException):
        return JSONResponse(status_code=exc.http_status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def validation_handler(_req: Request, exc: RequestValidationError):
        err = ApiException("invalid_request", str(exc.errors()[:1]))
        return JSONResponse(status_code=err.http_status, content=err.body())

    @app.exception_handler(Exception)
    async def fallback_handler(_req: Request, exc: Exception):
        err = ApiException("internal", f"{type(exc).__name__}: {exc}")
        return JSONResponse(status_code=err.http_status, content=err.body())

    @app.get("/v1/challenges")
    def list_challenges() -> dict:
        return {"challenges": [spec_to_wire(s) for s in specs.values()]}

    @app.get("/v1/schema")
    def schema() -> dict:
        return api_schema()

    @app.post("/v1/evaluate")
    def evaluate(body: dict) -> dict:
        spec = lookup_spec(str(body.get("challenge_id")))
        design = parse_design(body.get("design"))
        seed = int(body.get("seed", 0))
        capture = bool(body.get("frames", False))
        with eval_slots:
            result = run_episode(spec, design, seed, capture_frames=capture)
        frames_ref = None
        if capture and result.frames is not None:
            traj_id = store.save_trajectory(result.frames)
            frames_ref = f"/v1/trajectories/{traj_id}"
        return result_to_wire(result, frames_ref=frames_ref)

    @app.get("/v1/trajectories/{traj_id}")
    def trajectory(traj_id: str) -> dict:
        try:
            return {"frames": store.load_trajectory(traj_id)}
        except StoreError:
            raise ApiException("unknown_trajectory", f"no trajectory {traj_id!r}")

    @app.post("/v1/sessions")
    def create_session(body: dict) -> dict:
        actor = parse_actor(body.get("actor"))
        challenge_id = str(body.get("challenge_id"))
        lookup_spec(challenge_id)
        return {"session_id": store.create_session(actor, challenge_id)}

    @app.post("/v1/sessions/{session_id}/actions")
    def append_action(session_id: str, body: dict) -> dict:
        from .wire import action_from_wire

        try:
            action = action_from_wire(body.get("action"))
        except WireError as exc:
            raise ApiException("invalid_action", str(exc))
        with session_lock(session_id):
            try:
                record = store.load_session(session_id)
                seq, chain = store.append_action(session_id, action, record.actor)
            except UnknownSessionError as exc:
                raise ApiException("unknown_session", str(exc))
            except InvalidActionError as exc:
                raise ApiException("invalid_action", str(exc))
        return {
            "seq": seq,
            "chain": None if chain is None else design_to_wire(chain),
        }

    @app.get("/v1/sessions/{session_id}/replay")
    def session_replay(session_id: str, upto: Optional[int] = None) -> dict:
        try:
            log, chain = store.get_replay(session_id, upto)
        except UnknownSessionError as exc:
            raise ApiException("unknown_session", str(exc))
        except SeqOutOfRangeError as exc:
            raise ApiException("seq_out_of_range", str(exc))
        return {
            "log": log_to_wire(log),
            "chain": None if chain is None else design_to_wire(chain),
        }

    @app.post("/v1/runs")
    def create_run(body: dict) -> dict:
        spec = lookup_spec(str(body.get("challenge_id")))
        raw = dict(body.get("params") or {})
        if "master_seed" not in raw:
            raw["master_seed"] = int.from_bytes(os.urandom(4), "big")
        try:
            params = evolve.params_from_wire(raw)
        except (evolve.InvalidParamsError, KeyError, TypeError, ValueError) as exc:
            raise ApiException("invalid_params", str(exc))
        state = runs.create(spec, params)
        return {"run_id": state.run_id}

    @app.get("/v1/runs/{run_id}")
    def run_view(run_id: str) -> dict:
        return runs.view(run_id)

    @app.post("/v1/runs/{run_id}/advance", status_code=202)
    def run_advance(run_id: str, body: dict) -> dict:
        generations = int(body.get("generations", 1))
        if generations < 1:
            raise ApiException("invalid_params", "generations must be >= 1")
        return runs.advance(run_id, generations)

    @app.post("/v1/runs/{run_id}/pause")
    def run_pause(run_id: str) -> dict:
        return runs.control(run_id, RunCommand.PAUSE)

    @app.post("/v1/runs/{run_id}/resume")
    def run_resume(run_id: str) -> dict:
        return runs.control(run_id, RunCommand.RESUME)

    @app.post("/v1/runs/{run_id}/stop")
    def run_stop(run_id: str) -> dict:
        return runs.control(run_id, RunCommand.STOP)

    @app.post("/v1/runs/{run_id}/inject")
    def run_inject(run_id: str, body: dict) -> dict:
        design = parse_design(body.get("design"))
        actor = parse_actor(body.get("actor"))
        return runs.inject(run_id, design, actor)

    @app.get("/v1/runs/{run_id}/archive")
    def run_archive(run_id: str) -> dict:
        view = runs.view(run_id)
        return {"archive": view["archive"]}

    @app.get("/v1/leaderboard/{challenge_id}")
    def leaderboard(challenge_id: str) -> dict:
        lookup_spec(challenge_id)
        return {
            "entries": [
                {
                    "challenge_id": e.challenge_id,
                    "actor": actor_to_wire(e.actor),
                    "score": e.score,
                    "design_hash": e.design_hash,
                    "recorded_at": e.recorded_at,
                }
                for e in store.leaderboard(challenge_id)
            ]
        }

    @app.post("/v1/leaderboard/{challenge_id}")
    def record_score(challenge_id: str, body: dict) -> dict:
        lookup_spec(challenge_id)
        actor = parse_actor(body.get("actor"))
        result = body.get("result") or {}
        try:
            from .challenges import EpisodeResult

            episode = EpisodeResult(
                score=float(result["score"]),
                metrics={k: float(v) for k, v in result.get("metrics", {}).items()},
                seed=int(result.get("seed", 0)),
                design_hash=str(result["design_hash"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ApiException("invalid_request", f"malformed result: {exc}")
        try:
            rank = store.record_result(challenge_id, actor, episode)
        except StoreError as exc:
            raise ApiException("invalid_request", str(exc))
        return {"rank": rank}

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/app", StaticFiles(directory=str(ui_dir), html=True), name="app")

    return app
