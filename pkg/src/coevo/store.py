"""Flat-file persistence: design sessions, run states, and the leaderboard.

Layout under one data directory:

    sessions/<id>.jsonl       action log, one entry per line
    sessions/<id>.meta.json   session metadata + current chain (commit point)
    runs/<id>.json            serialized evolutionary run states
    trajectories/<id>.jsonl   captured episode frames
    leaderboard.json          per-(challenge, actor) best scores

Appending an action writes the jsonl line first and then commits the meta
file via write-to-temp-then-rename; on reload only the first `entry_count`
log lines are trusted, so an interrupted append leaves the store as if the
append never happened.
"""

from __future__ import annotations

import json
import os
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .challenges import EpisodeResult, result_to_wire
from .shapes import (
    Action,
    ActionLog,
    ActorId,
    BrickChain,
    ChainError,
    LogEntry,
    apply_action,
)
from .wire import (
    FORMAT_VERSION,
    action_from_wire,
    action_to_wire,
    actor_from_wire,
    actor_to_wire,
    chain_or_none_from_wire,
    chain_or_none_to_wire,
)


class StoreError(Exception):
    pass


class UnknownSessionError(StoreError):
    pass


class UnknownRunError(StoreError):
    pass


class SeqOutOfRangeError(StoreError):
    pass


class InvalidActionError(StoreError):
    """Action rejected by the session's current chain; log unchanged."""

    def __init__(self, cause: ChainError):
        super().__init__(str(cause))
        self.cause = cause


@dataclass
class SessionRecord:
    session_id: str
    actor: ActorId
    challenge_id: str
    log: ActionLog
    chain: Optional[BrickChain]
    best_result: Optional[dict] = None
    created_at: float = 0.0
    updated_at: float = 0.0


@dataclass(frozen=True)
class LeaderboardEntry:
    challenge_id: str
    actor: ActorId
    score: float
    design_hash: str
    recorded_at: float


def _dump(obj) -> str:
    """Full-precision storage encoding: floats keep their shortest round-trip
    repr so incrementally maintained state reloads bit-exactly."""
    return json.dumps(obj, sort_keys=True)


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


class SessionStore:
    """Single-writer store rooted at a data directory."""

    def __init__(self, data_dir: str | Path, clock: Callable[[], float] = time.time):
        self.root = Path(data_dir)
        self.clock = clock
        (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        (self.root / "runs").mkdir(parents=True, exist_ok=True)
        (self.root / "trajectories").mkdir(parents=True, exist_ok=True)

    # -- sessions -----------------------------------------------------------

    def _meta_path(self, session_id: str) -> Path:
        return self.root / "sessions" / f"{session_id}.meta.json"

    def _log_path(self, session_id: str) -> Path:
        return self.root / "sessions" / f"{session_id}.jsonl"

    def create_session(self, actor: ActorId, challenge_id: str) -> str:
        session_id = uuid.uuid4().hex[:12]
        now = self.clock()
        meta = {
            "format_version": FORMAT_VERSION,
            "session_id": session_id,
            "actor": actor_to_wire(actor),
            "challenge_id": challenge_id,
            "entry_count": 0,
            "chain": None,
            "best_result": None,
            "created_at": now,
            "updated_at": now,
        }
        self._log_path(session_id).write_text("")
        _atomic_write(self._meta_path(session_id), _dump(meta))
        return session_id

    def _load_meta(self, session_id: str) -> dict:
        path = self._meta_path(session_id)
        if not path.exists():
            raise UnknownSessionError(f"no session {session_id!r}")
        return json.loads(path.read_text())

    def load_session(self, session_id: str) -> SessionRecord:
        meta = self._load_meta(session_id)
        count = int(meta["entry_count"])
        entries: list[LogEntry] = []
        log_path = self._log_path(session_id)
        if log_path.exists():
            with log_path.open() as fh:
                for line in fh:
                    if len(entries) >= count:
                        break  # lines past the committed count are uncommitted
                    data = json.loads(line)
                    entries.append(
                        LogEntry(
                            seq=int(data["seq"]),
                            actor=actor_from_wire(data["actor"]),
                            action=action_from_wire(data["action"]),
                        )
                    )
        if len(entries) != count:
            raise StoreError(f"session {session_id!r} log truncated below its meta count")
        return SessionRecord(
            session_id=session_id,
            actor=actor_from_wire(meta["actor"]),
            challenge_id=str(meta["challenge_id"]),
            log=ActionLog(session_id=session_id, challenge_id=str(meta["challenge_id"]), entries=entries),
            chain=chain_or_none_from_wire(meta["chain"]),
            best_result=meta.get("best_result"),
            created_at=float(meta["created_at"]),
            updated_at=float(meta["updated_at"]),
        )

    def append_action(
        self,
        session_id: str,
        action: Action,
        actor: ActorId,
        _crash_before_commit: bool = False,
    ) -> tuple[int, Optional[BrickChain]]:
        """Validate, append, and commit one action; returns (seq, new chain).

        The action is applied to the session's current chain first, so an
        invalid edit leaves both files untouched."""
        record = self.load_session(session_id)
        try:
            new_chain = apply_action(record.chain, action)
        except ChainError as exc:
            raise InvalidActionError(exc) from exc
        seq = len(record.log.entries)
        line = json.dumps(
            {"seq": seq, "actor": actor_to_wire(actor), "action": action_to_wire(action)}
        )
        with self._log_path(session_id).open("a") as fh:
            fh.write(line + "\n")
        if _crash_before_commit:  # crash-atomicity hook for tests
            return seq, new_chain
        meta = self._load_meta(session_id)
        meta["entry_count"] = seq + 1
        meta["chain"] = chain_or_none_to_wire(new_chain)
        meta["updated_at"] = self.clock()
        _atomic_write(self._meta_path(session_id), _dump(meta))
        return seq, new_chain

    def get_replay(
        self, session_id: str, upto_seq: Optional[int] = None
    ) -> tuple[ActionLog, Optional[BrickChain]]:
        """Log prefix plus the chain replayed to that point."""
        record = self.load_session(session_id)
        if upto_seq is None:
            return record.log, record.chain
        if not 0 <= upto_seq < len(record.log.entries):
            raise SeqOutOfRangeError(
                f"upto_seq {upto_seq} out of range for {len(record.log.entries)} entries"
            )
        prefix = ActionLog(
            session_id=record.log.session_id,
            challenge_id=record.log.challenge_id,
            entries=record.log.entries[: upto_seq + 1],
        )
        chain: Optional[BrickChain] = None
        for entry in prefix.entries:
            chain = apply_action(chain, entry.action)
        return prefix, chain

    def set_best_result(self, session_id: str, result: EpisodeResult) -> None:
        meta = self._load_meta(session_id)
        current = meta.get("best_result")
        if current is None or result.score > current["score"]:
            meta["best_result"] = result_to_wire(result)
            meta["updated_at"] = self.clock()
            _atomic_write(self._meta_path(session_id), _dump(meta))

    def list_sessions(self) -> list[str]:
        return sorted(p.stem.replace(".meta", "") for p in (self.root / "sessions").glob("*.meta.json"))

    # -- leaderboard --------------------------------------------------------

    def _leaderboard_path(self) -> Path:
        return self.root / "leaderboard.json"

    def _load_leaderboard(self) -> list[dict]:
        path = self._leaderboard_path()
        if not path.exists():
            return []
        return json.loads(path.read_text())["entries"]

    def _save_leaderboard(self, entries: list[dict]) -> None:
        _atomic_write(
            self._leaderboard_path(),
            _dump({"format_version": FORMAT_VERSION, "entries": entries}),
        )

    def record_result(self, challenge_id: str, actor: ActorId, result: EpisodeResult) -> int:
        """Keep the per-(challenge, actor) maximum; returns the actor's
        1-based rank on that challenge (ties broken by earlier recording)."""
        if not 0.0 <= result.score <= 1.0:
            raise StoreError("score outside [0, 1]")
        entries = self._load_leaderboard()
        key = {"kind": actor.kind.value, "id": actor.id}
        found = None
        for e in entries:
            if e["challenge_id"] == challenge_id and e["actor"] == key:
                found = e
                break
        if found is None:
            entries.append(
                {
                    "challenge_id": challenge_id,
                    "actor": key,
                    "score": result.score,
                    "design_hash": result.design_hash,
                    "recorded_at": self.clock(),
                }
            )
        elif result.score > found["score"]:
            found["score"] = result.score
            found["design_hash"] = result.design_hash
            found["recorded_at"] = self.clock()
        self._save_leaderboard(entries)
        ranked = self.leaderboard(challenge_id)
        for rank, entry in enumerate(ranked, start=1):
            if entry.actor == actor:
                return rank
        raise StoreError("actor missing from leaderboard after record")  # unreachable

    def leaderboard(self, challenge_id: str) -> list[LeaderboardEntry]:
        entries = [
            LeaderboardEntry(
                challenge_id=e["challenge_id"],
                actor=actor_from_wire(e["actor"]),
                score=float(e["score"]),
                design_hash=str(e["design_hash"]),
                recorded_at=float(e["recorded_at"]),
            )
            for e in self._load_leaderboard()
            if e["challenge_id"] == challenge_id
        ]
        return sorted(entries, key=lambda e: (-e.score, e.recorded_at))

    # -- runs ----------------------------------------------------------------

    def save_run(self, run_id: str, wire: dict) -> None:
        _atomic_write(self.root / "runs" / f"{run_id}.json", _dump(wire))

    def load_run(self, run_id: str) -> dict:
        path = self.root / "runs" / f"{run_id}.json"
        if not path.exists():
            raise UnknownRunError(f"no run {run_id!r}")
        return json.loads(path.read_text())

    def list_runs(self) -> list[str]:
        return sorted(p.stem for p in (self.root / "runs").glob("*.json"))

    # -- trajectories --------------------------------------------------------

    def save_trajectory(self, frames: list[dict]) -> str:
        traj_id = uuid.uuid4().hex[:12]
        path = self.root / "trajectories" / f"{traj_id}.jsonl"
        with path.open("w") as fh:
            for frame in frames:
                fh.write(json.dumps(frame) + "\n")
        return traj_id

    def load_trajectory(self, traj_id: str) -> list[dict]:
        path = self.root / "trajectories" / f"{traj_id}.jsonl"
        if not path.exists():
            raise StoreError(f"no trajectory {traj_id!r}")
        return [json.loads(line) for line in path.read_text().splitlines() if line]
