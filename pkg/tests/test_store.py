from __future__ import annotations

import itertools
import json
import math

import pytest

from coevo.challenges import ChallengeId, default_specs, run_episode
from coevo.shapes import (
    ActorId,
    ActorKind,
    AddBrick,
    BrickChain,
    End,
    RemoveBrick,
    RotateBrick,
    replay,
)
from coevo.store import (
    InvalidActionError,
    SeqOutOfRangeError,
    SessionStore,
    StoreError,
    UnknownSessionError,
)
from coevo.wire import canonical_json, design_to_wire

HUMAN = ActorId(ActorKind.HUMAN, "alice")
AGENT = ActorId(ActorKind.AGENT, "evo")


@pytest.fixture()
def store(tmp_path):
    ticks = itertools.count(1000)
    return SessionStore(tmp_path, clock=lambda: float(next(ticks)))


def test_first_append_gets_seq_zero(store):
    sid = store.create_session(HUMAN, "collect")
    seq, chain = store.append_action(sid, AddBrick(End.TAIL, 0.0), HUMAN)
    assert seq == 0
    assert chain.angles == (0.0,)


def test_appends_replay_consistently(store):
    sid = store.create_session(HUMAN, "move")
    store.append_action(sid, AddBrick(End.TAIL, 0.0), HUMAN)
    store.append_action(sid, AddBrick(End.TAIL, math.pi / 2), HUMAN)
    store.append_action(sid, RotateBrick(1, -math.pi / 2), HUMAN)
    log, chain = store.get_replay(sid)
    assert [e.seq for e in log.entries] == [0, 1, 2]
    assert replay(log) == chain
    record = store.load_session(sid)
    assert record.chain == chain


def test_invalid_action_leaves_log_unchanged(store):
    sid = store.create_session(HUMAN, "move")
    store.append_action(sid, AddBrick(End.TAIL, 0.0), HUMAN)
    with pytest.raises(InvalidActionError):
        store.append_action(sid, RotateBrick(99, 0.0), HUMAN)
    log, chain = store.get_replay(sid)
    assert len(log.entries) == 1
    assert chain.angles == (0.0,)


def test_unknown_session(store):
    with pytest.raises(UnknownSessionError):
        store.get_replay("nope")
    with pytest.raises(UnknownSessionError):
        store.append_action("nope", AddBrick(End.TAIL, 0.0), HUMAN)


def test_interrupted_append_is_invisible(store):
    sid = store.create_session(HUMAN, "move")
    store.append_action(sid, AddBrick(End.TAIL, 0.0), HUMAN)
    # crash between the log line and the meta commit
    store.append_action(sid, AddBrick(End.TAIL, math.pi / 2), HUMAN, _crash_before_commit=True)
    record = store.load_session(sid)
    assert len(record.log.entries) == 1
    assert record.chain.angles == (0.0,)
    assert replay(record.log) == record.chain
    # the next append commits cleanly on top
    seq, chain = store.append_action(sid, AddBrick(End.TAIL, -math.pi / 2), HUMAN)
    assert seq == 1
    assert len(chain) == 2


def test_replay_prefix_and_range(store):
    sid = store.create_session(HUMAN, "move")
    for angle in (0.0, math.pi / 2, math.pi / 2):
        store.append_action(sid, AddBrick(End.TAIL, angle), HUMAN)
    log, chain = store.get_replay(sid, upto_seq=0)
    assert len(log.entries) == 1
    assert len(chain) == 1
    log, chain = store.get_replay(sid, upto_seq=2)
    assert len(chain) == 3
    with pytest.raises(SeqOutOfRangeError):
        store.get_replay(sid, upto_seq=3)
    with pytest.raises(SeqOutOfRangeError):
        store.get_replay(sid, upto_seq=-1)


def test_session_record_round_trip_canonical(store):
    sid = store.create_session(HUMAN, "move")
    for k in range(6):
        store.append_action(sid, AddBrick(End.HEAD, (k - 3) * math.pi / 12), HUMAN)
    first = store.load_session(sid)
    second = store.load_session(sid)
    assert canonical_json(design_to_wire(first.chain)) == canonical_json(design_to_wire(second.chain))
    assert first == second
    # the incrementally maintained chain equals a fresh fold of the log, exactly
    assert replay(first.log) == first.chain


def make_result(score: float, seed: int = 0):
    from coevo.challenges import EpisodeResult

    return EpisodeResult(score=score, metrics={}, seed=seed, design_hash=f"d{score}")


def test_leaderboard_rank_and_max_semantics(store):
    assert store.record_result("collect", HUMAN, make_result(0.4)) == 1
    assert store.record_result("collect", AGENT, make_result(0.6)) == 1
    entries = store.leaderboard("collect")
    assert [e.actor for e in entries] == [AGENT, HUMAN]
    # lower later score does not overwrite the max
    assert store.record_result("collect", HUMAN, make_result(0.3)) == 2
    entries = store.leaderboard("collect")
    assert entries[1].score == 0.4
    assert all(0.0 <= e.score <= 1.0 for e in entries)


def test_leaderboard_tie_broken_by_earlier_recording(store):
    store.record_result("move", HUMAN, make_result(0.5))
    store.record_result("move", AGENT, make_result(0.5))
    entries = store.leaderboard("move")
    assert entries[0].actor == HUMAN  # earlier recorded_at wins the tie


def test_leaderboard_per_challenge(store):
    store.record_result("move", HUMAN, make_result(0.5))
    assert store.leaderboard("cut") == []


def test_leaderboard_rejects_out_of_range(store):
    with pytest.raises(StoreError):
        store.record_result("move", HUMAN, make_result(1.5))


def test_best_result_tracking(store):
    sid = store.create_session(HUMAN, "collect")
    store.set_best_result(sid, make_result(0.4))
    store.set_best_result(sid, make_result(0.2))
    record = store.load_session(sid)
    assert record.best_result["score"] == 0.4


def test_run_save_load_round_trip(store, specs):
    from coevo.evolve import EvoParams, init_run, run_state_from_wire, run_state_to_wire

    state = init_run(specs[ChallengeId.MOVE], EvoParams(master_seed=3, population_size=4))
    store.save_run(state.run_id, run_state_to_wire(state))
    assert state.run_id in store.list_runs()
    loaded = run_state_from_wire(store.load_run(state.run_id))
    assert loaded.run_id == state.run_id
    assert [i.genotype_hash for i in loaded.population] == [
        i.genotype_hash for i in state.population
    ]
    assert loaded.rng.getstate() == state.rng.getstate()


def test_trajectory_round_trip(store, specs, ring12):
    result = run_episode(specs[ChallengeId.MOVE], ring12, 0, capture_frames=True)
    traj_id = store.save_trajectory(result.frames)
    assert store.load_trajectory(traj_id) == result.frames


def test_data_layout_on_disk(store, tmp_path):
    sid = store.create_session(HUMAN, "move")
    store.append_action(sid, AddBrick(End.TAIL, 0.0), HUMAN)
    store.record_result("move", HUMAN, make_result(0.5))
    assert (tmp_path / "sessions" / f"{sid}.jsonl").exists()
    assert (tmp_path / "sessions" / f"{sid}.meta.json").exists()
    assert (tmp_path / "leaderboard.json").exists()
    meta = json.loads((tmp_path / "sessions" / f"{sid}.meta.json").read_text())
    assert meta["format_version"] == "v1"
    board = json.loads((tmp_path / "leaderboard.json").read_text())
    assert board["format_version"] == "v1"
