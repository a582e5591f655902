from __future__ import annotations

import json
import math

import pytest

from coevo.shapes import ActionLog, ActorId, ActorKind, AddBrick, BrickChain, End, LogEntry, RotateBrick
from coevo.wire import (
    WireError,
    action_from_wire,
    action_to_wire,
    canonical_json,
    design_from_wire,
    design_hash,
    design_to_wire,
    log_from_wire,
    log_to_wire,
)


def test_design_round_trip():
    chain = BrickChain(angles=(0.0, math.pi / 2, -math.pi / 12), anchor=(1.5, -2.0))
    assert design_from_wire(design_to_wire(chain)) == chain


def test_design_wire_shape():
    data = design_to_wire(BrickChain(angles=(0.0,)))
    assert set(data) == {"brick_length", "brick_thickness", "anchor", "angles"}
    assert data["anchor"] == [0.0, 0.0]
    assert data["angles"] == [0.0]


def test_design_parse_snaps_near_grid_angles():
    # 9-significant-digit storage wobble snaps back to the exact grid
    wobbly = {"brick_length": 1.0, "brick_thickness": 0.2, "anchor": [0, 0], "angles": [0.261799388]}
    chain = design_from_wire(wobbly)
    assert chain.angles[0] == math.pi / 12


def test_design_parse_rejects_garbage():
    with pytest.raises(WireError):
        design_from_wire({"angles": []})
    with pytest.raises(WireError):
        design_from_wire({"angles": [0.0], "anchor": [0]})
    with pytest.raises(WireError):
        design_from_wire({"angles": [0.5], "anchor": [0, 0]})  # off-grid
    with pytest.raises(WireError):
        design_from_wire("not an object")


def test_canonical_json_is_sorted_compact_and_9_digit():
    blob = canonical_json({"b": 1.0, "a": math.pi})
    assert blob == '{"a":3.14159265,"b":1.0}'


def test_canonical_json_idempotent_through_parse():
    value = {"x": [math.pi / 12, 123456.789012345], "y": "s"}
    once = canonical_json(value)
    again = canonical_json(json.loads(once))
    assert once == again


def test_design_hash_stable_and_distinct():
    a = BrickChain(angles=(0.0, math.pi / 2))
    b = BrickChain(angles=(0.0, -math.pi / 2))
    assert design_hash(a) == design_hash(a)
    assert design_hash(a) != design_hash(b)
    assert len(design_hash(a)) == 64


def test_action_round_trip():
    for action in (
        AddBrick(End.HEAD, -math.pi / 2),
        AddBrick(End.TAIL, 0.0),
        RotateBrick(3, math.pi / 12),
    ):
        assert action_from_wire(action_to_wire(action)) == action


def test_action_parse_rejects_unknown_type():
    with pytest.raises(WireError):
        action_from_wire({"type": "teleport"})
    with pytest.raises(WireError):
        action_from_wire({"type": "add", "end": "middle", "rel_angle": 0.0})


def test_log_round_trip():
    log = ActionLog(
        "sess",
        "collect",
        entries=[
            LogEntry(0, ActorId(ActorKind.HUMAN, "u"), AddBrick(End.TAIL, 0.0)),
            LogEntry(1, ActorId(ActorKind.AGENT, "a"), RotateBrick(0, math.pi / 2)),
        ],
    )
    assert log_from_wire(log_to_wire(log)) == log
