"""JSON wire formats and canonical serialization.

Every float in canonical form is rendered with 9 significant digits so that
content hashes are stable across platforms and across store round-trips.
Designs parsed from the wire re-snap their angles to the quantized grid,
which makes canonicalization idempotent.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any, Optional

from .shapes import (
    Action,
    ActionLog,
    ActorId,
    ActorKind,
    AddBrick,
    BrickChain,
    ChainError,
    End,
    LogEntry,
    RemoveBrick,
    RotateBrick,
    quantize_angle,
)

FORMAT_VERSION = "v1"


class WireError(ValueError):
    """Payload does not match the expected wire format."""


def _canon(value: Any) -> Any:
    if isinstance(value, float):
        if not math.isfinite(value):
            raise WireError("non-finite float in canonical JSON")
        if value == int(value) and abs(value) < 1e15:
            return float(int(value))
        return float(f"{value:.9g}")
    if isinstance(value, dict):
        return {k: _canon(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canon(v) for v in value]
    return value


def canonical_json(obj: Any) -> str:
    """Deterministic JSON: sorted keys, compact separators, 9-digit floats."""
    return json.dumps(_canon(obj), sort_keys=True, separators=(",", ":"))


def design_to_wire(chain: BrickChain) -> dict:
    return {
        "brick_length": chain.brick_length,
        "brick_thickness": chain.brick_thickness,
        "anchor": [chain.anchor[0], chain.anchor[1]],
        "angles": list(chain.angles),
    }


def design_from_wire(data: Any) -> BrickChain:
    if not isinstance(data, dict):
        raise WireError("design must be a JSON object")
    try:
        angles = data["angles"]
        anchor = data["anchor"]
        length = float(data.get("brick_length", 1.0))
        thickness = float(data.get("brick_thickness", 0.2))
    except (KeyError, TypeError, ValueError) as exc:
        raise WireError(f"malformed design: {exc}") from exc
    if not isinstance(angles, list) or not angles:
        raise WireError("design needs a non-empty angles array")
    if not (isinstance(anchor, list) and len(anchor) == 2):
        raise WireError("design anchor must be [x, y]")
    try:
        snapped = tuple(quantize_angle(float(a)) for a in angles)
        return BrickChain(
            angles=snapped,
            anchor=(float(anchor[0]), float(anchor[1])),
            brick_length=length,
            brick_thickness=thickness,
        )
    except (ChainError, TypeError, ValueError) as exc:
        raise WireError(f"invalid design: {exc}") from exc


def design_hash(chain: BrickChain) -> str:
    """Content hash of the canonical design bytes."""
    return hashlib.sha256(canonical_json(design_to_wire(chain)).encode()).hexdigest()


def actor_to_wire(actor: ActorId) -> dict:
    return {"kind": actor.kind.value, "id": actor.id}


def actor_from_wire(data: Any) -> ActorId:
    if not isinstance(data, dict):
        raise WireError("actor must be a JSON object")
    try:
        return ActorId(kind=ActorKind(data["kind"]), id=str(data["id"]))
    except (KeyError, ValueError) as exc:
        raise WireError(f"malformed actor: {exc}") from exc


def action_to_wire(action: Action) -> dict:
    if isinstance(action, AddBrick):
        return {"type": "add", "end": action.end.value, "rel_angle": action.rel_angle}
    if isinstance(action, RemoveBrick):
        return {"type": "remove", "end": action.end.value}
    if isinstance(action, RotateBrick):
        return {"type": "rotate", "index": action.index, "new_rel_angle": action.new_rel_angle}
    raise WireError(f"unknown action {action!r}")


def action_from_wire(data: Any) -> Action:
    if not isinstance(data, dict):
        raise WireError("action must be a JSON object")
    kind = data.get("type")
    try:
        if kind == "add":
            return AddBrick(End(data["end"]), quantize_angle(float(data["rel_angle"])))
        if kind == "remove":
            return RemoveBrick(End(data["end"]))
        if kind == "rotate":
            return RotateBrick(int(data["index"]), quantize_angle(float(data["new_rel_angle"])))
    except ChainError as exc:
        raise WireError(f"invalid action: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise WireError(f"malformed action: {exc}") from exc
    raise WireError(f"unknown action type {kind!r}")


def log_to_wire(log: ActionLog) -> dict:
    return {
        "session_id": log.session_id,
        "challenge_id": log.challenge_id,
        "entries": [
            {"seq": e.seq, "actor": actor_to_wire(e.actor), "action": action_to_wire(e.action)}
            for e in log.entries
        ],
    }


def log_from_wire(data: Any) -> ActionLog:
    if not isinstance(data, dict):
        raise WireError("action log must be a JSON object")
    try:
        entries = [
            LogEntry(
                seq=int(e["seq"]),
                actor=actor_from_wire(e["actor"]),
                action=action_from_wire(e["action"]),
            )
            for e in data.get("entries", [])
        ]
        return ActionLog(
            session_id=str(data["session_id"]),
            challenge_id=str(data["challenge_id"]),
            entries=entries,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WireError(f"malformed action log: {exc}") from exc


def chain_or_none_to_wire(chain: Optional[BrickChain]) -> Optional[dict]:
    return None if chain is None else design_to_wire(chain)


def chain_or_none_from_wire(data: Any) -> Optional[BrickChain]:
    return None if data is None else design_from_wire(data)
