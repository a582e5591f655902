"""Brick-chain design representation and the add/remove/rotate edit vocabulary.

A design is an ordered chain of rectangular bricks. Each brick stores the
angle of its axis relative to the previous brick (the first brick's angle is
absolute, measured from +x). All bricks in a chain share one length and one
thickness, so the genotype is essentially the anchor point plus a list of
quantized angles. Humans and the evolutionary agent edit chains through the
same three actions; edits are recorded in append-only action logs that can be
replayed to reconstruct any intermediate state.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

# Angular quantization: 24 headings, 15 degrees apart, in [-pi, pi).
ANGLE_STEP = math.pi / 12.0
ANGLE_COUNT = 24

DEFAULT_BRICK_LENGTH = 1.0
DEFAULT_BRICK_THICKNESS = 0.2
MAX_BRICKS = 32

_ANGLE_TOL = 1e-9


class ChainError(Exception):
    """Base class for design-edit failures."""


class EmptyChainError(ChainError):
    """Operation requires at least one brick."""


class ChainFullError(ChainError):
    """Adding would exceed the brick cap."""


class IndexOutOfRangeError(ChainError):
    """Rotate addressed a brick index that does not exist."""


class UnquantizedAngleError(ChainError):
    """Angle is not a multiple of the angular step."""


class BadBoundsError(ChainError):
    """Invalid length bounds for random chain generation."""


class InvalidLogError(ChainError):
    """Action log cannot be replayed from the empty chain."""


def wrap_angle_index(k: int) -> int:
    """Wrap an integer angle-step index into [-12, 12), i.e. [-pi, pi)."""
    return (k + ANGLE_COUNT // 2) % ANGLE_COUNT - ANGLE_COUNT // 2


def angle_index(angle: float) -> int:
    """Map a radian angle to its step index, failing if it is off-grid."""
    k = round(angle / ANGLE_STEP)
    if abs(angle - k * ANGLE_STEP) > _ANGLE_TOL:
        raise UnquantizedAngleError(
            f"angle {angle!r} is not a multiple of pi/12 within {_ANGLE_TOL}"
        )
    return wrap_angle_index(int(k))


def quantize_angle(angle: float) -> float:
    """Return the canonical quantized angle (an exact multiple of pi/12)."""
    return angle_index(angle) * ANGLE_STEP


def snap_angle(angle: float) -> float:
    """Snap an arbitrary angle to the nearest quantized heading."""
    return wrap_angle_index(round(angle / ANGLE_STEP)) * ANGLE_STEP


class End(Enum):
    HEAD = "head"
    TAIL = "tail"


class ActorKind(Enum):
    HUMAN = "human"
    AGENT = "agent"


@dataclass(frozen=True)
class ActorId:
    kind: ActorKind
    id: str


@dataclass(frozen=True)
class AddBrick:
    end: End
    rel_angle: float


@dataclass(frozen=True)
class RemoveBrick:
    end: End


@dataclass(frozen=True)
class RotateBrick:
    index: int
    new_rel_angle: float


Action = AddBrick | RemoveBrick | RotateBrick


@dataclass(frozen=True)
class Brick:
    """One rectangular piece: relative heading plus shared dimensions."""

    rel_angle: float
    length: float
    thickness: float


@dataclass(frozen=True)
class BrickChain:
    """An immutable chain of bricks; the design genotype and phenotype.

    ``angles[i]`` is brick i's heading relative to brick i-1 (absolute for
    i = 0). The chain is continuous by construction: brick i starts where
    brick i-1 ends.
    """

    angles: tuple[float, ...]
    anchor: tuple[float, float] = (0.0, 0.0)
    brick_length: float = DEFAULT_BRICK_LENGTH
    brick_thickness: float = DEFAULT_BRICK_THICKNESS

    def __post_init__(self) -> None:
        if not 1 <= len(self.angles) <= MAX_BRICKS:
            raise ChainError(f"chain must have 1..{MAX_BRICKS} bricks, got {len(self.angles)}")
        if self.brick_length <= 0 or self.brick_thickness <= 0:
            raise ChainError("brick dimensions must be positive")
        for a in self.angles:
            angle_index(a)  # raises UnquantizedAngleError when off-grid

    def __len__(self) -> int:
        return len(self.angles)

    @property
    def bricks(self) -> tuple[Brick, ...]:
        return tuple(
            Brick(a, self.brick_length, self.brick_thickness) for a in self.angles
        )

    def headings(self) -> list[float]:
        """Absolute heading of each brick (cumulative sum of relative angles)."""
        out: list[float] = []
        total = 0
        for a in self.angles:
            total = wrap_angle_index(total + angle_index(a))
            out.append(total * ANGLE_STEP)
        return out

    def joints(self) -> np.ndarray:
        """(n+1, 2) array of joint points; joint 0 is the anchor."""
        pts = np.empty((len(self.angles) + 1, 2))
        pts[0] = self.anchor
        for i, phi in enumerate(self.headings()):
            pts[i + 1, 0] = pts[i, 0] + self.brick_length * math.cos(phi)
            pts[i + 1, 1] = pts[i, 1] + self.brick_length * math.sin(phi)
        return pts

    def with_anchor(self, anchor: tuple[float, float]) -> "BrickChain":
        return replace(self, anchor=(float(anchor[0]), float(anchor[1])))


def chain_vertices(chain: BrickChain) -> list[np.ndarray]:
    """Corner points of every brick as (4, 2) arrays, counterclockwise.

    Rectangle i has its centerline from joint i to joint i+1 and width equal
    to the chain's brick thickness.
    """
    joints = chain.joints()
    half = chain.brick_thickness / 2.0
    rects: list[np.ndarray] = []
    for i, phi in enumerate(chain.headings()):
        nx, ny = -math.sin(phi) * half, math.cos(phi) * half
        a, b = joints[i], joints[i + 1]
        rects.append(
            np.array(
                [
                    [a[0] - nx, a[1] - ny],
                    [b[0] - nx, b[1] - ny],
                    [b[0] + nx, b[1] + ny],
                    [a[0] + nx, a[1] + ny],
                ]
            )
        )
    return rects


def apply_action(chain: Optional[BrickChain], action: Action) -> Optional[BrickChain]:
    """Apply one edit and return the new chain (None encodes the empty chain).

    Tail edits touch the last brick; head edits touch the first. Adding at
    the head re-anchors the chain: the new brick's start becomes the anchor
    and its ``rel_angle`` becomes the chain's absolute first heading, while
    the previous first brick is re-expressed relative to it, so the existing
    geometry stays fixed in the world.
    """
    if isinstance(action, AddBrick):
        k_new = angle_index(action.rel_angle)
        if chain is None:
            return BrickChain(angles=(k_new * ANGLE_STEP,))
        if len(chain) >= MAX_BRICKS:
            raise ChainFullError(f"chain already has {MAX_BRICKS} bricks")
        if action.end is End.TAIL:
            return replace(chain, angles=chain.angles + (k_new * ANGLE_STEP,))
        k_old_first = angle_index(chain.angles[0])
        rel_old = wrap_angle_index(k_old_first - k_new)
        anchor = (
            chain.anchor[0] - chain.brick_length * math.cos(k_new * ANGLE_STEP),
            chain.anchor[1] - chain.brick_length * math.sin(k_new * ANGLE_STEP),
        )
        angles = (k_new * ANGLE_STEP, rel_old * ANGLE_STEP) + chain.angles[1:]
        return replace(chain, angles=angles, anchor=anchor)

    if isinstance(action, RemoveBrick):
        if chain is None:
            raise EmptyChainError("cannot remove from an empty chain")
        if len(chain) == 1:
            return None
        if action.end is End.TAIL:
            return replace(chain, angles=chain.angles[:-1])
        k0 = angle_index(chain.angles[0])
        k1 = angle_index(chain.angles[1])
        anchor = (
            chain.anchor[0] + chain.brick_length * math.cos(k0 * ANGLE_STEP),
            chain.anchor[1] + chain.brick_length * math.sin(k0 * ANGLE_STEP),
        )
        angles = (wrap_angle_index(k0 + k1) * ANGLE_STEP,) + chain.angles[2:]
        return replace(chain, angles=angles, anchor=anchor)

    if isinstance(action, RotateBrick):
        if chain is None:
            raise EmptyChainError("cannot rotate a brick of an empty chain")
        if not 0 <= action.index < len(chain):
            raise IndexOutOfRangeError(
                f"brick index {action.index} out of range for {len(chain)}-brick chain"
            )
        k = angle_index(action.new_rel_angle)
        angles = (
            chain.angles[: action.index]
            + (k * ANGLE_STEP,)
            + chain.angles[action.index + 1 :]
        )
        return replace(chain, angles=angles)

    raise TypeError(f"unknown action {action!r}")


@dataclass(frozen=True)
class LogEntry:
    seq: int
    actor: ActorId
    action: Action


@dataclass
class ActionLog:
    """Append-only record of every edit in one design session."""

    session_id: str
    challenge_id: str
    entries: list[LogEntry] = field(default_factory=list)

    def validate(self) -> None:
        for i, entry in enumerate(self.entries):
            if entry.seq != i:
                raise InvalidLogError(f"entry {i} has seq {entry.seq}; expected {i}")


def replay(log: ActionLog, upto_seq: Optional[int] = None) -> Optional[BrickChain]:
    """Fold the log's actions over the empty chain; the session time machine.

    ``upto_seq`` (inclusive) replays a prefix only. Raises InvalidLogError if
    any intermediate action is illegal, which signals a corrupted log.
    """
    log.validate()
    chain: Optional[BrickChain] = None
    for entry in log.entries:
        if upto_seq is not None and entry.seq > upto_seq:
            break
        try:
            chain = apply_action(chain, entry.action)
        except ChainError as exc:
            raise InvalidLogError(f"log entry seq={entry.seq} does not apply: {exc}") from exc
    return chain


def genotype_distance(a: BrickChain, b: BrickChain) -> float:
    """Edit-flavoured distance between two chains.

    Angle disagreement is summed over the overlapping brick indices (wrapped
    into [-pi, pi]); every brick of length difference costs pi, one maximal
    angle disagreement. Symmetric, zero only for identical genotypes.
    """
    if a is None or b is None:
        raise EmptyChainError("genotype distance requires non-empty chains")
    ka = [angle_index(x) for x in a.angles]
    kb = [angle_index(x) for x in b.angles]
    d = abs(len(ka) - len(kb)) * math.pi
    for x, y in zip(ka, kb):
        d += abs(wrap_angle_index(x - y)) * ANGLE_STEP
    return d


def random_chain(
    rng: random.Random,
    min_len: int = 1,
    max_len: int = 8,
    anchor: tuple[float, float] = (0.0, 0.0),
) -> BrickChain:
    """Uniform random chain: length in [min_len, max_len], headings uniform
    over the 24 quantized angles. Deterministic for a given rng state."""
    if not 1 <= min_len <= max_len <= MAX_BRICKS:
        raise BadBoundsError(f"need 1 <= min_len <= max_len <= {MAX_BRICKS}")
    n = rng.randint(min_len, max_len)
    ks = [rng.randrange(-ANGLE_COUNT // 2, ANGLE_COUNT // 2) for _ in range(n)]
    return BrickChain(angles=tuple(k * ANGLE_STEP for k in ks), anchor=anchor)


def mutation_actions(
    rng: random.Random,
    chain: BrickChain,
    weights: dict[str, float],
) -> Action:
    """Draw one legal-by-construction random action for the given chain.

    ``weights`` maps "add"/"remove"/"rotate" to categorical weights. Kinds
    that would be illegal on this chain (remove on a 1-brick chain, add at
    the brick cap) are excluded before drawing.
    """
    kinds: list[str] = []
    ws: list[float] = []
    for kind in ("add", "remove", "rotate"):
        w = weights.get(kind, 0.0)
        if w <= 0:
            continue
        if kind == "add" and len(chain) >= MAX_BRICKS:
            continue
        if kind == "remove" and len(chain) <= 1:
            continue
        kinds.append(kind)
        ws.append(w)
    if not kinds:
        raise ChainError("no legal mutation kind has positive weight")
    kind = rng.choices(kinds, weights=ws, k=1)[0]
    if kind == "add":
        end = End.TAIL if rng.random() < 0.5 else End.HEAD
        return AddBrick(end, rng.randrange(-ANGLE_COUNT // 2, ANGLE_COUNT // 2) * ANGLE_STEP)
    if kind == "remove":
        return RemoveBrick(End.TAIL if rng.random() < 0.5 else End.HEAD)
    index = rng.randrange(len(chain))
    return RotateBrick(index, rng.randrange(-ANGLE_COUNT // 2, ANGLE_COUNT // 2) * ANGLE_STEP)
