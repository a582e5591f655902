"""The four design challenges: collect, protect, move, cut.

Each challenge is an environment builder (arena statics, design placement,
spawn schedule) plus a scoring function from a simulated episode onto
[0, 1]. Humans and the evolutionary agent are evaluated under identical
conditions: same environment, same timestep, same seed policy.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .geometry import intersection_area, polygons_intersect, rect_from_corners
from .physics import (
    BodyTag,
    RigidBody,
    World,
    compound_from_chain,
    make_ball,
    make_static_box,
)
from .shapes import ANGLE_STEP, BrickChain, EmptyChainError
from .wire import canonical_json, design_hash

SPEC_VERSION = "v1"

DESIGN_DENSITY = 1.0
DESIGN_FRICTION = 0.6
DESIGN_RESTITUTION = 0.1


class ChallengeId(Enum):
    COLLECT = "collect"
    PROTECT = "protect"
    MOVE = "move"
    CUT = "cut"


class InvalidSpecError(ValueError):
    """Challenge spec violates its invariants."""


class DegenerateSpecError(InvalidSpecError):
    """Goal geometry makes the score undefined (zero baseline)."""


@dataclass(frozen=True)
class Pose:
    position: tuple[float, float]
    angle: float = 0.0


@dataclass(frozen=True)
class ArenaBox:
    """Static rectangle: arena geometry such as ground or an incline."""

    center: tuple[float, float]
    half_w: float
    half_h: float
    angle: float = 0.0
    friction: float = 0.6
    restitution: float = 0.1


@dataclass(frozen=True)
class SpawnSpec:
    """One scheduled ball/projectile: spawned at `step`, position jittered
    uniformly within +-jitter by the episode's seeded RNG."""

    step: int
    kind: BodyTag
    position: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    radius: float = 0.15
    density: float = 1.0
    friction: float = 0.4
    restitution: float = 0.3
    jitter: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class CollectGoal:
    kill_plane_y: float


@dataclass(frozen=True)
class ProtectGoal:
    zone: tuple[tuple[float, float], ...]  # convex CCW polygon
    projectile_count: int


@dataclass(frozen=True)
class MoveGoal:
    start_position: tuple[float, float]
    target: tuple[float, float]
    incline_angle: float


@dataclass(frozen=True)
class CutGoal:
    entry_y: float
    depth: float
    x_range: tuple[float, float]
    drag_coeff: float

    @property
    def medium_polygon(self) -> np.ndarray:
        return rect_from_corners(self.x_range[0], self.entry_y - self.depth, self.x_range[1], self.entry_y)


Goal = CollectGoal | ProtectGoal | MoveGoal | CutGoal


@dataclass(frozen=True)
class ChallengeSpec:
    id: ChallengeId
    arena: tuple[ArenaBox, ...]
    episode_steps: int
    spawn_schedule: tuple[SpawnSpec, ...]
    design_placement: Pose
    goal: Goal
    design_dynamic: bool
    version: str = SPEC_VERSION

    def validate(self) -> None:
        if self.episode_steps <= 0:
            raise InvalidSpecError("episode_steps must be positive")
        for s in self.spawn_schedule:
            if not 0 <= s.step < self.episode_steps:
                raise InvalidSpecError("spawn steps must fall inside the episode")
            if s.radius <= 0:
                raise InvalidSpecError("spawn radius must be positive")
        if isinstance(self.goal, MoveGoal):
            if self.goal.start_position == self.goal.target:
                raise InvalidSpecError("move target must differ from start")
        if isinstance(self.goal, CutGoal):
            if self.goal.depth <= 0:
                raise DegenerateSpecError("medium depth must be positive")
        if isinstance(self.goal, ProtectGoal):
            if self.goal.projectile_count <= 0 or len(self.goal.zone) < 3:
                raise InvalidSpecError("protect goal needs a zone polygon and projectiles")


@dataclass(frozen=True)
class EpisodeResult:
    score: float
    metrics: dict[str, float]
    seed: int
    design_hash: str
    frames: Optional[list[dict]] = None


def default_specs() -> dict[ChallengeId, ChallengeSpec]:
    """The four canonical v1 challenge environments."""
    collect = ChallengeSpec(
        id=ChallengeId.COLLECT,
        arena=(),
        episode_steps=900,
        spawn_schedule=tuple(
            SpawnSpec(
                step=30 * k,
                kind=BodyTag.BALL,
                position=(0.0, 8.0),
                radius=0.15,
                jitter=(0.5, 0.0),
            )
            for k in range(10)
        ),
        design_placement=Pose((-2.0, 3.0), -ANGLE_STEP),  # slight tilt: flat shelves shed balls
        goal=CollectGoal(kill_plane_y=-1.0),
        design_dynamic=False,
    )
    protect = ChallengeSpec(
        id=ChallengeId.PROTECT,
        arena=(ArenaBox(center=(0.0, -0.5), half_w=14.0, half_h=0.5),),
        episode_steps=900,
        spawn_schedule=tuple(
            SpawnSpec(
                step=45 * k,
                kind=BodyTag.PROJECTILE,
                position=(-2.5, 1.5),
                velocity=(8.0, 0.0),
                radius=0.1,
                restitution=0.2,
                jitter=(0.0, 0.3),
            )
            for k in range(10)
        ),
        design_placement=Pose((-0.5, 0.0), 0.0),
        goal=ProtectGoal(
            zone=((0.5, 0.0), (2.5, 0.0), (2.5, 1.0), (0.5, 1.0)),
            projectile_count=10,
        ),
        design_dynamic=False,
    )
    incline = -math.pi / 18.0  # descending toward +x
    u = (math.cos(incline), math.sin(incline))
    n = (-math.sin(incline), math.cos(incline))
    start = (0.0, 1.0)
    reach = 20.0
    move = ChallengeSpec(
        id=ChallengeId.MOVE,
        arena=(
            ArenaBox(
                center=(10.0 * u[0] - 1.0 * n[0], 10.0 * u[1] - 1.0 * n[1]),
                half_w=40.0,
                half_h=1.0,
                angle=incline,
            ),
        ),
        episode_steps=600,
        spawn_schedule=(),
        design_placement=Pose(start, 0.0),
        goal=MoveGoal(
            start_position=start,
            target=(start[0] + reach * u[0], start[1] + reach * u[1]),
            incline_angle=-incline,
        ),
        design_dynamic=True,
    )
    cut = ChallengeSpec(
        id=ChallengeId.CUT,
        arena=(),
        episode_steps=600,
        spawn_schedule=(),
        design_placement=Pose((0.0, 2.0), 0.0),
        goal=CutGoal(entry_y=0.0, depth=2.0, x_range=(-14.0, 14.0), drag_coeff=120.0),
        design_dynamic=True,
    )
    return {s.id: s for s in (collect, protect, move, cut)}


def build_env(spec: ChallengeSpec, design: Optional[BrickChain]) -> tuple[World, int]:
    """World with arena statics plus the design compound at its placement.

    Returns the world and the design's body index. The design is static for
    collect/protect (the task is shape) and dynamic for move/cut (the task
    is motion)."""
    if design is None:
        raise EmptyChainError("evaluation requires a non-empty design")
    spec.validate()
    world = World()
    for a in spec.arena:
        world.add_body(
            make_static_box(a.center, a.half_w, a.half_h, a.angle, a.friction, a.restitution)
        )
    body = compound_from_chain(
        design,
        density=DESIGN_DENSITY,
        friction=DESIGN_FRICTION,
        restitution=DESIGN_RESTITUTION,
        static=not spec.design_dynamic,
    )
    # map the chain's anchor onto the placement pose
    pose = spec.design_placement
    ca, sa = math.cos(pose.angle), math.sin(pose.angle)
    rx = body.position[0] - design.anchor[0]
    ry = body.position[1] - design.anchor[1]
    body.position = (
        pose.position[0] + ca * rx - sa * ry,
        pose.position[1] + sa * rx + ca * ry,
    )
    body.angle = pose.angle
    design_index = world.add_body(body)
    return world, design_index


def _spawn_body(spawn: SpawnSpec, rng: random.Random) -> RigidBody:
    jx = rng.uniform(-spawn.jitter[0], spawn.jitter[0]) if spawn.jitter[0] > 0 else 0.0
    jy = rng.uniform(-spawn.jitter[1], spawn.jitter[1]) if spawn.jitter[1] > 0 else 0.0
    return make_ball(
        spawn.radius,
        density=spawn.density,
        friction=spawn.friction,
        restitution=spawn.restitution,
        position=(spawn.position[0] + jx, spawn.position[1] + jy),
        velocity=spawn.velocity,
        tag=spawn.kind,
    )


def _world_rects(world: World, index: int) -> list[list[tuple[float, float]]]:
    """World-space fixture corners as plain tuples; scalar math keeps the
    per-step scoring loops cheap."""
    c = math.cos(float(world.angle[index]))
    s = math.sin(float(world.angle[index]))
    px = float(world.pos[index, 0])
    py = float(world.pos[index, 1])
    out = []
    for poly in world.local_fixtures(index):
        out.append([(px + c * x - s * y, py + s * x + c * y) for x, y in poly.tolist()])
    return out


def _band_area(pts: list[tuple[float, float]], y0: float, y1: float) -> float:
    """Area of a convex polygon clipped to the horizontal band y0 <= y <= y1."""
    ys = [p[1] for p in pts]
    if min(ys) >= y0 and max(ys) <= y1:
        poly = pts
    else:
        poly = pts
        for sign, bound in ((1.0, y0), (-1.0, y1)):  # keep sign*(y - bound) >= 0
            clipped: list[tuple[float, float]] = []
            for i in range(len(poly)):
                px, py = poly[i]
                qx, qy = poly[(i + 1) % len(poly)]
                dp = sign * (py - bound)
                dq = sign * (qy - bound)
                if dp >= 0.0:
                    clipped.append((px, py))
                if (dp >= 0.0) != (dq >= 0.0):
                    t = dp / (dp - dq)
                    clipped.append((px + t * (qx - px), py + t * (qy - py)))
            poly = clipped
            if len(poly) < 3:
                return 0.0
    area = 0.0
    for i in range(len(poly)):
        px, py = poly[i]
        qx, qy = poly[(i + 1) % len(poly)]
        area += px * qy - qx * py
    return abs(area) / 2.0


def _cut_step_state(world: World, design_index: int, goal: CutGoal) -> tuple[float, float]:
    """(deepest-vertex penetration, submerged area fraction) for this step."""
    rects = _world_rects(world, design_index)
    x0, x1 = goal.x_range
    y_bottom = goal.entry_y - goal.depth
    deepest = -1e300
    inside = 0.0
    total = 0.0
    for pts in rects:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        area = abs(
            (pts[1][0] - pts[0][0]) * (pts[3][1] - pts[0][1])
            - (pts[1][1] - pts[0][1]) * (pts[3][0] - pts[0][0])
        )
        total += area
        for x, y in pts:
            if x0 <= x <= x1 and goal.entry_y - y > deepest:
                deepest = goal.entry_y - y
        if min(ys) >= goal.entry_y:
            continue
        if min(xs) >= x0 and max(xs) <= x1:
            inside += _band_area(pts, y_bottom, goal.entry_y)
        else:  # straddles the medium's side boundary: full 2D clip
            inside += intersection_area(np.asarray(pts), goal.medium_polygon)
    frac = min(inside / total, 1.0) if total > 0.0 else 0.0
    return max(deepest, 0.0) if deepest > -1e300 else 0.0, frac


def _apply_medium_drag(world: World, design_index: int, goal: CutGoal, frac: float) -> None:
    """Linear drag against the design's motion, scaled by its submerged area
    fraction; matching angular drag."""
    if frac <= 0.0:
        return
    c = goal.drag_coeff * frac
    vx, vy = world.vel[design_index]
    # angular drag with the same decay rate as the linear term
    inv_i = float(world.inv_inertia[design_index])
    inv_m = float(world.inv_mass[design_index])
    torque = 0.0
    if inv_i > 0.0 and inv_m > 0.0:
        torque = -c * (inv_m / inv_i) * float(world.omega[design_index])
    world.apply_force(design_index, -c * float(vx), -c * float(vy), torque)


def score_collect(world: World, spec: ChallengeSpec, design_index: int) -> tuple[float, dict[str, float]]:
    """Fraction of spawned balls that ended above the kill plane and inside
    the design's contact component (transitive touching, seeded at the
    design, so stacked balls count)."""
    goal = spec.goal
    assert isinstance(goal, CollectGoal)
    balls = [i for i, t in enumerate(world.tags) if t is BodyTag.BALL]
    spawned = len(balls)
    if spawned == 0:
        return 0.0, {"balls_spawned": 0.0, "balls_collected": 0.0}
    adjacency: dict[int, set[int]] = {i: set() for i in range(world.body_count)}
    for man in world.detect_contacts():
        a, b = man.body_pair
        adjacency[a].add(b)
        adjacency[b].add(a)
    component = {design_index}
    frontier = [design_index]
    while frontier:
        cur = frontier.pop()
        for other in adjacency[cur]:
            if other not in component:
                component.add(other)
                frontier.append(other)
    collected = sum(
        1 for i in balls if i in component and float(world.pos[i, 1]) > goal.kill_plane_y
    )
    return collected / spawned, {
        "balls_spawned": float(spawned),
        "balls_collected": float(collected),
    }


def score_protect(zone_hits: int, spawned: int) -> tuple[float, dict[str, float]]:
    """One minus the fraction of projectiles that ever touched the zone."""
    if spawned == 0:
        return 0.0, {"projectiles_spawned": 0.0, "zone_hits": 0.0, "hits_blocked": 0.0}
    score = 1.0 - zone_hits / spawned
    return score, {
        "projectiles_spawned": float(spawned),
        "zone_hits": float(zone_hits),
        "hits_blocked": float(spawned - zone_hits),
    }


def score_move(com_trajectory: Sequence[tuple[float, float]], target: tuple[float, float]) -> tuple[float, dict[str, float]]:
    """Closest-approach score: fraction of the initial COM-target distance
    closed at the trajectory's nearest point (overshoot is not penalized)."""
    d0 = math.dist(com_trajectory[0], target)
    if d0 <= 0.0:
        raise DegenerateSpecError("move baseline distance is zero")
    d_min = min(math.dist(p, target) for p in com_trajectory)
    score = max(0.0, min(1.0, (d0 - d_min) / d0))
    return score, {"d0": d0, "d_min": d_min, "distance_closed": d0 - d_min}


def score_cut(depths: Sequence[float], medium_depth: float) -> tuple[float, dict[str, float]]:
    """Deepest-vertex penetration past the entry boundary, as a fraction of
    the medium depth."""
    if medium_depth <= 0.0:
        raise DegenerateSpecError("medium depth must be positive")
    deepest = max(0.0, max(depths, default=0.0))
    score = max(0.0, min(1.0, deepest / medium_depth))
    return score, {"depth_reached": deepest, "medium_depth": medium_depth}


def run_episode(
    spec: ChallengeSpec,
    design: Optional[BrickChain],
    seed: int,
    capture_frames: bool = False,
    frame_stride: int = 2,
) -> EpisodeResult:
    """Simulate one scored episode, deterministically for (spec, design, seed).

    Spawn jitter is the only seed-dependent input, so challenges without
    spawns produce seed-independent scores."""
    world, design_index = build_env(spec, design)
    rng = random.Random(seed)
    pending = sorted(spec.spawn_schedule, key=lambda s: s.step)
    spawned_bodies = [_spawn_body(s, rng) for s in pending]

    goal = spec.goal
    zone = np.asarray(goal.zone, dtype=float) if isinstance(goal, ProtectGoal) else None
    if zone is not None:
        zone_aabb = (
            float(zone[:, 0].min()),
            float(zone[:, 1].min()),
            float(zone[:, 0].max()),
            float(zone[:, 1].max()),
        )
    zone_hit_flags: dict[int, bool] = {}
    unflagged: list[tuple[int, float]] = []  # (body index, bounding radius)
    com_traj: list[tuple[float, float]] = []
    depths: list[float] = []
    medium_frac = 0.0

    frames: Optional[list[dict]] = [] if capture_frames else None

    def capture(t: float) -> None:
        if frames is None:
            return
        frames.append(
            {
                "t": t,
                "bodies": [
                    {
                        "tag": world.tags[i].value,
                        "pos": [float(world.pos[i, 0]), float(world.pos[i, 1])],
                        "angle": float(world.angle[i]),
                    }
                    for i in range(world.body_count)
                ],
            }
        )

    if isinstance(goal, MoveGoal):
        com_traj.append((float(world.pos[design_index, 0]), float(world.pos[design_index, 1])))
    if isinstance(goal, CutGoal):
        depth0, medium_frac = _cut_step_state(world, design_index, goal)
        depths.append(depth0)
    capture(0.0)

    next_spawn = 0
    for step in range(spec.episode_steps):
        while next_spawn < len(pending) and pending[next_spawn].step == step:
            idx = world.add_body(spawned_bodies[next_spawn])
            if pending[next_spawn].kind is BodyTag.PROJECTILE:
                zone_hit_flags[idx] = False
                unflagged.append((idx, pending[next_spawn].radius))
            next_spawn += 1
        if isinstance(goal, CutGoal):
            _apply_medium_drag(world, design_index, goal, medium_frac)
        world.step()

        if zone is not None and unflagged:
            still: list[tuple[int, float]] = []
            for idx, radius in unflagged:
                px = float(world.pos[idx, 0])
                py = float(world.pos[idx, 1])
                dx = max(zone_aabb[0] - px, 0.0, px - zone_aabb[2])
                dy = max(zone_aabb[1] - py, 0.0, py - zone_aabb[3])
                hit = False
                if dx * dx + dy * dy <= radius * radius:
                    for poly in world.fixture_world_vertices(idx):
                        if polygons_intersect(poly, zone):
                            hit = True
                            break
                if hit:
                    zone_hit_flags[idx] = True
                else:
                    still.append((idx, radius))
            unflagged = still
        if isinstance(goal, MoveGoal):
            com_traj.append((float(world.pos[design_index, 0]), float(world.pos[design_index, 1])))
        if isinstance(goal, CutGoal):
            depth, medium_frac = _cut_step_state(world, design_index, goal)
            depths.append(depth)
        if world.step_count % frame_stride == 0:
            capture(world.step_count * world.dt)

    if isinstance(goal, CollectGoal):
        score, metrics = score_collect(world, spec, design_index)
    elif isinstance(goal, ProtectGoal):
        score, metrics = score_protect(sum(zone_hit_flags.values()), len(zone_hit_flags))
    elif isinstance(goal, MoveGoal):
        score, metrics = score_move(com_traj, goal.target)
    else:
        score, metrics = score_cut(depths, goal.depth)

    return EpisodeResult(
        score=score,
        metrics=metrics,
        seed=seed,
        design_hash=design_hash(design),
        frames=frames,
    )


# ---------------------------------------------------------------------------
# wire formats


def _goal_to_wire(goal: Goal) -> dict:
    if isinstance(goal, CollectGoal):
        return {"kind": "collect", "kill_plane_y": goal.kill_plane_y}
    if isinstance(goal, ProtectGoal):
        return {
            "kind": "protect",
            "zone": [list(p) for p in goal.zone],
            "projectile_count": goal.projectile_count,
        }
    if isinstance(goal, MoveGoal):
        return {
            "kind": "move",
            "start_position": list(goal.start_position),
            "target": list(goal.target),
            "incline_angle": goal.incline_angle,
        }
    return {
        "kind": "cut",
        "entry_y": goal.entry_y,
        "depth": goal.depth,
        "x_range": list(goal.x_range),
        "drag_coeff": goal.drag_coeff,
    }


def spec_to_wire(spec: ChallengeSpec) -> dict:
    return {
        "id": spec.id.value,
        "version": spec.version,
        "episode_steps": spec.episode_steps,
        "design_dynamic": spec.design_dynamic,
        "design_placement": {
            "position": list(spec.design_placement.position),
            "angle": spec.design_placement.angle,
        },
        "arena": [
            {
                "center": list(a.center),
                "half_w": a.half_w,
                "half_h": a.half_h,
                "angle": a.angle,
                "friction": a.friction,
                "restitution": a.restitution,
            }
            for a in spec.arena
        ],
        "spawn_schedule": [
            {
                "step": s.step,
                "kind": s.kind.value,
                "position": list(s.position),
                "velocity": list(s.velocity),
                "radius": s.radius,
                "density": s.density,
                "friction": s.friction,
                "restitution": s.restitution,
                "jitter": list(s.jitter),
            }
            for s in spec.spawn_schedule
        ],
        "goal": _goal_to_wire(spec.goal),
    }


def _goal_from_wire(data: dict) -> Goal:
    kind = data.get("kind")
    if kind == "collect":
        return CollectGoal(kill_plane_y=float(data["kill_plane_y"]))
    if kind == "protect":
        return ProtectGoal(
            zone=tuple((float(p[0]), float(p[1])) for p in data["zone"]),
            projectile_count=int(data["projectile_count"]),
        )
    if kind == "move":
        return MoveGoal(
            start_position=(float(data["start_position"][0]), float(data["start_position"][1])),
            target=(float(data["target"][0]), float(data["target"][1])),
            incline_angle=float(data["incline_angle"]),
        )
    if kind == "cut":
        return CutGoal(
            entry_y=float(data["entry_y"]),
            depth=float(data["depth"]),
            x_range=(float(data["x_range"][0]), float(data["x_range"][1])),
            drag_coeff=float(data["drag_coeff"]),
        )
    raise InvalidSpecError(f"unknown goal kind {kind!r}")


def spec_from_wire(data: dict) -> ChallengeSpec:
    try:
        spec = ChallengeSpec(
            id=ChallengeId(data["id"]),
            version=str(data.get("version", SPEC_VERSION)),
            episode_steps=int(data["episode_steps"]),
            design_dynamic=bool(data["design_dynamic"]),
            design_placement=Pose(
                position=(
                    float(data["design_placement"]["position"][0]),
                    float(data["design_placement"]["position"][1]),
                ),
                angle=float(data["design_placement"]["angle"]),
            ),
            arena=tuple(
                ArenaBox(
                    center=(float(a["center"][0]), float(a["center"][1])),
                    half_w=float(a["half_w"]),
                    half_h=float(a["half_h"]),
                    angle=float(a.get("angle", 0.0)),
                    friction=float(a.get("friction", 0.6)),
                    restitution=float(a.get("restitution", 0.1)),
                )
                for a in data.get("arena", [])
            ),
            spawn_schedule=tuple(
                SpawnSpec(
                    step=int(s["step"]),
                    kind=BodyTag(s["kind"]),
                    position=(float(s["position"][0]), float(s["position"][1])),
                    velocity=(float(s["velocity"][0]), float(s["velocity"][1])),
                    radius=float(s["radius"]),
                    density=float(s.get("density", 1.0)),
                    friction=float(s.get("friction", 0.4)),
                    restitution=float(s.get("restitution", 0.3)),
                    jitter=(float(s["jitter"][0]), float(s["jitter"][1])),
                )
                for s in data.get("spawn_schedule", [])
            ),
            goal=_goal_from_wire(data["goal"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpecError(f"malformed challenge spec: {exc}") from exc
    spec.validate()
    return spec


def result_to_wire(result: EpisodeResult, frames_ref: Optional[str] = None) -> dict:
    out = {
        "score": result.score,
        "metrics": dict(result.metrics),
        "seed": result.seed,
        "design_hash": result.design_hash,
    }
    if frames_ref is not None:
        out["frames_ref"] = frames_ref
    return out


def result_canonical_bytes(result: EpisodeResult) -> bytes:
    """Canonical encoding of the frame-independent result fields; equal bytes
    certify deterministic evaluation."""
    return canonical_json(result_to_wire(result)).encode()
