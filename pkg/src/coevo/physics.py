"""Deterministic fixed-timestep 2D rigid-body world.

Bodies are collections of convex polygon fixtures. One step integrates
velocities under gravity and accumulated forces (semi-implicit Euler),
detects contacts with a separating-axis narrow phase, resolves them with
sequential impulses (Coulomb friction, restitution), applies a Baumgarte
positional correction, then integrates positions. Equal worlds stepped on
the same platform stay bitwise equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .geometry import polygon_area, polygon_centroid, polygon_inertia, polygons_intersect, regular_polygon, transform
from .shapes import BrickChain, EmptyChainError, chain_vertices

DT = 1.0 / 60.0
SOLVER_ITERATIONS = 10
GRAVITY = (0.0, -9.81)
BAUMGARTE = 0.2
SLOP = 0.005
RESTITUTION_THRESHOLD = 1.0


class BodyTag(Enum):
    DESIGN = "design"
    BALL = "ball"
    PROJECTILE = "projectile"
    GROUND = "ground"
    MEDIUM = "medium"
    SENSOR = "sensor"


@dataclass
class RigidBody:
    """Construction blueprint for one body; fixtures are body-local CCW
    convex polygons. mass = 0 encodes a static body."""

    fixtures: list[np.ndarray]
    position: tuple[float, float] = (0.0, 0.0)
    angle: float = 0.0
    velocity: tuple[float, float] = (0.0, 0.0)
    angular_velocity: float = 0.0
    mass: float = 0.0
    inverse_inertia: float = 0.0
    friction: float = 0.5
    restitution: float = 0.2
    tag: BodyTag = BodyTag.GROUND

    def validate(self) -> None:
        if self.mass < 0:
            raise ValueError("mass must be >= 0")
        if not 0.0 <= self.friction <= 1.0 or not 0.0 <= self.restitution <= 1.0:
            raise ValueError("friction and restitution must be in [0, 1]")
        if self.mass == 0.0 and (
            self.velocity != (0.0, 0.0) or self.angular_velocity != 0.0
        ):
            raise ValueError("static bodies must have zero velocity")
        if not self.fixtures:
            raise ValueError("body needs at least one fixture")
        for poly in self.fixtures:
            if len(poly) < 3:
                raise ValueError("fixture polygons need >= 3 vertices")
            if polygon_area(np.asarray(poly, dtype=float)) <= 0:
                raise ValueError("fixture polygons must wind counterclockwise")
            _check_convex(np.asarray(poly, dtype=float))


def _check_convex(verts: np.ndarray) -> None:
    n = len(verts)
    for i in range(n):
        a = verts[i]
        b = verts[(i + 1) % n]
        c = verts[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        if cross < -1e-9:
            raise ValueError("fixture polygon is not convex")


@dataclass(frozen=True)
class ContactManifold:
    body_pair: tuple[int, int]
    normal: tuple[float, float]
    penetration: float
    contact_points: tuple[tuple[float, float], ...]


class World:
    """Owns the packed simulation state; exclusively stepped by one caller."""

    def __init__(
        self,
        gravity: tuple[float, float] = GRAVITY,
        dt: float = DT,
        solver_iterations: int = SOLVER_ITERATIONS,
    ):
        self.gravity = (float(gravity[0]), float(gravity[1]))
        self.dt = float(dt)
        self.solver_iterations = int(solver_iterations)
        self.step_count = 0
        self.tags: list[BodyTag] = []
        self._local_fixtures: list[list[np.ndarray]] = []
        self.pos = np.empty((0, 2))
        self.angle = np.empty(0)
        self.vel = np.empty((0, 2))
        self.omega = np.empty(0)
        self.inv_mass = np.empty(0)
        self.inv_inertia = np.empty(0)
        self.mass = np.empty(0)
        self.friction = np.empty(0)
        self.restitution = np.empty(0)
        self.force = np.empty((0, 2))
        self.torque = np.empty(0)
        self._fx_body = np.empty(0, dtype=np.int64)
        self._fx_off = np.empty(0, dtype=np.int64)
        self._fx_n = np.empty(0, dtype=np.int64)
        self._verts_local = np.empty((0, 2))

    @property
    def body_count(self) -> int:
        return len(self.tags)

    def add_body(self, body: RigidBody) -> int:
        body.validate()
        i = self.body_count
        self.tags.append(body.tag)
        fixtures = [np.asarray(p, dtype=float).copy() for p in body.fixtures]
        self._local_fixtures.append(fixtures)

        def grow(arr: np.ndarray, value) -> np.ndarray:
            return np.concatenate([arr, np.asarray([value], dtype=arr.dtype)])

        self.pos = np.vstack([self.pos, [body.position]])
        self.angle = grow(self.angle, body.angle)
        self.vel = np.vstack([self.vel, [body.velocity]])
        self.omega = grow(self.omega, body.angular_velocity)
        self.mass = grow(self.mass, body.mass)
        self.inv_mass = grow(self.inv_mass, 0.0 if body.mass == 0 else 1.0 / body.mass)
        self.inv_inertia = grow(self.inv_inertia, body.inverse_inertia if body.mass > 0 else 0.0)
        self.friction = grow(self.friction, body.friction)
        self.restitution = grow(self.restitution, body.restitution)
        self.force = np.vstack([self.force, [(0.0, 0.0)]])
        self.torque = grow(self.torque, 0.0)

        for poly in fixtures:
            self._fx_body = np.concatenate([self._fx_body, [i]])
            self._fx_off = np.concatenate([self._fx_off, [len(self._verts_local)]])
            self._fx_n = np.concatenate([self._fx_n, [len(poly)]])
            self._verts_local = np.vstack([self._verts_local, poly])
        return i

    def apply_force(self, index: int, fx: float, fy: float, torque: float = 0.0) -> None:
        """Accumulate a force/torque for the next step; cleared afterwards."""
        self.force[index, 0] += fx
        self.force[index, 1] += fy
        self.torque[index] += torque

    def step(self) -> None:
        _kernels.step_kernel(
            self.pos,
            self.angle,
            self.vel,
            self.omega,
            self.inv_mass,
            self.inv_inertia,
            self.friction,
            self.restitution,
            self.force,
            self.torque,
            self._fx_body,
            self._fx_off,
            self._fx_n,
            self._verts_local,
            self.gravity[0],
            self.gravity[1],
            self.dt,
            self.solver_iterations,
            BAUMGARTE,
            SLOP,
            RESTITUTION_THRESHOLD,
        )
        self.force[:] = 0.0
        self.torque[:] = 0.0
        self.step_count += 1

    def detect_contacts(self) -> list[ContactManifold]:
        man = _kernels.collide(
            self.pos,
            self.angle,
            self.inv_mass,
            self._fx_body,
            self._fx_off,
            self._fx_n,
            self._verts_local,
        )
        a, b, nx, ny, npts, px, py, pen = man
        out: list[ContactManifold] = []
        for c in range(len(a)):
            points = tuple(
                (float(px[c, p]), float(py[c, p])) for p in range(npts[c])
            )
            out.append(
                ContactManifold(
                    body_pair=(int(a[c]), int(b[c])),
                    normal=(float(nx[c]), float(ny[c])),
                    penetration=float(max(pen[c, p] for p in range(npts[c]))),
                    contact_points=points,
                )
            )
        return out

    def fixture_world_vertices(self, index: int) -> list[np.ndarray]:
        return [
            transform(poly, self.pos[index], float(self.angle[index]))
            for poly in self._local_fixtures[index]
        ]

    def local_fixtures(self, index: int) -> list[np.ndarray]:
        return self._local_fixtures[index]

    def query_region(self, polygon: np.ndarray) -> list[int]:
        """Bodies with any fixture intersecting the convex region; tangency
        counts (closed-set convention)."""
        region = np.asarray(polygon, dtype=float)
        hits: list[int] = []
        for i in range(self.body_count):
            for poly in self.fixture_world_vertices(i):
                if polygons_intersect(poly, region):
                    hits.append(i)
                    break
        return hits

    def state_hash(self) -> str:
        import hashlib

        h = hashlib.sha256()
        for arr in (self.pos, self.angle, self.vel, self.omega):
            h.update(arr.tobytes())
        return h.hexdigest()


def rectangle_mass_properties(length: float, thickness: float, density: float) -> tuple[float, float]:
    """(mass, inertia about own centroid) of a solid rectangle."""
    m = density * length * thickness
    return m, m * (length * length + thickness * thickness) / 12.0


def compound_from_chain(
    chain: Optional[BrickChain],
    density: float = 1.0,
    friction: float = 0.5,
    restitution: float = 0.2,
    tag: BodyTag = BodyTag.DESIGN,
    static: bool = False,
) -> RigidBody:
    """One rigid body whose fixtures are the chain's brick rectangles.

    The body frame is centered at the compound center of mass (area-weighted
    over bricks; overlap between bricks is double-counted, which keeps the
    mass properties deterministic and monotone in brick count). The returned
    body's position is the COM expressed in the chain's own coordinates.
    """
    if chain is None:
        raise EmptyChainError("cannot build a body from an empty chain")
    rects = chain_vertices(chain)
    masses = []
    inertias = []
    centers = []
    for rect in rects:
        m, i_own = rectangle_mass_properties(chain.brick_length, chain.brick_thickness, density)
        masses.append(m)
        inertias.append(i_own)
        centers.append(polygon_centroid(rect))
    total_mass = float(sum(masses))
    com = np.sum([m * c for m, c in zip(masses, centers)], axis=0) / total_mass
    inertia = 0.0
    for m, i_own, c in zip(masses, inertias, centers):
        d2 = float((c[0] - com[0]) ** 2 + (c[1] - com[1]) ** 2)
        inertia += i_own + m * d2
    return RigidBody(
        fixtures=[rect - com for rect in rects],
        position=(float(com[0]), float(com[1])),
        mass=0.0 if static else total_mass,
        inverse_inertia=0.0 if static else 1.0 / inertia,
        friction=friction,
        restitution=restitution,
        tag=tag,
    )


def make_ball(
    radius: float,
    density: float = 1.0,
    friction: float = 0.4,
    restitution: float = 0.3,
    position: tuple[float, float] = (0.0, 0.0),
    velocity: tuple[float, float] = (0.0, 0.0),
    tag: BodyTag = BodyTag.BALL,
    segments: int = 16,
) -> RigidBody:
    """Circle-ish dynamic body: a regular 16-gon keeps the narrow phase
    polygon-only."""
    poly = regular_polygon(radius, segments)
    area = polygon_area(poly)
    mass = density * area
    inertia = polygon_inertia(poly, density)
    return RigidBody(
        fixtures=[poly],
        position=position,
        velocity=velocity,
        mass=mass,
        inverse_inertia=1.0 / inertia,
        friction=friction,
        restitution=restitution,
        tag=tag,
    )


def make_static_box(
    center: tuple[float, float],
    half_w: float,
    half_h: float,
    angle: float = 0.0,
    friction: float = 0.6,
    restitution: float = 0.1,
    tag: BodyTag = BodyTag.GROUND,
) -> RigidBody:
    from .geometry import box

    return RigidBody(
        fixtures=[box(half_w, half_h)],
        position=center,
        angle=angle,
        friction=friction,
        restitution=restitution,
        tag=tag,
    )
