from __future__ import annotations

import math
import random

import numpy as np
import pytest

from coevo.geometry import box, polygon_area, polygon_centroid
from coevo.physics import (
    DT,
    GRAVITY,
    SLOP,
    BodyTag,
    RigidBody,
    World,
    compound_from_chain,
    make_ball,
    make_static_box,
    rectangle_mass_properties,
)
from coevo.shapes import BrickChain, EmptyChainError


def dyn_box(half: float, position, velocity=(0.0, 0.0), restitution=0.2, friction=0.5, mass=1.0):
    side = 2 * half
    inertia = mass * (side * side + side * side) / 12.0
    return RigidBody(
        fixtures=[box(half, half)],
        position=position,
        velocity=velocity,
        mass=mass,
        inverse_inertia=1.0 / inertia,
        friction=friction,
        restitution=restitution,
        tag=BodyTag.DESIGN,
    )


def test_free_fall_matches_accumulated_gravity_exactly():
    w = World()
    w.add_body(dyn_box(0.5, (0.0, 10.0)))
    for _ in range(60):
        w.step()
    acc = 0.0
    for _ in range(60):  # oracle: the bare semi-implicit accumulation
        acc += 9.81 * DT
    assert w.vel[0, 1] == -acc
    drop_oracle = sum(k * 9.81 * DT * DT for k in range(1, 61))
    assert 10.0 - w.pos[0, 1] == pytest.approx(drop_oracle, rel=1e-12)


def test_static_only_world_changes_nothing_but_step_count():
    w = World()
    w.add_body(make_static_box((0.0, 0.0), 5.0, 0.5))
    pos0 = w.pos.copy()
    for _ in range(50):
        w.step()
    assert w.step_count == 50
    np.testing.assert_array_equal(w.pos, pos0)
    assert np.all(w.vel == 0.0)


def test_equal_mass_elastic_collision_swaps_velocities():
    w = World(gravity=(0.0, 0.0))
    w.add_body(dyn_box(0.5, (-1.0, 0.0), velocity=(1.0, 0.0), restitution=1.0, friction=0.0))
    w.add_body(dyn_box(0.5, (1.0, 0.0), velocity=(-1.0, 0.0), restitution=1.0, friction=0.0))
    for _ in range(120):
        w.step()
    assert w.vel[0, 0] == pytest.approx(-1.0, rel=0.02)
    assert w.vel[1, 0] == pytest.approx(1.0, rel=0.02)


def test_two_body_momentum_conserved_without_gravity():
    w = World(gravity=(0.0, 0.0))
    w.add_body(dyn_box(0.5, (-1.0, 0.05), velocity=(2.0, 0.0), restitution=1.0, friction=0.0))
    w.add_body(dyn_box(0.5, (1.0, -0.05), velocity=(-1.0, 0.0), restitution=1.0, friction=0.0, mass=2.0))
    p0 = 1.0 * w.vel[0] + 2.0 * w.vel[1]
    for _ in range(200):
        w.step()
    p1 = 1.0 * w.vel[0] + 2.0 * w.vel[1]
    assert np.linalg.norm(p1 - p0) < 1e-6 * max(1.0, np.linalg.norm(p0))


def test_box_settles_on_ground():
    w = World()
    w.add_body(make_static_box((0.0, -0.5), 10.0, 0.5))
    w.add_body(dyn_box(0.5, (0.0, 1.0), restitution=0.0))
    for _ in range(300):
        w.step()
    speed = math.hypot(w.vel[1, 0], w.vel[1, 1])
    assert speed < 0.01
    for _ in range(100):
        w.step()
        penetration = 0.5 - w.pos[1, 1]  # box bottom below the ground top
        assert penetration <= SLOP + 1e-9


def total_energy(w: World, masses, inertias) -> float:
    e = 0.0
    for i, (m, inertia) in enumerate(zip(masses, inertias)):
        if m == 0:
            continue
        v2 = float(w.vel[i, 0] ** 2 + w.vel[i, 1] ** 2)
        e += 0.5 * m * v2 + 0.5 * inertia * float(w.omega[i] ** 2)
        e += m * 9.81 * float(w.pos[i, 1]) if w.gravity[1] != 0 else 0.0
    return e


def test_energy_never_increases_free_fall_and_rest():
    w = World()
    w.add_body(make_static_box((0.0, -0.5), 10.0, 0.5))
    w.add_body(dyn_box(0.5, (0.0, 0.504), restitution=0.0))  # just above contact
    masses = [0.0, 1.0]
    inertias = [0.0, 1.0 * (1 + 1) / 12.0]
    energy = total_energy(w, masses, inertias)
    for _ in range(400):
        w.step()
        after = total_energy(w, masses, inertias)
        assert after <= energy + 1e-6
        energy = after


def test_energy_never_increases_zero_g_collisions():
    for restitution in (1.0, 0.3):
        w = World(gravity=(0.0, 0.0))
        w.add_body(dyn_box(0.5, (-1.0, 0.02), velocity=(1.5, 0.0), restitution=restitution, friction=0.2))
        w.add_body(dyn_box(0.5, (1.0, -0.02), velocity=(-1.5, 0.0), restitution=restitution, friction=0.2))
        masses = [1.0, 1.0]
        inertias = [(1 + 1) / 12.0] * 2
        energy = total_energy(w, masses, inertias)
        for _ in range(200):
            w.step()
            after = total_energy(w, masses, inertias)
            assert after <= energy + 1e-6
            energy = after


def test_static_bodies_never_move():
    w = World()
    w.add_body(make_static_box((0.0, 0.0), 2.0, 0.5, angle=0.3))
    w.add_body(dyn_box(0.4, (0.0, 2.0)))
    pose = (w.pos[0].copy(), float(w.angle[0]))
    for _ in range(500):
        w.step()
    np.testing.assert_array_equal(w.pos[0], pose[0])
    assert float(w.angle[0]) == pose[1]


def random_scene(seed: int) -> World:
    rng = random.Random(seed)
    w = World()
    w.add_body(make_static_box((0.0, -0.5), 12.0, 0.5))
    for _ in range(rng.randint(3, 7)):
        kind = rng.random()
        x = rng.uniform(-4, 4)
        y = rng.uniform(0.5, 5)
        if kind < 0.5:
            w.add_body(make_ball(rng.uniform(0.1, 0.3), position=(x, y),
                                 velocity=(rng.uniform(-2, 2), rng.uniform(-1, 1))))
        else:
            w.add_body(dyn_box(rng.uniform(0.2, 0.5), (x, y),
                               velocity=(rng.uniform(-2, 2), 0.0),
                               restitution=rng.uniform(0, 0.8), friction=rng.uniform(0, 1)))
    return w


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_step_bit_deterministic_on_random_scenes(seed):
    a, b = random_scene(seed), random_scene(seed)
    for _ in range(1000):
        a.step()
        b.step()
    assert a.state_hash() == b.state_hash()


def test_compound_single_brick_mass_and_com():
    chain = BrickChain(angles=(0.0,))
    body = compound_from_chain(chain, density=1.0)
    assert body.mass == pytest.approx(0.2)
    assert body.position == pytest.approx((0.5, 0.0))


def test_compound_single_brick_inertia():
    m, inertia = rectangle_mass_properties(1.0, 0.2, 1.0)
    assert inertia == pytest.approx(0.2 * (1.0 + 0.04) / 12.0)
    body = compound_from_chain(BrickChain(angles=(0.0,)), density=1.0)
    assert 1.0 / body.inverse_inertia == pytest.approx(inertia)


def test_compound_square_loop_com():
    # oracle: area-weighted centroid of the four rectangles, computed directly
    H = math.pi / 2
    chain = BrickChain(angles=(0.0, H, H, H))
    from coevo.shapes import chain_vertices

    rects = chain_vertices(chain)
    total = 0.0
    cx = cy = 0.0
    for rect in rects:
        area = abs(polygon_area(rect))
        c = polygon_centroid(rect)
        total += area
        cx += area * c[0]
        cy += area * c[1]
    oracle = (cx / total, cy / total)
    assert oracle == pytest.approx((0.5, 0.5), abs=1e-12)
    body = compound_from_chain(chain, density=1.0)
    assert body.position == pytest.approx(oracle, abs=1e-12)


def test_compound_requires_bricks():
    with pytest.raises(EmptyChainError):
        compound_from_chain(None)


def test_compound_static_flag():
    body = compound_from_chain(BrickChain(angles=(0.0,)), static=True)
    assert body.mass == 0.0
    assert body.inverse_inertia == 0.0


def test_body_validation():
    with pytest.raises(ValueError):
        RigidBody(fixtures=[box(0.5, 0.5)], mass=-1.0).validate()
    with pytest.raises(ValueError):
        RigidBody(fixtures=[box(0.5, 0.5)], mass=0.0, velocity=(1.0, 0.0)).validate()
    with pytest.raises(ValueError):
        RigidBody(fixtures=[np.array([(0, 0), (1, 1), (1, 0)])], mass=1.0).validate()  # CW
    with pytest.raises(ValueError):
        RigidBody(fixtures=[box(0.5, 0.5)], mass=1.0, friction=1.5).validate()
