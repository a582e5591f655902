"""coevo: humans and an evolutionary agent co-designing 2D brick-chain
shapes, scored in deterministic physics challenges."""

from .challenges import (
    ChallengeId,
    ChallengeSpec,
    EpisodeResult,
    build_env,
    default_specs,
    run_episode,
)
from .evolve import EvoParams, RunState, init_run, inject, next_generation, run_control
from .physics import BodyTag, ContactManifold, RigidBody, World, compound_from_chain
from .shapes import (
    ANGLE_STEP,
    MAX_BRICKS,
    Action,
    ActionLog,
    ActorId,
    ActorKind,
    AddBrick,
    Brick,
    BrickChain,
    End,
    RemoveBrick,
    RotateBrick,
    apply_action,
    chain_vertices,
    genotype_distance,
    random_chain,
    replay,
)
from .store import SessionStore
from .wire import design_from_wire, design_hash, design_to_wire

__version__ = "0.1.0"
