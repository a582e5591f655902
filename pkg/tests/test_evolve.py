from __future__ import annotations

import json
import math
import random

import pytest

from coevo.challenges import ChallengeId
from coevo.evolve import (
    EvoParams,
    IllegalTransitionError,
    Individual,
    InvalidParamsError,
    Origin,
    RunCommand,
    RunDoneError,
    RunStatus,
    UnevaluatedError,
    archive_update,
    history_csv,
    init_run,
    inject,
    next_generation,
    run_control,
    run_state_from_wire,
    run_state_to_wire,
)
from coevo.shapes import (
    ActorId,
    ActorKind,
    BrickChain,
    EmptyChainError,
    apply_action,
    genotype_distance,
    mutation_actions,
    random_chain,
)

HUMAN = ActorId(ActorKind.HUMAN, "tester")


def small_params(seed: int, pop: int = 8, **kw) -> EvoParams:
    return EvoParams(master_seed=seed, population_size=pop, **kw)


@pytest.fixture(scope="module")
def move_spec(specs):
    return specs[ChallengeId.MOVE]


def test_params_validation():
    with pytest.raises(InvalidParamsError):
        small_params(1, pop=1).validate()
    with pytest.raises(InvalidParamsError):
        EvoParams(master_seed=1, population_size=4, elite_count=4).validate()
    with pytest.raises(InvalidParamsError):
        EvoParams(master_seed=1, p_crossover=1.5).validate()
    with pytest.raises(InvalidParamsError):
        EvoParams(master_seed=1, mutation_weights={"add": 0.0}).validate()


def test_init_run_population(move_spec):
    state = init_run(move_spec, small_params(3))
    assert len(state.population) == 8
    assert all(i.origin is Origin.RANDOM for i in state.population)
    assert all(i.fitness is not None for i in state.population)
    assert state.generation == 0
    assert state.best_ever.fitness == max(i.fitness for i in state.population)
    assert len(state.history) == 1


def test_init_run_deterministic(move_spec):
    a = init_run(move_spec, small_params(11))
    b = init_run(move_spec, small_params(11))
    assert [i.genotype_hash for i in a.population] == [i.genotype_hash for i in b.population]
    assert [i.fitness for i in a.population] == [i.fitness for i in b.population]


def test_elitism_keeps_best(move_spec):
    state = init_run(move_spec, small_params(5))
    for _ in range(5):
        prev_best = state.history[-1][0]
        next_generation(state)
        assert state.history[-1][0] >= prev_best


def test_degenerate_params_clone_only(move_spec):
    params = small_params(7, p_crossover=0.0, mutations_min=0, mutations_max=0)
    state = init_run(move_spec, params)
    parents = {i.genotype_hash for i in state.population}
    next_generation(state)
    assert {i.genotype_hash for i in state.population} <= parents


def test_generation_counts_and_origins(move_spec):
    state = init_run(move_spec, small_params(13, pop=6))
    next_generation(state)
    assert state.generation == 1
    assert len(state.population ) == 6
    origins = {i.origin for i in state.population}
    assert origins <= {Origin.RANDOM, Origin.MUTATION, Origin.CROSSOVER}


def test_mutation_closure_fuzz():
    # 10,000 legal-by-construction actions never break chain invariants
    rng = random.Random(99)
    chain = random_chain(rng, 1, 8)
    weights = {"add": 1.0, "remove": 1.0, "rotate": 1.0}
    for _ in range(10_000):
        chain = apply_action(chain, mutation_actions(rng, chain, weights))
        assert chain is not None
        assert 1 <= len(chain) <= 32
        for a in chain.angles:
            assert a == round(a / (math.pi / 12)) * (math.pi / 12)


def test_inject_high_scorer_becomes_best(move_spec, ring12):
    state = init_run(move_spec, small_params(21))
    before = state.best_ever.fitness
    inject(state, ring12, HUMAN)
    assert state.best_ever.origin is Origin.INJECTED
    assert state.best_ever.fitness >= before
    assert state.best_ever.injected_by == HUMAN
    assert state.history[-1][0] == state.best_ever.fitness


def test_inject_low_scorer_replaces_worst(move_spec):
    state = init_run(move_spec, small_params(22))
    best_before = state.best_ever
    fitnesses = sorted(i.fitness for i in state.population)
    # a 1-brick chain on the slope barely moves; it lands near the bottom
    inject(state, BrickChain(angles=(0.0,)), HUMAN)
    assert state.best_ever is best_before
    assert sum(1 for i in state.population if i.origin is Origin.INJECTED) == 1
    assert sorted(i.fitness for i in state.population)[-1] == fitnesses[-1]


def test_inject_rejects_empty_and_done(move_spec):
    state = init_run(move_spec, small_params(23))
    with pytest.raises(EmptyChainError):
        inject(state, None, HUMAN)
    run_control(state, RunCommand.STOP)
    with pytest.raises(RunDoneError):
        inject(state, BrickChain(angles=(0.0,)), HUMAN)


def test_inject_leaves_rng_untouched(move_spec, ring12):
    state = init_run(move_spec, small_params(24))
    before = state.rng.getstate()
    inject(state, ring12, HUMAN)
    assert state.rng.getstate() == before


def test_inject_then_restore_runs_identically(move_spec, ring12):
    # run A: untouched; run B: inject, then put the replaced individual back
    a = init_run(move_spec, small_params(25))
    b = init_run(move_spec, small_params(25))
    worst = min(range(len(b.population)), key=lambda i: b.population[i].fitness)
    replaced = b.population[worst]
    inject(b, ring12, HUMAN)
    b.population[worst] = replaced
    b.best_ever = a.best_ever
    b.archive = list(a.archive)
    b.history[-1] = a.history[-1]
    for _ in range(3):
        next_generation(a)
        next_generation(b)
    assert [i.genotype_hash for i in a.population] == [i.genotype_hash for i in b.population]
    assert a.rng.getstate() == b.rng.getstate()


def test_next_generation_rejects_done(move_spec):
    state = init_run(move_spec, small_params(26))
    run_control(state, RunCommand.STOP)
    with pytest.raises(RunDoneError):
        next_generation(state)


# -- archive -------------------------------------------------------------------


def evaluated(chain: BrickChain, fitness: float) -> Individual:
    return Individual(genotype=chain, fitness=fitness, genotype_hash=f"h{fitness}")


def archive_state(move_spec):
    state = init_run(move_spec, small_params(31, pop=2, init_len_min=1, init_len_max=1))
    state.archive = []
    return state


def test_archive_admits_qualifying_candidate(move_spec):
    state = archive_state(move_spec)
    archive_update(state, evaluated(BrickChain(angles=(0.0,) * 4), 0.9))
    assert len(state.archive) == 1


def test_archive_rejects_below_score_floor(move_spec):
    state = archive_state(move_spec)
    archive_update(state, evaluated(BrickChain(angles=(0.0,) * 4), 0.1))
    assert state.archive == []


def test_archive_rejects_duplicate_genotype(move_spec):
    state = archive_state(move_spec)
    chain = BrickChain(angles=(0.0,) * 4)
    archive_update(state, evaluated(chain, 0.9))
    archive_update(state, evaluated(chain, 0.7))
    assert len(state.archive) == 1
    assert state.archive[0].fitness == 0.9


def test_archive_near_one_member_replacement(move_spec):
    state = archive_state(move_spec)
    base = BrickChain(angles=(0.0,) * 4)
    near = BrickChain(angles=(math.pi / 12, 0.0, 0.0, 0.0))  # distance pi/12 < 1.0
    assert genotype_distance(base, near) < state.params.archive_distance_min
    archive_update(state, evaluated(base, 0.6))
    archive_update(state, evaluated(near, 0.8))
    assert len(state.archive) == 1
    assert state.archive[0].fitness == 0.8
    # weaker near-candidate does not replace
    archive_update(state, evaluated(base, 0.7))
    assert state.archive[0].fitness == 0.8


def test_archive_rejects_unevaluated(move_spec):
    state = archive_state(move_spec)
    with pytest.raises(UnevaluatedError):
        archive_update(state, Individual(genotype=BrickChain(angles=(0.0,))))


def test_archive_soundness_after_run(move_spec):
    state = init_run(move_spec, small_params(33, pop=12))
    for _ in range(8):
        next_generation(state)
    for i, a in enumerate(state.archive):
        assert a.fitness >= state.params.archive_score_min
        for b in state.archive[i + 1 :]:
            assert genotype_distance(a.genotype, b.genotype) >= state.params.archive_distance_min


# -- control -------------------------------------------------------------------


def test_run_control_transitions(move_spec):
    state = init_run(move_spec, small_params(41))
    assert state.status is RunStatus.RUNNING
    run_control(state, RunCommand.PAUSE)
    assert state.status is RunStatus.PAUSED
    run_control(state, RunCommand.RESUME)
    assert state.status is RunStatus.RUNNING
    run_control(state, RunCommand.STOP)
    assert state.status is RunStatus.DONE


def test_run_control_illegal_transitions(move_spec):
    state = init_run(move_spec, small_params(42))
    with pytest.raises(IllegalTransitionError):
        run_control(state, RunCommand.RESUME)  # not paused
    run_control(state, RunCommand.STOP)
    for command in (RunCommand.PAUSE, RunCommand.RESUME, RunCommand.STOP):
        with pytest.raises(IllegalTransitionError):
            run_control(state, command)


# -- persistence ---------------------------------------------------------------


def test_round_trip_resume_identical(move_spec):
    a = init_run(move_spec, small_params(51))
    for _ in range(3):
        next_generation(a)
    blob = json.dumps(run_state_to_wire(a))
    b = run_state_from_wire(json.loads(blob))
    for _ in range(3):
        next_generation(a)
        next_generation(b)
    assert [i.genotype_hash for i in a.population] == [i.genotype_hash for i in b.population]
    assert a.best_ever.fitness == b.best_ever.fitness
    assert a.history == b.history
    assert a.rng.getstate() == b.rng.getstate()


def test_wire_carries_format_version_and_hex_rng(move_spec):
    state = init_run(move_spec, small_params(52))
    wire = run_state_to_wire(state)
    assert wire["format_version"] == "v1"
    bytes.fromhex(wire["rng_state"])  # opaque hex


def test_history_csv_format(move_spec):
    state = init_run(move_spec, small_params(53))
    next_generation(state)
    lines = history_csv(state).splitlines()
    assert lines[0] == "generation,best,mean"
    assert len(lines) == 3
    gen, best, mean = lines[1].split(",")
    assert gen == "0"
    float(best), float(mean)
