"""Population-based design optimizer with mid-run human injection.

A generational GA whose variation operators are literally the shared edit
vocabulary: children are cloned or crossed over, then mutated by random
add/remove/rotate actions. All individuals of a run are evaluated under one
eval seed, so fitness comparisons happen under identical episode conditions.
A diversity archive keeps high-scoring designs that are pairwise distant in
genotype space. Hand-made designs can be injected at any point; injection
never touches the run's RNG stream, so the run's future is unchanged.
"""

from __future__ import annotations

import json
import random
import uuid
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from .challenges import ChallengeSpec, run_episode, spec_from_wire, spec_to_wire
from .shapes import (
    ActorId,
    BrickChain,
    EmptyChainError,
    apply_action,
    genotype_distance,
    mutation_actions,
    random_chain,
)
from .wire import (
    FORMAT_VERSION,
    WireError,
    actor_from_wire,
    actor_to_wire,
    design_from_wire,
    design_hash,
    design_to_wire,
)


class InvalidParamsError(ValueError):
    """Evolution parameters violate their invariants."""


class RunDoneError(RuntimeError):
    """Mutation attempted on a finished run."""


class IllegalTransitionError(RuntimeError):
    """Run-control command not legal for the current status."""


class UnevaluatedError(ValueError):
    """Candidate has no fitness yet."""


class Origin(Enum):
    RANDOM = "random"
    MUTATION = "mutation"
    CROSSOVER = "crossover"
    INJECTED = "injected"


class RunStatus(Enum):
    RUNNING = "running"
    PAUSED = "paused"
    DONE = "done"


class RunCommand(Enum):
    PAUSE = "pause"
    RESUME = "resume"
    STOP = "stop"


@dataclass
class Individual:
    genotype: BrickChain
    fitness: Optional[float] = None
    origin: Origin = Origin.RANDOM
    eval_seed: int = 0
    genotype_hash: str = ""
    injected_by: Optional[ActorId] = None


@dataclass
class EvoParams:
    master_seed: int
    population_size: int = 32
    tournament_k: int = 3
    elite_count: int = 1
    p_crossover: float = 0.5
    mutation_weights: dict[str, float] = field(
        default_factory=lambda: {"add": 1.0, "remove": 1.0, "rotate": 1.0}
    )
    mutations_min: int = 1
    mutations_max: int = 3
    init_len_min: int = 1
    init_len_max: int = 8
    archive_score_min: float = 0.5
    archive_distance_min: float = 1.0

    def validate(self) -> None:
        if self.population_size < 2:
            raise InvalidParamsError("population_size must be >= 2")
        if not 1 <= self.elite_count < self.population_size:
            raise InvalidParamsError("need 1 <= elite_count < population_size")
        if not 0.0 <= self.p_crossover <= 1.0:
            raise InvalidParamsError("p_crossover must be in [0, 1]")
        if self.tournament_k < 1:
            raise InvalidParamsError("tournament_k must be >= 1")
        if not 1 <= self.init_len_min <= self.init_len_max:
            raise InvalidParamsError("bad initial length bounds")
        if not 0 <= self.mutations_min <= self.mutations_max:
            raise InvalidParamsError("bad mutations_per_child range")
        weights = {k: float(v) for k, v in self.mutation_weights.items()}
        if any(v < 0 for v in weights.values()) or all(v == 0 for v in weights.values()):
            raise InvalidParamsError("mutation weights must be non-negative, not all zero")


@dataclass
class RunState:
    run_id: str
    challenge: ChallengeSpec
    params: EvoParams
    generation: int
    population: list[Individual]
    best_ever: Individual
    archive: list[Individual]
    rng: random.Random
    eval_seed: int
    status: RunStatus
    history: list[tuple[float, float]]  # (best, mean) per generation
    fitness_cache: dict[str, float] = field(default_factory=dict)


def _evaluate(state: RunState, individual: Individual) -> None:
    """Fill in fitness from a scored episode (memoized per genotype hash —
    episodes are deterministic, so equal genotypes score equally)."""
    h = design_hash(individual.genotype)
    individual.genotype_hash = h
    individual.eval_seed = state.eval_seed
    cached = state.fitness_cache.get(h)
    if cached is None:
        result = run_episode(state.challenge, individual.genotype, state.eval_seed)
        cached = result.score
        state.fitness_cache[h] = cached
    individual.fitness = cached


def _note_evaluated(state: RunState, individual: Individual) -> None:
    if state.best_ever is None or individual.fitness > state.best_ever.fitness:
        state.best_ever = individual
    archive_update(state, individual)


def _record_history(state: RunState) -> None:
    fits = [i.fitness for i in state.population]
    state.history.append((max(fits), sum(fits) / len(fits)))


def init_run(
    challenge: ChallengeSpec,
    params: EvoParams,
    run_id: Optional[str] = None,
) -> RunState:
    """Fresh run: a fully evaluated random population at generation 0.

    Deterministic for a given master_seed; the eval seed shared by every
    evaluation of the run is derived from it first."""
    params.validate()
    rng = random.Random(params.master_seed)
    eval_seed = rng.randrange(2**31)
    state = RunState(
        run_id=run_id or uuid.uuid4().hex[:12],
        challenge=challenge,
        params=params,
        generation=0,
        population=[],
        best_ever=None,  # set below
        archive=[],
        rng=rng,
        eval_seed=eval_seed,
        status=RunStatus.RUNNING,
        history=[],
    )
    for _ in range(params.population_size):
        genotype = random_chain(rng, params.init_len_min, params.init_len_max)
        ind = Individual(genotype=genotype, origin=Origin.RANDOM)
        _evaluate(state, ind)
        state.population.append(ind)
    for ind in state.population:
        _note_evaluated(state, ind)
    _record_history(state)
    return state


def _tournament(state: RunState) -> Individual:
    pop = state.population
    k = min(state.params.tournament_k, len(pop))
    picks = state.rng.sample(range(len(pop)), k)
    best = picks[0]
    for i in picks[1:]:
        if pop[i].fitness > pop[best].fitness:
            best = i
    return pop[best]


def _crossover_angles(a: BrickChain, b: BrickChain, rng: random.Random) -> tuple[float, ...]:
    """One-point crossover on angle lists: prefix of a, suffix of b, cut
    drawn uniformly over the shorter parent."""
    shorter = min(len(a), len(b))
    if shorter < 2:
        return a.angles
    cut = rng.randint(1, shorter - 1)
    child = a.angles[:cut] + b.angles[cut:]
    return child[: max(len(a), len(b))]


def next_generation(state: RunState) -> RunState:
    """Elites unchanged, remainder bred by tournament selection with
    crossover/clone plus 1..k random edit actions, all children evaluated."""
    if state.status is RunStatus.DONE:
        raise RunDoneError("run is done")
    params = state.params
    ranked = sorted(
        range(len(state.population)),
        key=lambda i: (-state.population[i].fitness, i),
    )
    elites = [state.population[i] for i in ranked[: params.elite_count]]

    children: list[Individual] = []
    while len(children) < params.population_size - params.elite_count:
        if state.rng.random() < params.p_crossover:
            pa = _tournament(state)
            pb = _tournament(state)
            angles = _crossover_angles(pa.genotype, pb.genotype, state.rng)
            origin = Origin.CROSSOVER
        else:
            angles = _tournament(state).genotype.angles
            origin = Origin.MUTATION
        chain = BrickChain(angles=angles)
        for _ in range(state.rng.randint(params.mutations_min, params.mutations_max)):
            chain = apply_action(chain, mutation_actions(state.rng, chain, params.mutation_weights))
        children.append(Individual(genotype=chain, origin=origin))

    for child in children:
        _evaluate(state, child)
    for child in children:
        _note_evaluated(state, child)
    state.population = elites + children
    state.generation += 1
    _record_history(state)
    return state


def inject(state: RunState, design: BrickChain, actor: ActorId) -> RunState:
    """Evaluate a hand-made design and swap it in for the current worst
    individual. The generation counter and the run's RNG stream are left
    untouched, so injection never perturbs the run's future random choices."""
    if design is None:
        raise EmptyChainError("cannot inject an empty design")
    if state.status is RunStatus.DONE:
        raise RunDoneError("run is done")
    ind = Individual(genotype=design, origin=Origin.INJECTED, injected_by=actor)
    _evaluate(state, ind)
    worst = 0
    for i in range(1, len(state.population)):
        if state.population[i].fitness < state.population[worst].fitness:
            worst = i
    state.population[worst] = ind
    _note_evaluated(state, ind)
    if state.history:  # refresh the current generation's row: its population changed
        fits = [i.fitness for i in state.population]
        state.history[-1] = (max(fits), sum(fits) / len(fits))
    return state


def archive_update(state: RunState, candidate: Individual) -> RunState:
    """Admit the candidate if it clears the score floor and is far enough
    from every member; a strictly fitter candidate close to exactly one
    member replaces that member."""
    if candidate.fitness is None:
        raise UnevaluatedError("archive candidates must be evaluated")
    if candidate.fitness < state.params.archive_score_min:
        return state
    near = [
        i
        for i, member in enumerate(state.archive)
        if genotype_distance(candidate.genotype, member.genotype)
        < state.params.archive_distance_min
    ]
    if not near:
        state.archive.append(candidate)
    elif len(near) == 1 and candidate.fitness > state.archive[near[0]].fitness:
        state.archive[near[0]] = candidate
    return state


def run_control(state: RunState, command: RunCommand) -> RunState:
    transitions = {
        (RunStatus.RUNNING, RunCommand.PAUSE): RunStatus.PAUSED,
        (RunStatus.PAUSED, RunCommand.RESUME): RunStatus.RUNNING,
        (RunStatus.RUNNING, RunCommand.STOP): RunStatus.DONE,
        (RunStatus.PAUSED, RunCommand.STOP): RunStatus.DONE,
    }
    new = transitions.get((state.status, command))
    if new is None:
        raise IllegalTransitionError(f"cannot {command.value} a {state.status.value} run")
    state.status = new
    return state


def history_csv(state: RunState) -> str:
    lines = ["generation,best,mean"]
    for gen, (best, mean) in enumerate(state.history):
        lines.append(f"{gen},{best:.9g},{mean:.9g}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# persistence


def _rng_state_to_hex(rng: random.Random) -> str:
    version, internal, gauss = rng.getstate()
    payload = json.dumps([version, list(internal), gauss])
    return payload.encode().hex()


def _rng_state_from_hex(hexstr: str) -> random.Random:
    version, internal, gauss = json.loads(bytes.fromhex(hexstr).decode())
    rng = random.Random()
    rng.setstate((version, tuple(internal), gauss))
    return rng


def _individual_to_wire(ind: Individual) -> dict:
    return {
        "genotype": design_to_wire(ind.genotype),
        "fitness": ind.fitness,
        "origin": ind.origin.value,
        "eval_seed": ind.eval_seed,
        "genotype_hash": ind.genotype_hash,
        "injected_by": None if ind.injected_by is None else actor_to_wire(ind.injected_by),
    }


def _individual_from_wire(data: dict) -> Individual:
    return Individual(
        genotype=design_from_wire(data["genotype"]),
        fitness=data["fitness"],
        origin=Origin(data["origin"]),
        eval_seed=int(data["eval_seed"]),
        genotype_hash=str(data.get("genotype_hash", "")),
        injected_by=None
        if data.get("injected_by") is None
        else actor_from_wire(data["injected_by"]),
    )


def params_to_wire(params: EvoParams) -> dict:
    return {
        "master_seed": params.master_seed,
        "population_size": params.population_size,
        "tournament_k": params.tournament_k,
        "elite_count": params.elite_count,
        "p_crossover": params.p_crossover,
        "mutation_weights": dict(params.mutation_weights),
        "mutations_min": params.mutations_min,
        "mutations_max": params.mutations_max,
        "init_len_min": params.init_len_min,
        "init_len_max": params.init_len_max,
        "archive_score_min": params.archive_score_min,
        "archive_distance_min": params.archive_distance_min,
    }


def params_from_wire(data: dict) -> EvoParams:
    params = EvoParams(master_seed=int(data["master_seed"]))
    for key in (
        "population_size",
        "tournament_k",
        "elite_count",
        "mutations_min",
        "mutations_max",
        "init_len_min",
        "init_len_max",
    ):
        if key in data:
            setattr(params, key, int(data[key]))
    for key in ("p_crossover", "archive_score_min", "archive_distance_min"):
        if key in data:
            setattr(params, key, float(data[key]))
    if "mutation_weights" in data:
        params.mutation_weights = {k: float(v) for k, v in data["mutation_weights"].items()}
    params.validate()
    return params


def run_state_to_wire(state: RunState) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "run_id": state.run_id,
        "challenge": spec_to_wire(state.challenge),
        "params": params_to_wire(state.params),
        "generation": state.generation,
        "status": state.status.value,
        "eval_seed": state.eval_seed,
        "rng_state": _rng_state_to_hex(state.rng),
        "population": [_individual_to_wire(i) for i in state.population],
        "best_ever": _individual_to_wire(state.best_ever),
        "archive": [_individual_to_wire(i) for i in state.archive],
        "history": [[b, m] for b, m in state.history],
    }


def run_state_from_wire(data: dict) -> RunState:
    try:
        return RunState(
            run_id=str(data["run_id"]),
            challenge=spec_from_wire(data["challenge"]),
            params=params_from_wire(data["params"]),
            generation=int(data["generation"]),
            population=[_individual_from_wire(i) for i in data["population"]],
            best_ever=_individual_from_wire(data["best_ever"]),
            archive=[_individual_from_wire(i) for i in data["archive"]],
            rng=_rng_state_from_hex(data["rng_state"]),
            eval_seed=int(data["eval_seed"]),
            status=RunStatus(data["status"]),
            history=[(float(b), float(m)) for b, m in data["history"]],
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WireError(f"malformed run state: {exc}") from exc
