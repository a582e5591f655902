"""Command-line front door: evaluate, evolve, replay, export, serve.

Exit codes: 0 success, 2 usage/input error, 1 internal error. Every command
that involves randomness takes an explicit --seed; there is no silent
entropy, so repeated invocations reproduce byte-identical output.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .challenges import ChallengeId, default_specs, result_to_wire, run_episode
from .evolve import (
    EvoParams,
    history_csv,
    init_run,
    inject as evolve_inject,
    next_generation,
    run_state_from_wire,
    run_state_to_wire,
)
from .shapes import ActorId, ActorKind, ChainError
from .store import SessionStore, StoreError
from .svg import chain_to_svg
from .wire import WireError, design_from_wire, design_to_wire


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _load_design(path: str):
    p = Path(path)
    if not p.exists():
        _fail(f"design file not found: {path}")
    try:
        return design_from_wire(json.loads(p.read_text()))
    except (json.JSONDecodeError, WireError, ChainError) as exc:
        _fail(f"bad design file {path}: {exc}")


def _challenge(challenge_id: str):
    try:
        return default_specs()[ChallengeId(challenge_id)]
    except ValueError:
        _fail(f"unknown challenge {challenge_id!r} (collect, protect, move, cut)")


@click.group()
@click.option(
    "--data-dir",
    envvar="COEVO_DATA_DIR",
    default="coevo-data",
    show_default=True,
    help="Directory for sessions, runs, trajectories, leaderboard.",
)
@click.pass_context
def main(ctx: click.Context, data_dir: str) -> None:
    """Co-creative brick-chain design: evaluate, evolve, replay, serve."""
    ctx.obj = {"data_dir": data_dir}


@main.command("eval")
@click.option("--challenge", "challenge_id", required=True)
@click.option("--design", "design_path", required=True, type=str)
@click.option("--seed", required=True, type=int)
@click.option("--frames", "frames_path", type=str, default=None, help="Write trajectory JSONL here.")
@click.option("--format", "fmt", type=click.Choice(["human", "json"]), default="human")
@click.pass_context
def eval_cmd(ctx, challenge_id, design_path, seed, frames_path, fmt) -> None:
    """Run one scored episode for a design file."""
    spec = _challenge(challenge_id)
    design = _load_design(design_path)
    result = run_episode(spec, design, seed, capture_frames=frames_path is not None)
    if frames_path:
        with open(frames_path, "w") as fh:
            for frame in result.frames or []:
                fh.write(json.dumps(frame) + "\n")
    if fmt == "json":
        click.echo(json.dumps(result_to_wire(result, frames_ref=frames_path), sort_keys=True))
    else:
        click.echo(f"score: {result.score:.3f}")
        for key in sorted(result.metrics):
            click.echo(f"  {key}: {result.metrics[key]:.6g}")


@main.command("evolve")
@click.option("--challenge", "challenge_id", required=True)
@click.option("--pop", "population", default=32, show_default=True, type=int)
@click.option("--gens", "generations", required=True, type=int)
@click.option("--seed", required=True, type=int)
@click.option("--out", "out_path", type=str, default=None, help="Write final run state JSON here.")
@click.option("--inject", "inject_arg", type=str, default=None, metavar="DESIGN.JSON@GEN")
@click.pass_context
def evolve_cmd(ctx, challenge_id, population, generations, seed, out_path, inject_arg) -> None:
    """Evolve designs; prints per-generation history CSV to stdout."""
    spec = _challenge(challenge_id)
    if generations < 0:
        _fail("--gens must be >= 0")
    inject_design = None
    inject_gen = -1
    if inject_arg:
        if "@" not in inject_arg:
            _fail("--inject expects design.json@generation")
        path, _, gen_str = inject_arg.rpartition("@")
        try:
            inject_gen = int(gen_str)
        except ValueError:
            _fail(f"bad injection generation {gen_str!r}")
        inject_design = _load_design(path)
    try:
        params = EvoParams(master_seed=seed, population_size=population)
        params.validate()
    except Exception as exc:
        _fail(str(exc))
    state = init_run(spec, params)
    if inject_gen == 0 and inject_design is not None:
        evolve_inject(state, inject_design, ActorId(ActorKind.HUMAN, "cli"))
    for _ in range(generations):
        next_generation(state)
        if state.generation == inject_gen and inject_design is not None:
            evolve_inject(state, inject_design, ActorId(ActorKind.HUMAN, "cli"))
    click.echo(history_csv(state), nl=False)
    wire = run_state_to_wire(state)
    store = SessionStore(ctx.obj["data_dir"])
    store.save_run(state.run_id, wire)
    if out_path:
        Path(out_path).write_text(json.dumps(wire, sort_keys=True))
    click.echo(f"run_id: {state.run_id}  best: {state.best_ever.fitness:.3f}", err=True)


@main.command("replay")
@click.option("--session", "session_id", required=True)
@click.option("--upto", type=int, default=None)
@click.option("--svg", "svg_path", type=str, default=None)
@click.pass_context
def replay_cmd(ctx, session_id, upto, svg_path) -> None:
    """Reconstruct a session's chain from its action log."""
    store = SessionStore(ctx.obj["data_dir"])
    try:
        log, chain = store.get_replay(session_id, upto)
    except StoreError as exc:
        _fail(str(exc))
    click.echo(f"entries: {len(log.entries)}")
    if chain is None:
        click.echo("chain: empty")
    else:
        click.echo(f"chain: {len(chain)} bricks, anchor ({chain.anchor[0]:.3f}, {chain.anchor[1]:.3f})")
        click.echo("angles: " + " ".join(f"{a:.4f}" for a in chain.angles))
    if svg_path:
        Path(svg_path).write_text(chain_to_svg(chain, title=f"session {session_id}"))


@main.command("gallery")
@click.option("--run", "run_path", required=True, type=str)
@click.option("--top", "top_k", default=5, show_default=True, type=int)
@click.option("--svg-dir", "svg_dir", required=True, type=str)
@click.pass_context
def gallery_cmd(ctx, run_path, top_k, svg_dir) -> None:
    """Export the best distinct designs of a finished run as SVG files."""
    p = Path(run_path)
    if not p.exists():
        _fail(f"run file not found: {run_path}")
    try:
        state = run_state_from_wire(json.loads(p.read_text()))
    except (json.JSONDecodeError, WireError) as exc:
        _fail(f"bad run file: {exc}")
    seen: set[str] = set()
    pool = []
    for ind in [state.best_ever] + state.archive + state.population:
        if ind.genotype_hash not in seen:
            seen.add(ind.genotype_hash)
            pool.append(ind)
    pool.sort(key=lambda i: -(i.fitness or 0.0))
    out_dir = Path(svg_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for rank, ind in enumerate(pool[:top_k], start=1):
        name = f"{rank:02d}_{ind.genotype_hash[:8]}.svg"
        title = f"fitness {ind.fitness:.3f} ({ind.origin.value})"
        (out_dir / name).write_text(chain_to_svg(ind.genotype, title=title))
        click.echo(f"{name}  fitness={ind.fitness:.3f}")


@main.command("serve")
@click.option("--addr", default="127.0.0.1:8711", show_default=True)
@click.option("--ui-dir", "ui_dir", type=str, default=None, envvar="COEVO_UI_DIR")
@click.option("--max-evals", "max_evals", type=int, default=None, help="Concurrent evaluation cap.")
@click.pass_context
def serve_cmd(ctx, addr, ui_dir, max_evals) -> None:
    """Serve the HTTP API (and the web UI when --ui-dir is given)."""
    import uvicorn

    from .api import create_app

    host, _, port_str = addr.rpartition(":")
    if not host or not port_str.isdigit():
        _fail(f"bad --addr {addr!r}, expected host:port")
    app = create_app(ctx.obj["data_dir"], ui_dir=ui_dir, max_concurrent_evaluations=max_evals)
    uvicorn.run(app, host=host, port=int(port_str), log_level="warning")


@main.command("design")
@click.option("--angles", required=True, help="Comma-separated relative angles in radians.")
@click.option("--out", "out_path", required=True, type=str)
def design_cmd(angles, out_path) -> None:
    """Write a design file from a list of angles (helper for scripting)."""
    try:
        values = tuple(float(a) for a in angles.split(","))
        from .shapes import BrickChain, snap_angle

        chain = BrickChain(angles=tuple(snap_angle(a) for a in values))
    except (ValueError, ChainError) as exc:
        _fail(f"bad angles: {exc}")
    Path(out_path).write_text(json.dumps(design_to_wire(chain)))
    click.echo(f"wrote {out_path} ({len(chain)} bricks)")
