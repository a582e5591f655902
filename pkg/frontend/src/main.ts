// App shell: binds the editor, playback, run dashboard and leaderboard to
// the DOM. All state flows through the controllers; this file only wires
// events and draws.

import { ApiCallError, ApiClient } from "./api.js";
import { drawHistoryChart } from "./charts.js";
import { DashboardState } from "./dashboard.js";
import { EditorController } from "./editor.js";
import type { Gesture } from "./editor.js";
import { nearestBrick, nearestJoint } from "./geometry.js";
import { Playback } from "./playback.js";
import { arenaBounds, chainBounds, drawChain, drawFrame, fitCamera, toWorld } from "./render.js";
import type { Camera } from "./render.js";
import type { Actor, ChallengeSpecWire, Design, Frame } from "./types.js";

const api = new ApiClient("");
const actor: Actor = { kind: "human", id: localStorage.getItem("coevo-user") ?? newUserId() };

function newUserId(): string {
  const id = `web-${Math.random().toString(36).slice(2, 8)}`;
  localStorage.setItem("coevo-user", id);
  return id;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

const statusLine = el<HTMLDivElement>("status-line");

function flash(message: string, isError = false): void {
  statusLine.textContent = message;
  statusLine.className = isError ? "error" : "";
  if (!isError) setTimeout(() => (statusLine.textContent = ""), 4000);
}

let specs: Record<string, ChallengeSpecWire> = {};

// ---------------------------------------------------------------------------
// editor

const editorCanvas = el<HTMLCanvasElement>("editor-canvas");
const editorCtx = editorCanvas.getContext("2d")!;
const challengeSelect = el<HTMLSelectElement>("challenge-select");
const scoreBadge = el<HTMLSpanElement>("score-badge");
const replaySlider = el<HTMLInputElement>("replay-slider");

const editor = new EditorController(api, actor, {
  onChange: () => {
    replayChain = null;
    syncReplaySlider();
    drawEditor();
  },
  onReject: (err) => flash(`edit rejected: ${err.code}`, true),
});

let replayChain: Design | null = null; // non-null while scrubbing history
let lastSeq = -1;

function editorCamera(chain: Design | null): Camera {
  const box = chain ? chainBounds(chain, 1.5) : { x0: -4, y0: -4, x1: 4, y1: 4 };
  return fitCamera(editorCanvas.width, editorCanvas.height, box);
}

function drawEditor(): void {
  editorCtx.clearRect(0, 0, editorCanvas.width, editorCanvas.height);
  const chain = replayChain ?? editor.chain;
  const cam = editorCamera(chain);
  if (chain) {
    drawChain(editorCtx, cam, chain, {
      selected: replayChain ? null : editor.selected,
      fill: replayChain ? "#9aa7b5" : undefined,
    });
  } else {
    editorCtx.fillStyle = "#6b7280";
    editorCtx.font = "13px sans-serif";
    editorCtx.fillText("click to place the first brick", 20, 30);
  }
  el<HTMLButtonElement>("delete-brick").disabled =
    editor.selected === null ||
    editor.chain === null ||
    (editor.selected !== 0 && editor.selected !== editor.chain.angles.length - 1);
}

function syncReplaySlider(): void {
  lastSeq += 1; // every accepted append advances the log
  replaySlider.max = String(Math.max(lastSeq, 0));
  replaySlider.value = replaySlider.max;
}

editorCanvas.addEventListener("pointerdown", (ev) => {
  if (replayChain !== null) return; // scrubbing history is read-only
  const rect = editorCanvas.getBoundingClientRect();
  const cam = editorCamera(editor.chain);
  const p = toWorld(cam, [ev.clientX - rect.left, ev.clientY - rect.top]);
  const chain = editor.chain;
  if (chain === null) {
    void editor.apply({ kind: "add", end: "tail", worldAngle: 0 });
    return;
  }
  const joint = nearestJoint(chain, p);
  const brick = nearestBrick(chain, p);
  const clickRadius = 0.6;
  const isHead = joint.index === 0;
  const isTail = joint.index === chain.angles.length;
  if (joint.dist < clickRadius && (isHead || isTail) && joint.dist < brick.dist) {
    dragging = { mode: "add", end: isHead ? "head" : "tail", jointIndex: joint.index };
    return;
  }
  if (brick.dist < clickRadius * 2) {
    editor.selected = brick.index;
    dragging = { mode: "rotate", index: brick.index };
    drawEditor();
    return;
  }
  editor.selected = null;
  drawEditor();
});

type Drag =
  | { mode: "add"; end: "head" | "tail"; jointIndex: number }
  | { mode: "rotate"; index: number }
  | null;
let dragging: Drag = null;

editorCanvas.addEventListener("pointerup", (ev) => {
  if (dragging === null || editor.chain === null) {
    dragging = null;
    return;
  }
  const rect = editorCanvas.getBoundingClientRect();
  const cam = editorCamera(editor.chain);
  const p = toWorld(cam, [ev.clientX - rect.left, ev.clientY - rect.top]);
  const chain = editor.chain;
  let gesture: Gesture | null = null;
  if (dragging.mode === "add") {
    const origin = jointPosition(chain, dragging.jointIndex);
    const angle = Math.atan2(p[1] - origin[1], p[0] - origin[0]);
    gesture =
      dragging.end === "head"
        ? { kind: "add", end: "head", worldAngle: angle + Math.PI } // brick grows backwards
        : { kind: "add", end: "tail", worldAngle: angle };
  } else {
    const origin = jointPosition(chain, dragging.index);
    const angle = Math.atan2(p[1] - origin[1], p[0] - origin[0]);
    gesture = { kind: "rotate", index: dragging.index, worldAngle: angle };
  }
  dragging = null;
  if (gesture) void editor.apply(gesture);
});

function jointPosition(chain: Design, index: number): [number, number] {
  let [x, y] = chain.anchor;
  let heading = 0;
  for (let i = 0; i < index; i++) {
    heading += chain.angles[i]!;
    x += chain.brick_length * Math.cos(heading);
    y += chain.brick_length * Math.sin(heading);
  }
  return [x, y];
}

el<HTMLButtonElement>("new-session").addEventListener("click", () => {
  void (async () => {
    await editor.open(challengeSelect.value);
    lastSeq = -1;
    replaySlider.max = "0";
    replayChain = null;
    scoreBadge.textContent = "—";
    drawEditor();
    flash(`session ${editor.sessionId} opened on ${challengeSelect.value}`);
  })().catch((err) => flash(String(err), true));
});

el<HTMLButtonElement>("delete-brick").addEventListener("click", () => {
  if (editor.selected === null) return;
  void editor.apply({ kind: "delete", index: editor.selected });
});

replaySlider.addEventListener("input", () => {
  void (async () => {
    if (editor.sessionId === null || lastSeq < 0) return;
    const upto = Number(replaySlider.value);
    if (upto >= lastSeq) {
      replayChain = null;
      drawEditor();
      return;
    }
    const { chain } = await api.replay(editor.sessionId, upto);
    replayChain = chain;
    drawEditor();
  })().catch((err) => flash(String(err), true));
});

// ---------------------------------------------------------------------------
// playback

const playbackCanvas = el<HTMLCanvasElement>("playback-canvas");
const playbackCtx = playbackCanvas.getContext("2d")!;
const playback = new Playback();
const playSlider = el<HTMLInputElement>("play-slider");
let playbackFrames: Frame[] = [];
let playbackDesign: Design | null = null;
let playbackSpec: ChallengeSpecWire | null = null;

function renderPlayback(): void {
  playbackCtx.clearRect(0, 0, playbackCanvas.width, playbackCanvas.height);
  if (!playback.loaded || !playbackSpec || !playbackDesign) return;
  const t = playback.position(performance.now());
  const frame = playback.frameAt(t);
  if (!frame) return;
  const cam = fitCamera(playbackCanvas.width, playbackCanvas.height, arenaBounds(playbackSpec));
  drawFrame(playbackCtx, cam, playbackSpec, playbackDesign, frame);
  if (!playSliderHeld) playSlider.value = String(t);
  requestAnimationFrame(renderPlayback);
}

let playSliderHeld = false;
playSlider.addEventListener("pointerdown", () => (playSliderHeld = true));
playSlider.addEventListener("pointerup", () => (playSliderHeld = false));
playSlider.addEventListener("input", () => {
  playback.seek(Number(playSlider.value));
  requestAnimationFrame(renderPlayback);
});

el<HTMLButtonElement>("evaluate").addEventListener("click", () => {
  void (async () => {
    const challengeId = challengeSelect.value;
    const seed = Number(el<HTMLInputElement>("seed-input").value || "0");
    const result = await editor.evaluate(challengeId, seed, true);
    scoreBadge.textContent = result.score.toFixed(3);
    if (result.frames_ref) {
      const { frames } = await api.trajectory(result.frames_ref);
      playbackFrames = frames;
      playbackDesign = editor.chain;
      playbackSpec = specs[challengeId] ?? null;
      playback.load(playbackFrames);
      playSlider.max = String(playback.duration);
      playback.play(performance.now());
      requestAnimationFrame(renderPlayback);
    }
  })().catch((err) =>
    flash(err instanceof ApiCallError ? `evaluate failed: ${err.code}` : String(err), true),
  );
});

el<HTMLButtonElement>("play-pause").addEventListener("click", () => {
  if (playback.isPlaying) playback.pause(performance.now());
  else {
    playback.play(performance.now());
    requestAnimationFrame(renderPlayback);
  }
});

el<HTMLButtonElement>("submit-score").addEventListener("click", () => {
  void (async () => {
    if (!editor.lastResult) throw new Error("evaluate first");
    const { rank } = await api.recordScore(challengeSelect.value, actor, editor.lastResult);
    flash(`recorded; you are rank ${rank} on ${challengeSelect.value}`);
    await refreshLeaderboard();
  })().catch((err) => flash(String(err), true));
});

// ---------------------------------------------------------------------------
// dashboard

const historyCanvas = el<HTMLCanvasElement>("history-canvas");
const historyCtx = historyCanvas.getContext("2d")!;
const populationGrid = el<HTMLDivElement>("population-grid");
const archiveGrid = el<HTMLDivElement>("archive-grid");

const dashboard = new DashboardState(api, (view) => {
  el<HTMLSpanElement>("run-status").textContent =
    `${view.run_id} · gen ${view.generation} · ${view.status}` +
    (view.pending_generations > 0 ? ` · ${view.pending_generations} pending` : "");
  drawHistoryChart(historyCtx, historyCanvas.width, historyCanvas.height, [
    { label: "best", color: "#2f7d32", values: view.history.map((h) => h[0]) },
    { label: "mean", color: "#4a90d9", values: view.history.map((h) => h[1]) },
  ]);
  renderThumbnails(populationGrid, view.population, true);
  renderThumbnails(archiveGrid, view.archive, false);
  el<HTMLButtonElement>("inject").disabled = !dashboard.injectEnabled || editor.chain === null;
});

function renderThumbnails(grid: HTMLDivElement, individuals: readonly { genotype: Design; fitness: number | null; origin: string }[], selectable: boolean): void {
  grid.textContent = "";
  individuals.forEach((ind, i) => {
    const cell = document.createElement("div");
    cell.className = "thumb" + (selectable && dashboard.selected === i ? " selected" : "");
    const canvas = document.createElement("canvas");
    canvas.width = 90;
    canvas.height = 70;
    const ctx = canvas.getContext("2d")!;
    const cam = fitCamera(90, 70, chainBounds(ind.genotype, 0.5), 6);
    drawChain(ctx, cam, ind.genotype);
    const label = document.createElement("div");
    label.textContent = `${(ind.fitness ?? 0).toFixed(3)} ${ind.origin === "injected" ? "★" : ""}`;
    cell.append(canvas, label);
    if (selectable) {
      cell.addEventListener("click", () => {
        dashboard.selected = i;
        renderThumbnails(grid, individuals, true);
      });
    }
    grid.append(cell);
  });
}

el<HTMLButtonElement>("create-run").addEventListener("click", () => {
  void (async () => {
    const pop = Number(el<HTMLInputElement>("pop-input").value || "32");
    const { run_id } = await api.createRun(challengeSelect.value, { population_size: pop });
    await dashboard.attach(run_id);
    dashboard.startPolling();
    flash(`run ${run_id} created`);
  })().catch((err) => flash(String(err), true));
});

el<HTMLButtonElement>("attach-run").addEventListener("click", () => {
  void (async () => {
    const runId = el<HTMLInputElement>("run-id-input").value.trim();
    await dashboard.attach(runId);
    dashboard.startPolling();
  })().catch((err) =>
    flash(err instanceof ApiCallError ? err.code : String(err), true),
  );
});

el<HTMLButtonElement>("advance").addEventListener("click", () => {
  const gens = Number(el<HTMLInputElement>("gens-input").value || "5");
  void dashboard.advance(gens).catch((err) =>
    flash(err instanceof ApiCallError ? err.code : String(err), true),
  );
});

for (const command of ["pause", "resume", "stop"] as const) {
  el<HTMLButtonElement>(`run-${command}`).addEventListener("click", () => {
    void (async () => {
      if (!dashboard.runId) return;
      await api[command](dashboard.runId);
      await dashboard.poll();
    })().catch((err) =>
      flash(err instanceof ApiCallError ? err.code : String(err), true),
    );
  });
}

el<HTMLButtonElement>("edit-individual").addEventListener("click", () => {
  void (async () => {
    const genotype = dashboard.editableGenotype();
    if (!genotype || !dashboard.view) return;
    await editor.loadDesign(dashboard.view.challenge_id, genotype);
    challengeSelect.value = dashboard.view.challenge_id;
    drawEditor();
    flash("individual copied into the editor");
  })().catch((err) => flash(String(err), true));
});

el<HTMLButtonElement>("inject").addEventListener("click", () => {
  void (async () => {
    if (editor.chain === null) throw new Error("editor chain is empty");
    await dashboard.inject(editor.chain, actor);
    flash("design injected into the run");
  })().catch((err) =>
    flash(err instanceof ApiCallError ? `inject failed: ${err.code}` : String(err), true),
  );
});

// ---------------------------------------------------------------------------
// leaderboard

async function refreshLeaderboard(): Promise<void> {
  const challengeId = el<HTMLSelectElement>("board-select").value;
  const { entries } = await api.leaderboard(challengeId);
  const tbody = el<HTMLTableSectionElement>("board-body");
  tbody.textContent = "";
  entries.forEach((entry, i) => {
    const row = document.createElement("tr");
    row.innerHTML =
      `<td>${i + 1}</td><td class="${entry.actor.kind}">${entry.actor.kind}</td>` +
      `<td>${entry.actor.id}</td><td>${entry.score.toFixed(3)}</td>`;
    tbody.append(row);
  });
}

el<HTMLSelectElement>("board-select").addEventListener("change", () => void refreshLeaderboard());
el<HTMLButtonElement>("board-refresh").addEventListener("click", () => void refreshLeaderboard());

// ---------------------------------------------------------------------------
// boot

void (async () => {
  const { challenges } = await api.challenges();
  specs = Object.fromEntries(challenges.map((c) => [c.id, c]));
  for (const select of [challengeSelect, el<HTMLSelectElement>("board-select")]) {
    select.textContent = "";
    for (const c of challenges) {
      const opt = document.createElement("option");
      opt.value = c.id;
      opt.textContent = c.id;
      select.append(opt);
    }
  }
  drawEditor();
  await refreshLeaderboard();
})().catch((err) => flash(`failed to load challenges: ${err}`, true));
