// Wire types for the /v1 JSON API (mirrors the server's published schema).

export interface Design {
  brick_length: number;
  brick_thickness: number;
  anchor: [number, number];
  angles: number[];
}

export interface Actor {
  kind: "human" | "agent";
  id: string;
}

export type ActionWire =
  | { type: "add"; end: "head" | "tail"; rel_angle: number }
  | { type: "remove"; end: "head" | "tail" }
  | { type: "rotate"; index: number; new_rel_angle: number };

export interface LogEntryWire {
  seq: number;
  actor: Actor;
  action: ActionWire;
}

export interface ActionLogWire {
  session_id: string;
  challenge_id: string;
  entries: LogEntryWire[];
}

export interface ApiError {
  code: string;
  message: string;
  http_status: number;
}

export interface EpisodeResult {
  score: number;
  metrics: Record<string, number>;
  seed: number;
  design_hash: string;
  frames_ref?: string;
}

export interface FrameBody {
  tag: string;
  pos: [number, number];
  angle: number;
}

export interface Frame {
  t: number;
  bodies: FrameBody[];
}

export interface ArenaBoxWire {
  center: [number, number];
  half_w: number;
  half_h: number;
  angle: number;
  friction?: number;
  restitution?: number;
}

export interface SpawnWire {
  step: number;
  kind: "ball" | "projectile";
  position: [number, number];
  velocity: [number, number];
  radius: number;
  jitter: [number, number];
}

export type GoalWire =
  | { kind: "collect"; kill_plane_y: number }
  | { kind: "protect"; zone: [number, number][]; projectile_count: number }
  | { kind: "move"; start_position: [number, number]; target: [number, number]; incline_angle: number }
  | { kind: "cut"; entry_y: number; depth: number; x_range: [number, number]; drag_coeff: number };

export interface ChallengeSpecWire {
  id: string;
  version: string;
  episode_steps: number;
  design_dynamic: boolean;
  design_placement: { position: [number, number]; angle: number };
  arena: ArenaBoxWire[];
  spawn_schedule: SpawnWire[];
  goal: GoalWire;
}

export interface IndividualWire {
  genotype: Design;
  fitness: number | null;
  origin: "random" | "mutation" | "crossover" | "injected";
  genotype_hash: string;
  injected_by?: Actor | null;
}

export interface RunView {
  run_id: string;
  challenge_id: string;
  status: "running" | "paused" | "done";
  generation: number;
  pending_generations: number;
  params: Record<string, unknown>;
  population: IndividualWire[];
  best: IndividualWire;
  archive: IndividualWire[];
  history: [number, number][];
}

export interface LeaderboardEntry {
  challenge_id: string;
  actor: Actor;
  score: number;
  design_hash: string;
  recorded_at: number;
}
