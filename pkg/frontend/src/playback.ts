// Episode playback clock: frames play back at the wall-clock rate they were
// simulated at (frame t renders at elapsed time t). Pausing and scrubbing
// reuse the cached frames; nothing is re-requested.

import type { Frame } from "./types.js";

export class Playback {
  private frames: Frame[] = [];
  private playing = false;
  private startedAt = 0; // wall-clock ms when play began
  private offset = 0; // seconds into the episode when play began

  load(frames: Frame[]): void {
    this.frames = frames;
    this.playing = false;
    this.offset = 0;
  }

  get loaded(): boolean {
    return this.frames.length > 0;
  }

  get duration(): number {
    return this.frames.length > 0 ? this.frames[this.frames.length - 1]!.t : 0;
  }

  get isPlaying(): boolean {
    return this.playing;
  }

  play(now: number): void {
    if (this.frames.length === 0) return;
    if (this.offset >= this.duration) this.offset = 0;
    this.playing = true;
    this.startedAt = now;
  }

  pause(now: number): void {
    if (!this.playing) return;
    this.offset = this.position(now);
    this.playing = false;
  }

  seek(t: number): void {
    this.offset = Math.max(0, Math.min(t, this.duration));
    if (this.playing) this.startedAt = 0; // next position() call re-bases
    this.playing = false;
  }

  /** Episode time in seconds at wall-clock `now` (ms). */
  position(now: number): number {
    if (!this.playing) return this.offset;
    const t = this.offset + (now - this.startedAt) / 1000;
    if (t >= this.duration) {
      this.playing = false;
      this.offset = this.duration;
      return this.duration;
    }
    return t;
  }

  /** Latest frame at or before episode time t. */
  frameAt(t: number): Frame | null {
    if (this.frames.length === 0) return null;
    let lo = 0;
    let hi = this.frames.length - 1;
    while (lo < hi) {
      const mid = (lo + hi + 1) >> 1;
      if (this.frames[mid]!.t <= t) lo = mid;
      else hi = mid - 1;
    }
    return this.frames[lo]!;
  }
}
