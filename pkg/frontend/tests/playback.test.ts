import { describe, expect, it } from "vitest";

import { Playback } from "../src/playback.js";
import type { Frame } from "../src/types.js";

function frames(times: number[]): Frame[] {
  return times.map((t) => ({ t, bodies: [] }));
}

describe("playback clock", () => {
  it("plays at the wall-clock rate", () => {
    const p = new Playback();
    p.load(frames([0, 0.5, 1.0, 1.5, 2.0]));
    p.play(1000);
    expect(p.position(1000)).toBe(0);
    expect(p.position(1750)).toBeCloseTo(0.75, 9);
    expect(p.frameAt(p.position(1750))!.t).toBe(0.5);
  });

  it("clamps at the end and stops", () => {
    const p = new Playback();
    p.load(frames([0, 1]));
    p.play(0);
    expect(p.position(5000)).toBe(1);
    expect(p.isPlaying).toBe(false);
  });

  it("pause freezes and resume continues from the same point", () => {
    const p = new Playback();
    p.load(frames([0, 1, 2, 3]));
    p.play(0);
    p.pause(1200);
    expect(p.position(99_999)).toBeCloseTo(1.2, 9);
    p.play(10_000);
    expect(p.position(10_300)).toBeCloseTo(1.5, 9);
  });

  it("seek scrubs without touching the frames", () => {
    const p = new Playback();
    p.load(frames([0, 0.5, 1.0]));
    p.seek(0.6);
    expect(p.frameAt(p.position(0))!.t).toBe(0.5);
    p.seek(99);
    expect(p.position(0)).toBe(1.0);
  });

  it("frameAt picks the latest frame at or before t", () => {
    const p = new Playback();
    p.load(frames([0, 0.5, 1.0]));
    expect(p.frameAt(0)!.t).toBe(0);
    expect(p.frameAt(0.49)!.t).toBe(0);
    expect(p.frameAt(0.5)!.t).toBe(0.5);
    expect(p.frameAt(2)!.t).toBe(1.0);
  });
});
