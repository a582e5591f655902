import { describe, expect, it } from "vitest";

import {
  ANGLE_STEP,
  chainCom,
  chainRects,
  headings,
  joints,
  nearestBrick,
  nearestJoint,
  snapAngle,
  wrapIndex,
} from "../src/geometry.js";
import type { Design } from "../src/types.js";

function design(angles: number[], anchor: [number, number] = [0, 0]): Design {
  return { brick_length: 1, brick_thickness: 0.2, anchor, angles };
}

describe("angle grid", () => {
  it("wraps step indices into [-12, 12)", () => {
    expect(wrapIndex(12)).toBe(-12);
    expect(wrapIndex(-13)).toBe(11);
    expect(wrapIndex(25)).toBe(1);
    expect(wrapIndex(-24)).toBe(0);
  });

  it("snaps to the nearest 15-degree heading", () => {
    expect(snapAngle(0.05)).toBe(0);
    expect(snapAngle(Math.PI / 2 + 0.1)).toBeCloseTo(Math.PI / 2, 12);
    expect(snapAngle(Math.PI)).toBe(-Math.PI); // pi wraps to the open end
    expect(snapAngle(-Math.PI / 12 - 0.01)).toBeCloseTo(-ANGLE_STEP, 12);
  });
});

describe("chain geometry (mirrors the server)", () => {
  it("single brick rectangle is axis aligned", () => {
    const rects = chainRects(design([0]));
    expect(rects).toHaveLength(1);
    expect(rects[0]).toEqual([
      [0, -0.1],
      [1, -0.1],
      [1, 0.1],
      [0, 0.1],
    ]);
  });

  it("second brick centerline turns with the cumulative angle", () => {
    const js = joints(design([0, Math.PI / 2]));
    expect(js[1]![0]).toBeCloseTo(1, 12);
    expect(js[1]![1]).toBeCloseTo(0, 12);
    expect(js[2]![0]).toBeCloseTo(1, 12);
    expect(js[2]![1]).toBeCloseTo(1, 12);
  });

  it("a 12-gon of pi/6 turns closes on its anchor", () => {
    const js = joints(design(Array(12).fill(Math.PI / 6)));
    expect(js[12]![0]).toBeCloseTo(js[0]![0], 9);
    expect(js[12]![1]).toBeCloseTo(js[0]![1], 9);
  });

  it("headings accumulate and wrap", () => {
    const hs = headings(design([Math.PI / 2, Math.PI / 2, Math.PI / 2, Math.PI / 2]));
    expect(hs[0]).toBeCloseTo(Math.PI / 2, 12);
    expect(hs[1]).toBeCloseTo(-Math.PI, 12); // wrapped into [-pi, pi)
    expect(hs[3]).toBeCloseTo(0, 12);
  });

  it("square loop center of mass sits at the loop center", () => {
    const H = Math.PI / 2;
    const com = chainCom(design([0, H, H, H]));
    expect(com[0]).toBeCloseTo(0.5, 12);
    expect(com[1]).toBeCloseTo(0.5, 12);
  });

  it("nearest joint and brick picking", () => {
    const d = design([0, 0]);
    expect(nearestJoint(d, [2.1, 0]).index).toBe(2);
    expect(nearestJoint(d, [-0.2, 0]).index).toBe(0);
    expect(nearestBrick(d, [1.4, 0.3]).index).toBe(1);
    expect(nearestBrick(d, [0.4, -0.2]).index).toBe(0);
  });
});
