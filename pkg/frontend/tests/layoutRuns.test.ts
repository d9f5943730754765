import { describe, expect, it } from "vitest";

import { indexRuns, rowAt, rowOffset, visibleRange } from "../src/layoutRuns.js";

describe("run-length layout", () => {
  it("computes offsets across runs", () => {
    const idx = indexRuns([[1, 40], [3, 20]]);
    expect(idx.rows).toBe(4);
    expect(idx.totalHeight).toBe(100);
    expect(rowOffset(idx, 0)).toBe(0);
    expect(rowOffset(idx, 1)).toBe(40);
    expect(rowOffset(idx, 3)).toBe(80);
  });

  it("finds the row at a position", () => {
    const idx = indexRuns([[1, 40], [3, 20]]);
    expect(rowAt(idx, 0)).toBe(0);
    expect(rowAt(idx, 39.9)).toBe(0);
    expect(rowAt(idx, 40)).toBe(1);
    expect(rowAt(idx, 99)).toBe(3);
  });

  it("matches the uniform-height example", () => {
    const idx = indexRuns([[100, 20]]);
    expect(visibleRange(idx, 100, 200, 0)).toEqual([5, 15]);
  });

  it("clamps overscan at the edges", () => {
    const idx = indexRuns([[10, 20]]);
    expect(visibleRange(idx, 0, 100, 5)).toEqual([0, 10]);
  });

  it("agrees with a linear scan on random layouts", () => {
    let seed = 42;
    const rand = () => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed / 2147483648;
    };
    for (let trial = 0; trial < 200; trial++) {
      const runs: [number, number][] = [];
      const heights: number[] = [];
      const n = 1 + Math.floor(rand() * 40);
      for (let i = 0; i < n; i++) {
        const count = 1 + Math.floor(rand() * 5);
        const h = 1 + Math.floor(rand() * 30);
        runs.push([count, h]);
        for (let k = 0; k < count; k++) heights.push(h);
      }
      const idx = indexRuns(runs);
      const offsets: number[] = [0];
      for (const h of heights) offsets.push(offsets[offsets.length - 1] + h);
      const viewport = 10 + rand() * 200;
      const scroll = rand() * Math.max(0, idx.totalHeight - viewport);
      const [first, last] = visibleRange(idx, scroll, viewport, 0);
      // linear scan: greatest row starting at/before the top edge,
      // first row starting at/after the bottom edge
      let refFirst = 0;
      for (let i = 0; i < heights.length; i++) {
        if (offsets[i] <= scroll) refFirst = i;
        else break;
      }
      let refLast = heights.length;
      for (let i = 0; i < heights.length; i++) {
        if (offsets[i] >= scroll + viewport) { refLast = i; break; }
      }
      expect([first, last]).toEqual([refFirst, Math.max(refFirst, refLast)]);
    }
  });
});
