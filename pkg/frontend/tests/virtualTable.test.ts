import { describe, expect, it } from "vitest";

import { VirtualTable } from "../src/virtualTable.js";
import type { LayoutDoc, Scene, SceneRow } from "../src/protocol.js";

const N = 100_000;
const ROW_H = 20;
const OVERSCAN = 10;

function bigLayout(): LayoutDoc {
  return { total_height: N * ROW_H, fits: false, rows: N, runs: [[N, ROW_H]] };
}

function sceneFor(first: number, last: number): Scene {
  const rows: SceneRow[] = [];
  for (let i = first; i < last; i++) {
    rows.push({
      index: i, kind: "item", y: i * ROW_H, h: ROW_H, row: i,
      cells: [{
        column: "v", x: 0, y: i * ROW_H, w: 100, h: ROW_H,
        encoding: "bar", directive: "compact", missing: false,
        primitives: [{ kind: "rect", x: 0, y: i * ROW_H, w: 50, h: ROW_H,
                       fill: "#1f77b4" }],
      }],
    });
  }
  return {
    protocol_version: 1, version: 0, first, last,
    width: 100, height: N * ROW_H,
    columns: [{ id: "v", label: "v", kind: "data", x: 0, w: 100 }],
    rows,
  };
}

function makeTable(): { table: VirtualTable; container: HTMLElement } {
  const container = document.createElement("div");
  Object.defineProperty(container, "clientHeight", { value: 600 });
  document.body.appendChild(container);
  const table = new VirtualTable(container, OVERSCAN);
  return { table, container };
}

describe("VirtualTable at 100k rows", () => {
  it("keeps the DOM row count within window + 2*overscan", () => {
    const { table, container } = makeTable();
    const requests: Array<[number, number]> = [];
    table.onWindowChange = (w) => {
      requests.push([w.first, w.last]);
      table.applyScene(sceneFor(w.first, w.last));
    };
    table.setLayout(bigLayout());

    container.scrollTop = 50_000 * ROW_H;
    container.dispatchEvent(new Event("scroll"));

    const [first, last] = table.window;
    const visibleRows = Math.ceil(600 / ROW_H);
    expect(last - first).toBeLessThanOrEqual(visibleRows + 1 + 2 * OVERSCAN);
    expect(table.renderedRowCount).toBe(last - first);
    expect(table.renderedRowCount).toBeLessThanOrEqual(
      visibleRows + 1 + 2 * OVERSCAN);
    // row nodes far outside the window never exist
    expect(requests.length).toBeGreaterThan(0);
  });

  it("spacer carries the full scroll height", () => {
    const { table, container } = makeTable();
    table.setLayout(bigLayout());
    const spacer = container.firstElementChild as HTMLElement;
    expect(spacer.style.height).toBe(`${N * ROW_H}px`);
  });

  it("re-renders rows from an applied scene", () => {
    const { table } = makeTable();
    table.setLayout(bigLayout());
    table.applyScene(sceneFor(0, 30));
    expect(table.renderedRowCount).toBe(30);
    table.applyScene(sceneFor(10, 25));
    expect(table.renderedRowCount).toBe(15);
  });
});
