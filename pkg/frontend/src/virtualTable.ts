/**
 * Windowed table view: a scroll container with a full-height spacer and
 * only the visible rows (plus overscan) as real DOM nodes, regardless of
 * table size. Rows are rebuilt from the scenes the server sends.
 */

import { indexRuns, visibleRange, type RunIndex } from "./layoutRuns.js";
import type { LayoutDoc, Scene } from "./protocol.js";
import { renderRow } from "./render.js";

export interface WindowRequest {
  first: number;
  last: number;
}

export class VirtualTable {
  readonly container: HTMLElement;
  overscan: number;
  onWindowChange: ((w: WindowRequest) => void) | null = null;

  private spacer: HTMLDivElement;
  private rowHost: HTMLDivElement;
  private runIndex: RunIndex = indexRuns([]);
  private lastWindow: [number, number] = [0, 0];

  constructor(container: HTMLElement, overscan = 10) {
    this.container = container;
    this.overscan = overscan;
    this.container.style.overflowY = "auto";
    this.container.style.position = "relative";
    this.spacer = document.createElement("div");
    this.spacer.style.position = "relative";
    this.spacer.style.width = "100%";
    this.rowHost = document.createElement("div");
    this.spacer.appendChild(this.rowHost);
    this.container.appendChild(this.spacer);
    this.container.addEventListener("scroll", () => this.updateWindow());
  }

  get window(): [number, number] {
    return this.lastWindow;
  }

  setLayout(layout: LayoutDoc): void {
    this.runIndex = indexRuns(layout.runs);
    this.spacer.style.height = `${layout.total_height}px`;
    this.updateWindow(true);
  }

  /** Visible window from the current scroll position, overscan applied. */
  computeWindow(): [number, number] {
    const scrollTop = this.container.scrollTop;
    const viewportH = this.container.clientHeight || 600;
    return visibleRange(this.runIndex, scrollTop, viewportH, this.overscan);
  }

  updateWindow(force = false): void {
    const next = this.computeWindow();
    if (!force && next[0] === this.lastWindow[0] && next[1] === this.lastWindow[1]) {
      return;
    }
    this.lastWindow = next;
    this.onWindowChange?.({ first: next[0], last: next[1] });
  }

  /** Replace the rendered rows with the scene's window. */
  applyScene(scene: Scene): void {
    const next = document.createElement("div");
    for (const row of scene.rows) {
      next.appendChild(renderRow(row, scene.width));
    }
    this.spacer.replaceChild(next, this.rowHost);
    this.rowHost = next;
  }

  get renderedRowCount(): number {
    return this.rowHost.childElementCount;
  }
}
