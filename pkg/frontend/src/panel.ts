/**
 * Data selection panel: one brushable summary per column over the
 * filtered rows. Numeric histograms brush to range filters; categorical
 * bars click-toggle exclusions. The panel re-renders from every delta's
 * panel payload, so filter feedback arrives in the same round trip.
 */

import { brushToFilter, toggleCategoryExclusion, type HistogramGeometry } from "./brush.js";
import type { FilterDoc, PanelColumn, PanelDoc } from "./protocol.js";

const BAND_W = 180;
const BAND_H = 40;

export class SelectionPanel {
  readonly container: HTMLElement;
  filters: FilterDoc[] = [];
  onFilters: ((filters: FilterDoc[]) => void) | null = null;

  constructor(container: HTMLElement) {
    this.container = container;
  }

  geometryFor(col: PanelColumn): HistogramGeometry {
    return { x: 0, width: BAND_W, domain: col.domain ?? [0, 1] };
  }

  /** Translate a finished numeric brush into a set_filters payload. */
  brushNumeric(col: PanelColumn, px0: number, px1: number): FilterDoc[] {
    this.filters = brushToFilter(col.id, [px0, px1], this.geometryFor(col), this.filters);
    this.onFilters?.(this.filters);
    return this.filters;
  }

  toggleCategory(col: PanelColumn, category: string): FilterDoc[] {
    this.filters = toggleCategoryExclusion(col.id, category, this.filters);
    this.onFilters?.(this.filters);
    return this.filters;
  }

  render(panel: PanelDoc): void {
    this.container.textContent = "";
    for (const col of panel.columns) {
      const block = document.createElement("div");
      block.className = "tf-panel-col";
      block.dataset.column = col.id;
      const title = document.createElement("div");
      title.className = "tf-panel-title";
      title.textContent = col.label;
      block.appendChild(title);
      if (col.histogram) {
        block.appendChild(this.histogramBand(col));
      } else if (col.counts && col.categories) {
        block.appendChild(this.categoryBand(col));
      }
      this.container.appendChild(block);
    }
  }

  private histogramBand(col: PanelColumn): HTMLElement {
    const hist = col.histogram!;
    const band = document.createElement("div");
    band.className = "tf-panel-hist";
    band.style.width = `${BAND_W}px`;
    band.style.height = `${BAND_H}px`;
    band.style.position = "relative";
    const peak = Math.max(1, ...hist.counts);
    const bw = BAND_W / hist.counts.length;
    for (let i = 0; i < hist.counts.length; i++) {
      const bar = document.createElement("div");
      const h = (hist.counts[i] / peak) * BAND_H;
      bar.style.position = "absolute";
      bar.style.left = `${i * bw}px`;
      bar.style.bottom = "0";
      bar.style.width = `${Math.max(1, bw - 1)}px`;
      bar.style.height = `${h}px`;
      bar.style.background = "#7f9fbf";
      band.appendChild(bar);
    }
    let start: number | null = null;
    band.addEventListener("pointerdown", (ev) => {
      start = (ev as PointerEvent).offsetX;
    });
    band.addEventListener("pointerup", (ev) => {
      if (start === null) return;
      this.brushNumeric(col, start, (ev as PointerEvent).offsetX);
      start = null;
    });
    return band;
  }

  private categoryBand(col: PanelColumn): HTMLElement {
    const band = document.createElement("div");
    band.className = "tf-panel-cats";
    const counts = col.counts!.counts;
    const total = Math.max(1, counts.reduce((a, b) => a + b, 0));
    col.categories!.forEach((name, i) => {
      const row = document.createElement("div");
      row.className = "tf-panel-cat";
      row.dataset.category = name;
      row.textContent = `${name} (${counts[i]})`;
      row.style.cursor = "pointer";
      const excluded = this.filters.some(
        (f) => f.column === col.id && f.kind === "category_exclusion" &&
          (f.excluded ?? []).includes(name),
      );
      row.style.opacity = excluded ? "0.35" : String(0.5 + 0.5 * (counts[i] / total));
      row.addEventListener("click", () => this.toggleCategory(col, name));
      band.appendChild(row);
    });
    return band;
  }
}
