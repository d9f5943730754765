/**
 * Panel brushes -> filter documents. Pixel ranges convert to data units
 * through the histogram's domain; brushing the full width elides the
 * filter, a zero-width brush clears it, and categorical brushes toggle
 * the clicked category's exclusion.
 */

import type { FilterDoc } from "./protocol.js";

export interface HistogramGeometry {
  /** left edge of the histogram band, px */
  x: number;
  /** width of the histogram band, px */
  width: number;
  /** data-unit domain the band spans */
  domain: [number, number];
}

function pxToData(px: number, geom: HistogramGeometry): number {
  const t = (px - geom.x) / geom.width;
  const [d0, d1] = geom.domain;
  return d0 + t * (d1 - d0);
}

/**
 * Merge a numeric brush into the filter list for `column`. Returns the
 * full filter list to send with set_filters.
 */
export function brushToFilter(
  column: string,
  brush: [number, number],
  geom: HistogramGeometry,
  existing: FilterDoc[] = [],
): FilterDoc[] {
  const others = existing.filter((f) => f.column !== column);
  const px0 = Math.max(geom.x, Math.min(brush[0], brush[1]));
  const px1 = Math.min(geom.x + geom.width, Math.max(brush[0], brush[1]));
  if (px1 <= px0) return others; // zero-width brush clears the filter
  const lo = pxToData(px0, geom);
  const hi = pxToData(px1, geom);
  const [d0, d1] = geom.domain;
  if (lo <= d0 && hi >= d1) return others; // full-domain brush is a no-op filter
  return [...others, { column, kind: "numeric_range", lo, hi }];
}

/** Toggle one category in the column's exclusion set. */
export function toggleCategoryExclusion(
  column: string,
  category: string,
  existing: FilterDoc[] = [],
): FilterDoc[] {
  const others = existing.filter(
    (f) => !(f.column === column && f.kind === "category_exclusion"),
  );
  const current = existing.find(
    (f) => f.column === column && f.kind === "category_exclusion",
  );
  const excluded = new Set(current?.excluded ?? []);
  if (excluded.has(category)) excluded.delete(category);
  else excluded.add(category);
  if (excluded.size === 0) return others;
  return [...others, { column, kind: "category_exclusion", excluded: [...excluded].sort() }];
}
