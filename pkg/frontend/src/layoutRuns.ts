/**
 * The server ships row geometry as a run-length encoding
 * [[count, height], ...]; this module answers scroll-window questions
 * against it without materializing 100k offsets.
 */

export interface RunIndex {
  rows: number;
  totalHeight: number;
  /** cumulative row count at the start of each run */
  cumRows: number[];
  /** cumulative height at the start of each run */
  cumHeight: number[];
  runs: [number, number][];
}

export function indexRuns(runs: [number, number][]): RunIndex {
  const cumRows = [0];
  const cumHeight = [0];
  for (const [count, height] of runs) {
    cumRows.push(cumRows[cumRows.length - 1] + count);
    cumHeight.push(cumHeight[cumHeight.length - 1] + count * height);
  }
  return {
    rows: cumRows[cumRows.length - 1],
    totalHeight: cumHeight[cumHeight.length - 1],
    cumRows,
    cumHeight,
    runs,
  };
}

export function rowOffset(index: RunIndex, row: number): number {
  let lo = 0;
  let hi = index.runs.length - 1;
  while (lo < hi) {
    const mid = (lo + hi + 1) >> 1;
    if (index.cumRows[mid] <= row) lo = mid;
    else hi = mid - 1;
  }
  const [, height] = index.runs[lo];
  return index.cumHeight[lo] + (row - index.cumRows[lo]) * height;
}

/** Row containing the vertical position y (clamped to the last row). */
export function rowAt(index: RunIndex, y: number): number {
  if (index.rows === 0) return 0;
  let lo = 0;
  let hi = index.runs.length - 1;
  while (lo < hi) {
    const mid = (lo + hi + 1) >> 1;
    if (index.cumHeight[mid] <= y) lo = mid;
    else hi = mid - 1;
  }
  const [count, height] = index.runs[lo];
  const within = Math.floor((y - index.cumHeight[lo]) / height);
  return Math.min(index.rows - 1, index.cumRows[lo] + Math.max(0, Math.min(count - 1, within)));
}

/** Minimal [first, last) covering the viewport, widened by overscan. */
export function visibleRange(
  index: RunIndex,
  scrollTop: number,
  viewportH: number,
  overscan = 0,
): [number, number] {
  if (index.rows === 0) return [0, 0];
  const top = Math.max(0, scrollTop);
  const bottom = top + viewportH;
  let first = rowAt(index, top);
  if (rowOffset(index, first) > top && first > 0) first -= 1;
  let last = rowAt(index, bottom);
  if (rowOffset(index, last) < bottom) last += 1;
  first = Math.max(0, first - overscan);
  last = Math.min(index.rows, last + overscan);
  return [first, Math.max(first, last)];
}
