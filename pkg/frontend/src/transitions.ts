/**
 * Staged transitions between two scenes. Instead of morphing everything
 * at once, changes play in phases: filtering first fades out the removed
 * rows, then the survivors move up; aggregation fades out the member
 * rows, collapses the freed height, and finally fades in the aggregate
 * cells. Scenes with different column structure cut without animation.
 */

import { rowKey, type Scene } from "./protocol.js";

export const PHASE_MS = 150;

export type ChangeKind = "filter" | "aggregate" | "sort" | "other";

export interface Phase {
  kind: "fade-out" | "translate" | "collapse" | "fade-in";
  /** row keys animated in this phase */
  targets: string[];
  /** ms offset from the start of the plan */
  start: number;
  duration: number;
}

export interface TransitionPlan {
  cut: boolean;
  phases: Phase[];
}

function sameColumns(a: Scene, b: Scene): boolean {
  if (a.columns.length !== b.columns.length) return false;
  return a.columns.every((c, i) => c.id === b.columns[i].id);
}

export function stagedTransition(
  oldScene: Scene,
  newScene: Scene,
  change: ChangeKind,
): TransitionPlan {
  if (!sameColumns(oldScene, newScene)) {
    return { cut: true, phases: [] };
  }
  const oldKeys = new Map(oldScene.rows.map((r) => [rowKey(r), r]));
  const newKeys = new Map(newScene.rows.map((r) => [rowKey(r), r]));
  const removed = [...oldKeys.keys()].filter((k) => !newKeys.has(k));
  const added = [...newKeys.keys()].filter((k) => !oldKeys.has(k));
  const moved = [...newKeys.keys()].filter((k) => {
    const prev = oldKeys.get(k);
    return prev !== undefined && prev.y !== newKeys.get(k)!.y;
  });
  if (removed.length === 0 && added.length === 0 && moved.length === 0) {
    return { cut: false, phases: [] };
  }

  const phases: Phase[] = [];
  const push = (kind: Phase["kind"], targets: string[]) => {
    if (targets.length === 0) return;
    phases.push({
      kind,
      targets,
      start: phases.length * PHASE_MS,
      duration: PHASE_MS,
    });
  };

  if (change === "aggregate") {
    // members out -> area collapses -> aggregate summaries in
    push("fade-out", removed);
    push("collapse", moved.length ? moved : [...newKeys.keys()]);
    push("fade-in", added);
    return { cut: false, phases };
  }
  if (change === "filter") {
    push("fade-out", removed);
    push("translate", moved);
    if (added.length) push("fade-in", added);
    return { cut: false, phases };
  }
  // sort / other: single reflow phase
  push("fade-out", removed);
  push("translate", moved.length ? moved : added);
  if (change !== "sort" && added.length) push("fade-in", added);
  return { cut: false, phases };
}
