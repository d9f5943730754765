/**
 * Wire types mirrored from docs/formats.md. The client renders from
 * serialized scenes and never recomputes encodings locally.
 */

export const PROTOCOL_VERSION = 1;

export type ColumnKind = "numerical" | "categorical" | "text" | "matrix";

export interface ColumnMeta {
  id: string;
  label: string;
  kind: ColumnKind;
  domain?: [number, number];
  categories?: string[];
}

export interface FilterDoc {
  column: string;
  kind: "numeric_range" | "category_exclusion" | "text_match" | "require_present";
  lo?: number;
  hi?: number;
  excluded?: string[];
  mode?: "substring" | "regex";
  pattern?: string;
}

export interface SortDoc {
  column: string;
  direction?: "asc" | "desc";
  statistic?: "min" | "max" | "q1" | "median" | "q3" | "mean";
}

export interface GroupingDoc {
  kind: "categorical" | "bins" | "selection";
  column?: string;
  thresholds?: number[];
  rows?: number[];
}

export type CommandOp =
  | "set_filters"
  | "set_grouping"
  | "set_sort"
  | "sort_groups"
  | "toggle_aggregate"
  | "set_selection"
  | "set_mode"
  | "set_encoding"
  | "set_mapping"
  | "combine_columns"
  | "move_column"
  | "resize_column"
  | "request_scene"
  | "snapshot"
  | "restore";

export interface Command {
  op: CommandOp;
  expected_version: number;
  payload: Record<string, unknown>;
}

export interface Primitive {
  kind: "rect" | "line" | "circle" | "text" | "path";
  cls?: string;
  [attr: string]: unknown;
}

export interface SceneCell {
  column: string;
  x: number;
  y: number;
  w: number;
  h: number;
  encoding: string;
  directive: "full" | "compact" | "omit";
  missing: boolean;
  primitives: Primitive[];
}

export interface SceneRow {
  index: number;
  kind: "item" | "header" | "group";
  y: number;
  h: number;
  row?: number;
  group?: { path: string[]; label: string; count: number; depth: number };
  cells: SceneCell[];
}

export interface Scene {
  protocol_version: number;
  version: number;
  first: number;
  last: number;
  width: number;
  height: number;
  columns: { id: string; label: string; kind: string; x: number; w: number }[];
  rows: SceneRow[];
}

export interface LayoutDoc {
  total_height: number;
  fits: boolean;
  rows: number;
  runs: [number, number][];
}

export interface PanelColumn {
  id: string;
  label: string;
  kind: ColumnKind;
  domain?: [number, number];
  histogram?: { edges: number[]; counts: number[]; missing: number } | null;
  categories?: string[];
  counts?: { counts: number[]; missing: number };
  missing?: number;
}

export interface PanelDoc {
  columns: PanelColumn[];
  filtered: number;
  total: number;
}

export interface Delta {
  protocol_version: number;
  version: number;
  changed?: string[];
  layout?: LayoutDoc;
  scene?: Scene;
  panel?: PanelDoc;
}

export interface Rejection {
  protocol_version: number;
  rejected: true;
  current_version: number;
  error: string;
}

export interface Heartbeat {
  protocol_version: number;
  kind: "heartbeat";
}

export type ServerMessage = Delta | Rejection | Heartbeat;

export function isRejection(msg: ServerMessage): msg is Rejection {
  return (msg as Rejection).rejected === true;
}

export function isHeartbeat(msg: ServerMessage): msg is Heartbeat {
  return (msg as Heartbeat).kind === "heartbeat";
}

/** Stable identity of a render row across scenes (items by id, groups by path). */
export function rowKey(row: SceneRow): string {
  if (row.kind === "item") return `r:${row.row}`;
  return `${row.kind === "group" ? "g" : "h"}:${(row.group?.path ?? []).join("")}`;
}
