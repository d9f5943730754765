/**
 * Column drag-and-drop -> combine_columns commands. Dropping one column
 * onto another defaults to a stacked (weighted-sum) combination; holding
 * a modifier selects interleave, nest, or imposition. Illegal drops
 * return null and never emit a command.
 */

export type ValueKind = "numerical" | "categorical" | "text" | "matrix";

export interface DragColumn {
  id: string;
  /** scalar kind the column produces; combined numeric columns count as numerical */
  valueKind: ValueKind | null;
}

export type DropTarget = DragColumn | "container";

export type DragModifier = "none" | "interleave" | "nest" | "impose";

export interface CombinePayload {
  kind: "stacked" | "interleaved" | "nested" | "imposition";
  children: string[];
}

export function dragCombine(
  source: DragColumn,
  target: DropTarget,
  modifier: DragModifier = "none",
): CombinePayload | null {
  if (target === "container") {
    // empty container accepts anything as a semantic group
    return { kind: "nested", children: [source.id] };
  }
  if (source.id === target.id) return null;
  const numeric = (c: DragColumn) => c.valueKind === "numerical";
  switch (modifier) {
    case "nest":
      return { kind: "nested", children: [target.id, source.id] };
    case "interleave":
      if (numeric(source) && numeric(target)) {
        return { kind: "interleaved", children: [target.id, source.id] };
      }
      return null;
    case "impose": {
      const kinds = [source.valueKind, target.valueKind].sort();
      if (kinds[0] === "categorical" && kinds[1] === "numerical") {
        return { kind: "imposition", children: [target.id, source.id] };
      }
      return null;
    }
    default:
      if (numeric(source) && numeric(target)) {
        return { kind: "stacked", children: [target.id, source.id] };
      }
      return null;
  }
}
