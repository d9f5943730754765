import { describe, expect, it } from "vitest";

import { dragCombine, type DragColumn } from "../src/dragCombine.js";

const num = (id: string): DragColumn => ({ id, valueKind: "numerical" });
const cat = (id: string): DragColumn => ({ id, valueKind: "categorical" });
const txt = (id: string): DragColumn => ({ id, valueKind: "text" });

describe("dragCombine", () => {
  it("num onto num defaults to stacked", () => {
    expect(dragCombine(num("a"), num("b"))).toEqual({
      kind: "stacked", children: ["b", "a"],
    });
  });

  it("num onto cat with the imposition modifier", () => {
    expect(dragCombine(num("a"), cat("c"), "impose")).toEqual({
      kind: "imposition", children: ["c", "a"],
    });
  });

  it("imposition needs exactly one categorical side", () => {
    expect(dragCombine(num("a"), num("b"), "impose")).toBeNull();
    expect(dragCombine(cat("a"), cat("b"), "impose")).toBeNull();
  });

  it("text onto num is rejected without a command", () => {
    expect(dragCombine(txt("t"), num("a"))).toBeNull();
  });

  it("interleave modifier requires numeric columns", () => {
    expect(dragCombine(num("a"), num("b"), "interleave")).toEqual({
      kind: "interleaved", children: ["b", "a"],
    });
    expect(dragCombine(txt("t"), num("a"), "interleave")).toBeNull();
  });

  it("nest modifier accepts any kinds", () => {
    expect(dragCombine(txt("t"), cat("c"), "nest")).toEqual({
      kind: "nested", children: ["c", "t"],
    });
  });

  it("container drops create a semantic group", () => {
    expect(dragCombine(txt("t"), "container")).toEqual({
      kind: "nested", children: ["t"],
    });
  });

  it("dropping a column on itself does nothing", () => {
    expect(dragCombine(num("a"), num("a"))).toBeNull();
  });
});
