import { describe, expect, it } from "vitest";

import { brushToFilter, toggleCategoryExclusion } from "../src/brush.js";
import type { FilterDoc } from "../src/protocol.js";

const geom = { x: 0, width: 200, domain: [0, 100] as [number, number] };

describe("brushToFilter", () => {
  it("maps the left half of the band to [0, 50]", () => {
    const filters = brushToFilter("age", [0, 100], geom);
    expect(filters).toEqual([
      { column: "age", kind: "numeric_range", lo: 0, hi: 50 },
    ]);
  });

  it("elides a full-width brush", () => {
    expect(brushToFilter("age", [0, 200], geom)).toEqual([]);
  });

  it("clears the column filter on a zero-width brush", () => {
    const existing: FilterDoc[] = [
      { column: "age", kind: "numeric_range", lo: 10, hi: 20 },
      { column: "pop", kind: "numeric_range", lo: 1, hi: 2 },
    ];
    expect(brushToFilter("age", [80, 80], geom, existing)).toEqual([
      { column: "pop", kind: "numeric_range", lo: 1, hi: 2 },
    ]);
  });

  it("merges with filters on other columns", () => {
    const existing: FilterDoc[] = [
      { column: "pop", kind: "numeric_range", lo: 1, hi: 2 },
    ];
    const filters = brushToFilter("age", [50, 100], geom, existing);
    expect(filters).toHaveLength(2);
    expect(filters[1]).toEqual(
      { column: "age", kind: "numeric_range", lo: 25, hi: 50 });
  });

  it("replaces a previous brush on the same column", () => {
    const first = brushToFilter("age", [0, 100], geom);
    const second = brushToFilter("age", [100, 150], geom, first);
    expect(second).toEqual([
      { column: "age", kind: "numeric_range", lo: 50, hi: 75 },
    ]);
  });

  it("clamps brushes that leave the band", () => {
    const filters = brushToFilter("age", [-50, 100], geom);
    expect(filters[0].lo).toBe(0);
    expect(filters[0].hi).toBe(50);
  });

  it("accepts inverted brush direction", () => {
    expect(brushToFilter("age", [100, 0], geom)).toEqual(
      brushToFilter("age", [0, 100], geom));
  });
});

describe("toggleCategoryExclusion", () => {
  it("excludes the clicked category", () => {
    expect(toggleCategoryExclusion("continent", "Asia")).toEqual([
      { column: "continent", kind: "category_exclusion", excluded: ["Asia"] },
    ]);
  });

  it("toggles back off", () => {
    const once = toggleCategoryExclusion("continent", "Asia");
    expect(toggleCategoryExclusion("continent", "Asia", once)).toEqual([]);
  });

  it("accumulates multiple categories", () => {
    const once = toggleCategoryExclusion("continent", "Asia");
    const twice = toggleCategoryExclusion("continent", "Africa", once);
    expect(twice[0].excluded).toEqual(["Africa", "Asia"]);
  });
});
