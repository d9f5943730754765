/**
 * Scene rows -> DOM. Each row becomes an absolutely positioned div
 * holding one SVG per cell; primitives arrive with resolved colors and
 * absolute document coordinates, so rendering subtracts the row origin
 * and draws.
 */

import type { Primitive, SceneRow } from "./protocol.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function num(p: Primitive, key: string): number {
  return Number(p[key] ?? 0);
}

function drawPrimitive(p: Primitive, dx: number, dy: number): SVGElement | null {
  const el = (name: string) => document.createElementNS(SVG_NS, name);
  switch (p.kind) {
    case "rect": {
      const r = el("rect");
      r.setAttribute("x", String(num(p, "x") - dx));
      r.setAttribute("y", String(num(p, "y") - dy));
      r.setAttribute("width", String(num(p, "w")));
      r.setAttribute("height", String(num(p, "h")));
      r.setAttribute("fill", String(p.fill ?? "none"));
      if (p.stroke) r.setAttribute("stroke", String(p.stroke));
      return r;
    }
    case "line": {
      const l = el("line");
      l.setAttribute("x1", String(num(p, "x1") - dx));
      l.setAttribute("y1", String(num(p, "y1") - dy));
      l.setAttribute("x2", String(num(p, "x2") - dx));
      l.setAttribute("y2", String(num(p, "y2") - dy));
      l.setAttribute("stroke", String(p.stroke ?? "#000"));
      return l;
    }
    case "circle": {
      const c = el("circle");
      c.setAttribute("cx", String(num(p, "cx") - dx));
      c.setAttribute("cy", String(num(p, "cy") - dy));
      c.setAttribute("r", String(num(p, "r")));
      c.setAttribute("fill", String(p.fill ?? "#000"));
      return c;
    }
    case "text": {
      const t = el("text");
      t.setAttribute("x", String(num(p, "x") - dx));
      t.setAttribute("y", String(num(p, "y") - dy));
      t.setAttribute("font-size", String(p.size ?? 10));
      t.setAttribute("fill", String(p.fill ?? "#222"));
      t.textContent = String(p.text ?? "");
      return t;
    }
    case "path": {
      const d = el("path");
      d.setAttribute("d", String(p.d ?? ""));
      d.setAttribute("fill", String(p.fill ?? "none"));
      d.setAttribute("stroke", String(p.stroke ?? "none"));
      d.setAttribute("transform", `translate(${-dx}, ${-dy})`);
      return d;
    }
    default:
      return null;
  }
}

export function renderRow(row: SceneRow, width: number): HTMLDivElement {
  const div = document.createElement("div");
  div.className = `tf-row tf-row-${row.kind}`;
  div.style.position = "absolute";
  div.style.top = `${row.y}px`;
  div.style.height = `${row.h}px`;
  div.style.width = `${width}px`;
  div.dataset.index = String(row.index);
  if (row.row !== undefined) div.dataset.row = String(row.row);
  if (row.group) div.dataset.group = row.group.path.join("/");

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(row.h));
  for (const cell of row.cells) {
    const g = document.createElementNS(SVG_NS, "g");
    g.setAttribute("class", `tf-cell tf-enc-${cell.encoding}`);
    g.dataset.column = cell.column;
    for (const p of cell.primitives) {
      const node = drawPrimitive(p, 0, row.y);
      if (node) {
        if (p.cls) node.setAttribute("class", String(p.cls));
        g.appendChild(node);
      }
    }
    svg.appendChild(g);
  }
  div.appendChild(svg);
  return div;
}
