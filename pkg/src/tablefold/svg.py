"""Deterministic SVG 1.1 output for scenes.

Identical scene + theme always produce byte-identical documents: floats
are formatted with fixed precision and elements follow scene order (one
group per row, one per cell, primitives in z-order).
"""

from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from .scene import Scene, Theme, DEFAULT_THEME


def _f(v: float) -> str:
    return f"{float(v):.2f}"


def _render_primitive(p: dict, out: list):
    kind = p["kind"]
    cls = f' class={quoteattr(p["cls"])}' if "cls" in p else ""
    if kind == "rect":
        stroke = f' stroke={quoteattr(p["stroke"])}' if "stroke" in p else ""
        out.append(f'<rect x="{_f(p["x"])}" y="{_f(p["y"])}" width="{_f(p["w"])}"'
                   f' height="{_f(p["h"])}" fill={quoteattr(p["fill"])}{stroke}{cls}/>')
    elif kind == "line":
        out.append(f'<line x1="{_f(p["x1"])}" y1="{_f(p["y1"])}" x2="{_f(p["x2"])}"'
                   f' y2="{_f(p["y2"])}" stroke={quoteattr(p["stroke"])}{cls}/>')
    elif kind == "circle":
        out.append(f'<circle cx="{_f(p["cx"])}" cy="{_f(p["cy"])}" r="{_f(p["r"])}"'
                   f' fill={quoteattr(p["fill"])}{cls}/>')
    elif kind == "text":
        out.append(f'<text x="{_f(p["x"])}" y="{_f(p["y"])}"'
                   f' font-size="{_f(p.get("size", 10.0))}"'
                   f' fill={quoteattr(p["fill"])}{cls}>{escape(p["text"])}</text>')
    elif kind == "path":
        fill = p.get("fill", "none")
        stroke = p.get("stroke", "none")
        out.append(f'<path d={quoteattr(p["d"])} fill={quoteattr(fill)}'
                   f' stroke={quoteattr(stroke)}{cls}/>')


def render_svg(scene: Scene, theme: Theme = DEFAULT_THEME) -> bytes:
    """Standalone SVG document for the scene window."""
    width = max(1.0, scene.width)
    if scene.rows:
        top = scene.rows[0].y
        bottom = scene.rows[-1].y + scene.rows[-1].h
    else:
        top, bottom = 0.0, 1.0
    height = max(1.0, bottom - top)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1"'
        f' width="{_f(width)}" height="{_f(height)}"'
        f' viewBox="0 {_f(top)} {_f(width)} {_f(height)}"'
        f' font-family={quoteattr(theme.font_family)}>',
        f'<rect x="0" y="{_f(top)}" width="{_f(width)}" height="{_f(height)}"'
        f' fill={quoteattr(theme.background)}/>',
    ]
    for row in scene.rows:
        attrs = f'class="row row-{row.kind}" data-index="{row.index}"'
        if row.row_id is not None:
            attrs += f' data-row="{row.row_id}"'
        out.append(f"<g {attrs}>")
        for cell in row.cells:
            out.append(f'<g class="cell" data-column={quoteattr(cell.column_id)}>')
            for p in cell.primitives:
                _render_primitive(p, out)
            out.append("</g>")
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out).encode("utf-8")
