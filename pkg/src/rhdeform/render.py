"""SVG figures of contours coloured by the local jump weight."""

from __future__ import annotations

import numpy as np

from .graph import Rectangle, build_grid_graph
from .rhp import RHProblem, frobenius_weight

PANEL = 360
MARGIN = 24


def weight_color(w: float) -> str:
    """Log colour scale: green at 1e-16, yellow at 1, red at 1e4."""
    lw = np.log10(max(float(w), 1e-300))
    lw = min(max(lw, -16.0), 4.0)
    if lw <= 0:
        t = (lw + 16) / 16
        r, g, b = 255 * t, 160 + 60 * t, 0
    else:
        t = lw / 4
        r, g, b = 255, 220 * (1 - t), 0
    return f"#{int(round(r)):02x}{int(round(g)):02x}{int(round(b)):02x}"


def _viewport(rect: Rectangle, x0: float, y0: float):
    span = max(rect.width, rect.height) or 1.0
    scale = (PANEL - 2 * MARGIN) / span
    ox = x0 + MARGIN + 0.5 * (span - rect.width) * scale
    oy = y0 + MARGIN + 0.5 * (span - rect.height) * scale

    def to_px(z: complex) -> tuple[float, float]:
        return (ox + (z.real - rect.xmin) * scale, oy + (rect.ymax - z.imag) * scale)

    return to_px


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def panel_svg(rhp: RHProblem, rect: Rectangle, x0: float = 0.0, y0: float = 0.0, title: str = "",
              grid: tuple[int, int] | None = None, marks=(), samples: int = 6) -> list[str]:
    """SVG elements of one panel."""
    to_px = _viewport(rect, x0, y0)
    out = [f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{PANEL}" height="{PANEL}" fill="white" stroke="#888"/>']
    if grid is not None:
        g = build_grid_graph(rect, *grid)
        for a, b in g.embedding.edges:
            p, q = to_px(complex(g.positions[a])), to_px(complex(g.positions[b]))
            out.append(f'<line x1="{_fmt(p[0])}" y1="{_fmt(p[1])}" x2="{_fmt(q[0])}" y2="{_fmt(q[1])}" '
                       'stroke="#ddd" stroke-width="0.5"/>')
    for arc in rhp.arcs:
        pts = arc.points
        if arc.ray_angle is not None:
            pts = np.append(pts, rect.ray_exit(complex(pts[-1]), arc.ray_angle))
        for a, b in zip(pts[:-1], pts[1:]):
            t = np.linspace(0, 1, samples + 1)
            z = a + (b - a) * t
            mids = 0.5 * (z[:-1] + z[1:])
            w = frobenius_weight(arc.jump(mids))
            for k in range(samples):
                p, q = to_px(complex(z[k])), to_px(complex(z[k + 1]))
                out.append(f'<line x1="{_fmt(p[0])}" y1="{_fmt(p[1])}" x2="{_fmt(q[0])}" y2="{_fmt(q[1])}" '
                           f'stroke="{weight_color(w[k])}" stroke-width="2.5" stroke-linecap="round"/>')
    for z in marks:
        p = to_px(complex(z))
        out.append(f'<circle cx="{_fmt(p[0])}" cy="{_fmt(p[1])}" r="3.5" fill="blue"/>')
    if title:
        out.append(f'<text x="{_fmt(x0 + PANEL / 2)}" y="{_fmt(y0 + 16)}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13">{title}</text>')
    return out


def figure_svg(panels: list[dict], rect: Rectangle, grid: tuple[int, int] | None = None, marks=()) -> str:
    """Side-by-side panels; each dict has ``rhp`` and optionally ``title``."""
    width = PANEL * max(1, len(panels))
    body = []
    for k, p in enumerate(panels):
        body += panel_svg(p["rhp"], rect, k * PANEL, 0.0, p.get("title", ""), grid, marks)
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" '
            f'viewBox="0 0 {width} {PANEL}">')
    return "\n".join([head, *body, "</svg>"]) + "\n"


def stage_title(name: str, kappa: float | None) -> str:
    return name if kappa is None else f"{name}: kappa = {kappa:.3g}"


__all__ = ["figure_svg", "panel_svg", "stage_title", "weight_color"]
