"""SVG export of visibility atlases.

Figures are diagnostics: cells are drawn in developed coordinates around the
viewpoint with arcs flattened to polylines at half-degree resolution.  Areas
and all quantitative output always come from the closed forms in the atlas
itself, never from these outlines.
"""

from __future__ import annotations

import cmath
import math

from .explorer import AtlasCell, VisibleAtlas
from .geom import line_crossing_radius

ARC_STEP = math.radians(0.5)

_PALETTE = ["#4878cf", "#ee854a", "#6acc64", "#d65f5f", "#956cb4",
            "#8c613c", "#dc7ec0", "#797979", "#d5bb67", "#82c6e2"]


def _cell_depth(cell: AtlasCell) -> int:
    chart = cell.chart
    if isinstance(chart, tuple):
        return len(chart)
    return 0


def _cell_outline(cell: AtlasCell) -> list[complex]:
    t1, t2 = cell.theta
    steps = max(1, int(math.ceil((t2 - t1) / ARC_STEP)))
    outer = []
    for i in range(steps + 1):
        theta = t1 + (t2 - t1) * i / steps
        if cell.outer[0] == "arc":
            r = cell.outer[1]
        else:
            r = line_crossing_radius(cell.outer[1], cell.outer[2], theta)
        outer.append(r * cmath.exp(1j * theta))
    inner = []
    for i in range(steps + 1):
        theta = t2 - (t2 - t1) * i / steps
        r = 0.0 if cell.inner is None else line_crossing_radius(*cell.inner, theta)
        inner.append(r * cmath.exp(1j * theta))
    if cell.inner is None:
        inner = [0j]
    return outer + inner


def render_atlas_svg(atlas: VisibleAtlas, stroke_scale: float = 1.0,
                     color_by_depth: bool = True, size: int = 640) -> str:
    """Standalone SVG drawing of the atlas cells in developed coordinates."""
    r = atlas.radius
    scale = size / (2.2 * r)
    half = size / 2.0

    def xy(z: complex) -> str:
        # svg y axis points down
        return f"{half + scale * z.real:.2f},{half - scale * z.imag:.2f}"

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<circle cx="{half}" cy="{half}" r="{scale * r:.2f}" fill="none" '
        f'stroke="#bbbbbb" stroke-width="{0.8 * stroke_scale:.2f}" stroke-dasharray="4 3"/>',
    ]
    for idx, cell in enumerate(atlas.cells):
        outline = _cell_outline(cell)
        d = "M " + " L ".join(xy(z) for z in outline) + " Z"
        color = _PALETTE[_cell_depth(cell) % len(_PALETTE)] if color_by_depth \
            else _PALETTE[idx % len(_PALETTE)]
        parts.append(f'<path d="{d}" fill="{color}" fill-opacity="0.45" '
                     f'stroke="{color}" stroke-width="{0.6 * stroke_scale:.2f}"/>')
    parts.append(f'<circle cx="{half}" cy="{half}" r="{2.5 * stroke_scale:.2f}" fill="#000000"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
