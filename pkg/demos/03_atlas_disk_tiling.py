"""The disk-tiling identity and an SVG picture of a visibility atlas.

The angular-window sweep partitions every direction's radial segment across
portal crossings, so total atlas area is exactly (total angle / 2) R^2:
pi R^2 around a regular point, 2 pi R^2 around an order-one cone point.
That identity is the sharpest structural check of the gluing construction.
"""

import math
import pathlib

from slitplane import render_atlas_svg, sample_plane, visible_atlas
from slitplane.rngstream import Stream

SEED = 12
R = 1.0

stream = Stream(SEED, (), "plant")
r = math.sqrt(stream.uniform())
phi = stream.angle()
u = r * complex(math.cos(phi), math.sin(phi))

plane = sample_plane(SEED, 4.0, abs(u) + R + 1e-6, planted=u)

root_atlas = visible_atlas(plane, plane.basepoint(), R)
print(f"root atlas: {len(root_atlas.cells)} cells, "
      f"area {root_atlas.total_area:.12f} vs pi R^2 = {math.pi * R * R:.12f}")

cone_atlas = visible_atlas(plane, plane.locate_cone((-1,)), R)
print(f"cone atlas: {len(cone_atlas.cells)} cells over two sheets, "
      f"area {cone_atlas.total_area:.12f} vs 2 pi R^2 = {2 * math.pi * R * R:.12f}")

by_chart = {}
for cell in cone_atlas.cells:
    by_chart[cell.chart] = by_chart.get(cell.chart, 0.0) + cell.area
print("area by chart (largest first):")
for chart, area in sorted(by_chart.items(), key=lambda kv: -kv[1])[:8]:
    print(f"  chart {chart}: {area:.4f}")

out = pathlib.Path(__file__).with_name("atlas_from_cone.svg")
out.write_text(render_atlas_svg(cone_atlas))
print(f"wrote {out.name} (cells colored by chart depth)")
