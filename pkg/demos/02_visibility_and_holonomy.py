"""Straight-line visibility on the plane and the depth-one phenomenon.

From the basepoint, exactly the first generation of singularities is
visible: deeper cone points hide behind slits that are radially aligned
with the viewpoint.  A hand-built two-level tree makes the structure exact,
and a sampled plane shows the same thing statistically.
"""

import math

from slitplane import (LocatedPoint, distance, manual_plane, sample_plane,
                       trace, visible_singularities)

# Hand-built tree: one root point at 1, whose child chart has a point at i.
m = manual_plane({(): [1 + 0j], (0,): [1j]})
root = LocatedPoint((), 0j)

print("two-level tree: root point 1, child point i")
for v in visible_singularities(m, root, 3.0):
    print(f"  visible from root: cone {v.cone}, holonomy {v.holonomy}, "
          f"distance {v.distance}")

# The grandchild develops to 1+i (distance sqrt(2)) but the straight path
# toward it never leaves the root chart: the intermediate slit is collinear
# with the origin.
tr = trace(m, root, math.atan2(1, 1), math.sqrt(2))
print(f"trace toward 1+i ends in chart {tr.end.chart} at {tr.end.pos:.3f} "
      f"({type(tr.terminal).__name__})")

d = distance(m, root, m.locate_cone((0, 0)), 5.0)
print(f"metric distance to the grandchild: {d} "
      f"(geodesic bends at the middle cone; |holonomy| = {math.sqrt(2):.4f})")

# From the middle cone point, the grandchild is visible across its own sheet.
for v in visible_singularities(m, m.locate_cone((0,)), 3.0):
    print(f"  visible from the cone: {v.cone} at holonomy {v.holonomy}")

# On a sampled plane the same story: root-visible singularities are exactly
# the first Poisson generation.
plane = sample_plane(7, 4.0, 1.0)
found = visible_singularities(plane, plane.basepoint(), 1.0)
depth_one = [v for v in found if len(v.cone) == 1]
print(f"\nsampled plane (seed 7): {len(found)} visible within radius 1, "
      f"{len(depth_one)} at depth one (expected: all)")
print(f"root points within radius 1: "
      f"{sum(1 for p in plane.root.points if abs(p) <= 1.0)}")
