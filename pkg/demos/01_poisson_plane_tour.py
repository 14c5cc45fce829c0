"""Tour of the Poisson translation plane sampler.

Samples a truncated plane, walks its chart tree, and demonstrates the lazy
consistency that makes experiments reproducible: enlarging the budget
replays the same sample, and the serialized form round-trips losslessly.
"""

import math

from slitplane import TruncatedPlane, expand, restrict, sample_plane

SEED = 42
INTENSITY = 4.0

plane = sample_plane(SEED, INTENSITY, radius=1.0)
print(f"sampled plane: seed={SEED} intensity={INTENSITY} budget=1.0")
print(f"  charts: {plane.node_count}, root points: {len(plane.root.points)}")

print("\nchart tree (first two levels):")
for idx in sorted(plane.root.children):
    child = plane.root.children[idx]
    x = plane.root.points[idx]
    print(f"  chart ({idx},): spawned at {x:.3f} (|x|={abs(x):.3f}), "
          f"budget {child.budget:.3f}, {len(child.points)} points, "
          f"{len(child.children)} children")

# Every sampled point opens a slit along the outward radial ray and glues a
# fresh plane across it; the apex pair is a cone point of angle 4*pi.
cones = list(plane.iter_cone_points())
print(f"\ncone points in the truncation: {len(cones)} (all order one)")

# Lazy consistency: a bigger budget is a pure continuation of the sample.
bigger = expand(plane, 2.0)
assert restrict(bigger, 1.0).to_json() == plane.to_json()
assert bigger.to_json() == sample_plane(SEED, INTENSITY, 2.0).to_json()
print(f"expand to budget 2.0: {bigger.node_count} charts; "
      f"restriction reproduces the original bytewise")

# Serialization round trip.
assert TruncatedPlane.from_json(plane.to_json()).to_json() == plane.to_json()
print("JSON round trip: lossless")

# Expected chart count matches the closed-form series sum_d (2 pi lam)^d R^{2d} / (2d)!
series = sum((2 * math.pi * INTENSITY) ** d / math.factorial(2 * d) for d in range(40))
print(f"\nexpected charts at budget 1.0: {series:.1f} "
      f"(this sample: {plane.node_count})")
