"""Square-tiled surfaces: invariants, balls, and injectivity radii.

Builds the torus and the smallest genus-two origami, checks Gauss-Bonnet on
random permutation pairs, and computes injectivity radii through the lazy
universal cover (half the shortest deck displacement of the point's lift).
"""

import math

from slitplane import (LocatedPoint, Perm, ball_complex, build_sts,
                       injectivity_radius, parse_cycles, random_sts, rescale,
                       visible_atlas)

torus = build_sts(Perm.identity(1), Perm.identity(1))
p = LocatedPoint(0, 0.23 + 0.37j)
print(f"unit torus: genus {torus.genus}, area {torus.total_area}, "
      f"injectivity radius at a generic point: "
      f"{injectivity_radius(torus, p, 2.0)}")

for radius in (0.4, 0.55, 0.62):
    bc = ball_complex(torus, p, radius)
    print(f"  ball r={radius}: chi={bc.chi} boundary circles="
          f"{bc.boundary_components} simply connected={bc.simply_connected}")

sts = build_sts(parse_cycles("(1 2)", 3), parse_cycles("(1 3)", 3))
print(f"\nthree-square origami h=(1 2) v=(1 3): genus {sts.genus}, "
      f"cone orders {sts.cone_orders()} (total angle "
      f"{2 * math.pi * (sts.cone_orders()[0] + 1) / math.pi:.0f} pi)")
cone = sts.locate_cone(0)
print(f"  injectivity radius at the cone point: "
      f"{injectivity_radius(sts, cone, 2.0)}")
atlas = visible_atlas(sts, cone, 0.45)
print(f"  atlas around the cone at r=0.45: {len(atlas.cells)} cells, "
      f"area {atlas.total_area:.6f} vs 3 pi r^2 = {3 * math.pi * 0.45 ** 2:.6f}")

doubled = rescale(sts, 2.0)
print(f"  rescaled by 2: injrad "
      f"{injectivity_radius(doubled, doubled.locate_cone(0), 4.0)} (doubles)")

print("\nGauss-Bonnet on random permutation pairs (sum of orders = 2g-2):")
for seed in range(5):
    surf = random_sts(seed, 8)
    print(f"  seed {seed}: genus {surf.genus}, orders {surf.cone_orders()}, "
          f"sum {sum(surf.cone_orders())} = {2 * surf.genus - 2}")
print("(uniform permutation pairs are illustrative only; their law is not "
      "the natural measure on any stratum)")
