"""Monte Carlo checks of the closed-form local laws.

Counts of visible singularities are Poisson: mean lam*pi*R^2 from a regular
point and lam*2*pi*R^2 from a singularity (the 8*pi*R^2 law at intensity 4);
holonomy directions are isotropic and the nearest-singularity distance
follows the void-probability law 1 - exp(-lam*pi*r^2).

Trial counts here are trimmed for a quick run; the acceptance suite runs
the full 2000-trial versions.
"""

import math

from slitplane import (binomial_reference, mc_nearest_distance,
                       mc_visible_count, poisson_pmf)

TRIALS = 400

regular = mc_visible_count(4.0, 0.5, "regular", TRIALS, seed=11)
print("visible count from a regular point (lam=4, R=0.5):")
print(f"  mean {regular.mean:.4f} vs lam pi R^2 = {math.pi:.4f}; "
      f"chi2 p = {regular.chi2[2]:.3f}")
print(f"  empirical factor vs lam*pi*R^2: "
      f"{regular.extras['empirical_factor_vs_pi_r2']:.3f}")

singular = mc_visible_count(4.0, 0.5, "singularity", TRIALS, seed=7)
print("\nvisible count from a planted singularity:")
print(f"  mean {singular.mean:.4f} vs lam 2 pi R^2 = {2 * math.pi:.4f}; "
      f"chi2 p = {singular.chi2[2]:.3f}")
print("  histogram:", dict(sorted(singular.histogram.items())))

nearest = mc_nearest_distance(4.0, 1.0, TRIALS, seed=5)
print("\nnearest visible singularity from the root (lam=4):")
print(f"  KS sup-difference vs 1-exp(-4 pi r^2): {nearest.ks[0]:.4f}")
print(f"  median {nearest.samples_summary['median']:.4f} vs "
      f"sqrt(ln 2 / 4 pi) = {math.sqrt(math.log(2) / (4 * math.pi)):.4f}")

# The finite-genus binomial law converges to the Poisson limit.
print("\nbinomial reference (g = 10^6, R = 0.5) vs Poisson(2 pi):")
for k in range(0, 12, 2):
    b = binomial_reference(10 ** 6, k, 0.5)
    p = poisson_pmf(2 * math.pi, k)
    print(f"  k={k:2d}: binomial {b:.6f}  poisson {p:.6f}  gap {abs(b - p):.2e}")
