"""Reference laws and the Monte Carlo harness validating the simulator.

The closed forms here are the limit laws for visible-singularity counts
around a conditioned singularity: a binomial pmf in the genus, and its
Poisson limit with mean ``8*pi*R^2`` at intensity four.  The harness runs
seeded experiments on sampled planes and fits the empirical histograms
against these laws with chi-square and Kolmogorov-Smirnov statistics.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

from scipy import stats as sps

from .errors import InsufficientData, OutOfDomain, TooFewSamples
from .flatcomplex import LocatedPoint
from .geom import TWO_PI, Vec2
from .plane import PLANTED_INDEX, sample_plane
from .explorer import visible_singularities
from .rngstream import Stream, derive_seed

BUDGET_MARGIN = 0.05


def poisson_pmf(mean: float, k: int) -> float:
    """P(X = k) for X ~ Poisson(mean), evaluated in log space."""
    if mean <= 0 or k < 0:
        raise OutOfDomain("need mean > 0 and k >= 0")
    return math.exp(k * math.log(mean) - mean - math.lgamma(k + 1))


def binomial_reference(g: int, k: int, radius: float) -> float:
    """Probability of ``k`` visible singularities in a radius-``radius`` ball
    around a singularity on a genus-``g`` unit-area surface.

    Binomial(2g-3, 4*pi*R^2/g) evaluated in log space; tends to the
    Poisson(8*pi*R^2) pmf as the genus grows.
    """
    if g < 2:
        raise OutOfDomain("need genus >= 2")
    n = 2 * g - 3
    p = 4.0 * math.pi * radius * radius / g
    if p >= 1.0:
        raise OutOfDomain(f"4*pi*R^2/g = {p:.3g} >= 1")
    if k < 0 or k > n:
        raise OutOfDomain(f"k = {k} outside 0..{n}")
    kk = min(k, n - k)
    if kk <= 4096:
        # product form: lgamma(n+1) - lgamma(n-k+1) cancels catastrophically
        # for n in the millions
        log_choose = sum(math.log(n - kk + j) - math.log(j) for j in range(1, kk + 1))
    else:
        log_choose = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return math.exp(log_choose + k * math.log(p) + (n - k) * math.log1p(-p))


def binomial_reference_total(g: int, radius: float, tol: float = 1e-18) -> float:
    """Sum of the binomial reference over its support (tail cut below ``tol``)."""
    n = 2 * g - 3
    mean = n * 4.0 * math.pi * radius * radius / g
    total = 0.0
    for k in range(n + 1):
        term = binomial_reference(g, k, radius)
        total += term
        if k > mean and term < tol:
            break
    return total


@dataclass(frozen=True)
class ReferenceLaw:
    """A fitted reference distribution: ``poisson`` over counts or the
    ``nearest-distance`` law with CDF ``1 - exp(-lam*pi*r^2)``."""

    name: str
    params: dict

    def pmf(self, k: int) -> float:
        if self.name == "poisson":
            return poisson_pmf(self.params["mean"], k)
        if self.name == "binomial_visible":
            return binomial_reference(self.params["g"], k, self.params["radius"])
        raise OutOfDomain(f"{self.name} has no pmf")

    def tail(self, k: int) -> float:
        """P(X >= k)."""
        if self.name == "poisson":
            return float(sps.poisson.sf(k - 1, self.params["mean"]))
        raise OutOfDomain(f"{self.name} has no tail formula")

    def cdf(self, r: float) -> float:
        if self.name == "nearest-distance":
            lam = self.params["intensity"]
            return 1.0 - math.exp(-lam * math.pi * r * r)
        raise OutOfDomain(f"{self.name} has no cdf")


def chi2_gof(histogram: dict[int, int], law: ReferenceLaw) -> tuple[float, int, float]:
    """Pearson chi-square of a count histogram against a discrete law.

    Bins are merged from both tails until every expected count is at least
    five; degrees of freedom are merged bins minus one (no fitted
    parameters).  Raises ``InsufficientData`` when fewer than two merged
    bins remain.
    """
    trials = sum(histogram.values())
    if trials <= 0:
        raise InsufficientData("empty histogram")
    k_max = max(histogram)
    expected = [trials * law.pmf(k) for k in range(k_max + 1)]
    expected.append(trials * law.tail(k_max + 1))
    observed = [histogram.get(k, 0) for k in range(k_max + 1)]
    observed.append(0)

    bins: list[tuple[float, int]] = []
    acc_e, acc_o = 0.0, 0
    for e, o in zip(expected, observed):
        acc_e += e
        acc_o += o
        if acc_e >= 5.0:
            bins.append((acc_e, acc_o))
            acc_e, acc_o = 0.0, 0
    if acc_e > 0 or acc_o > 0:
        if bins:
            last_e, last_o = bins[-1]
            bins[-1] = (last_e + acc_e, last_o + acc_o)
        else:
            bins.append((acc_e, acc_o))
    if len(bins) < 2:
        raise InsufficientData("fewer than two bins with expected mass >= 5")
    stat = sum((o - e) ** 2 / e for e, o in bins)
    dof = len(bins) - 1
    p = float(sps.chi2.sf(stat, dof))
    return stat, dof, p


def ks_uniform_angles(holonomies: list[Vec2]) -> tuple[float, float]:
    """Kolmogorov-Smirnov test of holonomy directions against the uniform
    law on ``[0, 2*pi)``."""
    if len(holonomies) < 20:
        raise TooFewSamples(f"need >= 20 samples, got {len(holonomies)}")
    angles = [math.atan2(h.imag, h.real) % TWO_PI for h in holonomies]
    result = sps.kstest(angles, sps.uniform(scale=TWO_PI).cdf)
    return float(result.statistic), float(result.pvalue)


def _ks_against_cdf(samples: list[float], n_total: int, cdf) -> float:
    """One-sample KS sup-difference; censored trials enter only through
    ``n_total`` (they sit above every finite sample)."""
    sup = 0.0
    for i, x in enumerate(sorted(samples), start=1):
        fx = cdf(x)
        sup = max(sup, abs(i / n_total - fx), abs((i - 1) / n_total - fx))
    return sup


@dataclass
class McReport:
    """Result of one seeded Monte Carlo experiment."""

    experiment: str
    base_seed: int
    seed_scheme: str
    trials: int
    histogram: dict[int, int]
    mean: float
    variance: float
    law: ReferenceLaw
    chi2: Optional[tuple[float, int, float]] = None
    ks: Optional[tuple[float, Optional[float]]] = None
    censored: int = 0
    samples_summary: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def chi2_pvalue(self) -> Optional[float]:
        return None if self.chi2 is None else self.chi2[2]

    def to_document(self) -> dict:
        return {
            "format_version": 1,
            "kind": "mc_report",
            "experiment": self.experiment,
            "seeds": {"base": self.base_seed, "scheme": self.seed_scheme,
                      "trials": self.trials},
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "mean": self.mean,
            "variance": self.variance,
            "law": {"name": self.law.name, "params": self.law.params},
            "chi2": None if self.chi2 is None else
                    {"statistic": self.chi2[0], "dof": self.chi2[1], "pvalue": self.chi2[2]},
            "ks": None if self.ks is None else
                  {"statistic": self.ks[0], "pvalue": self.ks[1]},
            "censored": self.censored,
            "samples_summary": self.samples_summary,
            "extras": self.extras,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))

    def histogram_csv(self) -> str:
        lines = ["count,frequency"]
        for k in sorted(self.histogram):
            lines.append(f"{k},{self.histogram[k]}")
        return "\n".join(lines) + "\n"


def _histogram_stats(histogram: dict[int, int]) -> tuple[float, float]:
    n = sum(histogram.values())
    mean = sum(k * c for k, c in histogram.items()) / n
    var = sum(c * (k - mean) ** 2 for k, c in histogram.items()) / n
    return mean, var


def _planted_viewpoint() -> LocatedPoint:
    return LocatedPoint((PLANTED_INDEX,), 0j, cone=(PLANTED_INDEX,))


def mc_visible_count(intensity: float, radius: float, frm: str, trials: int,
                     seed: int) -> McReport:
    """Distribution of the visible-singularity count within ``radius``.

    ``frm="regular"`` counts from the root basepoint and fits
    Poisson(intensity * pi * R^2); ``frm="singularity"`` plants one extra
    root point at a uniform position in the unit disk, takes the viewpoint
    on its cone point (so the surroundings follow the construction's law
    for the fresh sector plus the parent sheet), and fits
    Poisson(intensity * 2*pi * R^2).  The planted cone point itself is not
    counted.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    if frm not in ("regular", "singularity"):
        raise ValueError("frm must be 'regular' or 'singularity'")
    histogram: dict[int, int] = {}
    for i in range(trials):
        trial_seed = derive_seed(seed, i)
        if frm == "regular":
            plane = sample_plane(trial_seed, intensity, radius * (1.0 + BUDGET_MARGIN))
            count = len(visible_singularities(plane, plane.basepoint(), radius))
        else:
            plant_stream = Stream(trial_seed, (), "plant")
            r = math.sqrt(plant_stream.uniform())
            phi = plant_stream.angle()
            u = r * complex(math.cos(phi), math.sin(phi))
            budget = abs(u) + radius * (1.0 + BUDGET_MARGIN)
            plane = sample_plane(trial_seed, intensity, budget, planted=u)
            count = len(visible_singularities(plane, _planted_viewpoint(), radius))
        histogram[count] = histogram.get(count, 0) + 1

    sheet_factor = 1.0 if frm == "regular" else 2.0
    ref_mean = intensity * sheet_factor * math.pi * radius * radius
    law = ReferenceLaw("poisson", {"mean": ref_mean})
    mean, var = _histogram_stats(histogram)
    try:
        chi2 = chi2_gof(histogram, law)
    except InsufficientData:
        chi2 = None
    base_rate = intensity * math.pi * radius * radius
    extras = {
        "empirical_factor_vs_pi_r2": mean / base_rate,
        "empirical_factor_vs_2pi_r2": mean / (2.0 * base_rate),
    }
    return McReport(experiment=f"visible-count/{frm}", base_seed=seed,
                    seed_scheme="blake2b(base,i)", trials=trials,
                    histogram=histogram, mean=mean, variance=var, law=law,
                    chi2=chi2, extras=extras)


def mc_nearest_distance(intensity: float, radius: float, trials: int,
                        seed: int) -> McReport:
    """Law of the distance to the nearest root-visible singularity.

    Compared against the void-probability CDF ``1 - exp(-lam*pi*r^2)``;
    trials with no visible singularity within ``radius`` are censored and
    only enter the empirical CDF through the denominator.
    """
    if trials < 100:
        raise ValueError("need at least 100 trials")
    samples: list[float] = []
    censored = 0
    for i in range(trials):
        trial_seed = derive_seed(seed, i)
        plane = sample_plane(trial_seed, intensity, radius * (1.0 + BUDGET_MARGIN))
        found = visible_singularities(plane, plane.basepoint(), radius)
        if found:
            samples.append(min(v.distance for v in found))
        else:
            censored += 1
    law = ReferenceLaw("nearest-distance", {"intensity": intensity})
    ks_stat = _ks_against_cdf(samples, trials, law.cdf) if samples else None
    ks_p = None
    if ks_stat is not None and len(samples) == trials:
        ks_p = float(sps.kstwobign.sf(math.sqrt(trials) * ks_stat))
    histogram: dict[int, int] = {}
    for d in samples:
        histogram[int(d * 20)] = histogram.get(int(d * 20), 0) + 1
    mean = sum(samples) / len(samples) if samples else math.nan
    var = (sum((d - mean) ** 2 for d in samples) / len(samples)) if samples else math.nan
    summary = {
        "median": (sorted(samples)[len(samples) // 2]
                   if censored <= trials // 10 and samples else None),
        "min": min(samples) if samples else None,
        "max": max(samples) if samples else None,
        "histogram_bin_width": 0.05,
    }
    return McReport(experiment="nearest-distance", base_seed=seed,
                    seed_scheme="blake2b(base,i)", trials=trials,
                    histogram=histogram, mean=mean, variance=var, law=law,
                    ks=(ks_stat, ks_p) if ks_stat is not None else None,
                    censored=censored, samples_summary=summary)
