import math

import numpy as np
import pytest

from slitplane.errors import InsufficientData, OutOfDomain, TooFewSamples
from slitplane.stats import (McReport, ReferenceLaw, binomial_reference,
                             binomial_reference_total, chi2_gof,
                             ks_uniform_angles, mc_nearest_distance,
                             mc_visible_count, poisson_pmf)


def test_poisson_pmf_basics():
    m = 8 * math.pi * 0.25
    assert poisson_pmf(m, 0) == pytest.approx(math.exp(-m), rel=1e-14)
    total = sum(poisson_pmf(m, k) for k in range(201))
    assert abs(total - 1.0) < 1e-12
    mean = sum(k * poisson_pmf(m, k) for k in range(201))
    assert abs(mean - m) < 1e-10


def test_binomial_reference_domain():
    with pytest.raises(OutOfDomain):
        binomial_reference(10, 2 * 10 - 2, 0.5)  # k > 2g-3
    with pytest.raises(OutOfDomain):
        binomial_reference(2, 0, 1.0)  # 4*pi*R^2/g >= 1
    with pytest.raises(OutOfDomain):
        binomial_reference(1, 0, 0.1)


def test_binomial_reference_large_genus_value():
    # (1 - pi/10^6)^(2*10^6 - 3) is e^(-2*pi) up to o(1)
    value = binomial_reference(10 ** 6, 0, 0.5)
    assert value == pytest.approx(math.exp(-2 * math.pi), rel=1e-4)
    assert value == pytest.approx(1.8674e-3, rel=1e-3)


def test_binomial_close_to_poisson_limit():
    worst = max(abs(binomial_reference(10 ** 6, k, 0.5) - poisson_pmf(2 * math.pi, k))
                for k in range(11))
    assert worst < 1e-3


def test_binomial_sums_to_one():
    assert abs(binomial_reference_total(10 ** 6, 0.5) - 1.0) < 1e-10
    assert abs(binomial_reference_total(50, 0.5) - 1.0) < 1e-10


def test_chi2_calibration():
    # p-values roughly uniform when the data follow the law
    rng = np.random.default_rng(2027)
    mean = 6.0
    law = ReferenceLaw("poisson", {"mean": mean})
    low = 0
    for _ in range(100):
        draws = rng.poisson(mean, 10_000)
        hist: dict[int, int] = {}
        for d in draws:
            hist[int(d)] = hist.get(int(d), 0) + 1
        _, _, p = chi2_gof(hist, law)
        if p < 0.05:
            low += 1
    assert abs(low / 100 - 0.05) <= 0.0301


def test_chi2_power():
    rng = np.random.default_rng(5)
    mean = 5.0
    draws = rng.poisson(mean, 10_000)
    hist: dict[int, int] = {}
    for d in draws:
        hist[int(d)] = hist.get(int(d), 0) + 1
    _, _, p = chi2_gof(hist, ReferenceLaw("poisson", {"mean": 2 * mean}))
    assert p < 1e-6


def test_chi2_insufficient_data():
    with pytest.raises(InsufficientData):
        chi2_gof({0: 10}, ReferenceLaw("poisson", {"mean": 1e-3}))


def test_ks_uniform_midpoint_grid():
    # four equally spaced atoms at sector midpoints: small statistic, p above
    # the 0.01 working threshold
    angles = [math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4] * 25
    hols = [complex(math.cos(a), math.sin(a)) for a in angles]
    stat, p = ks_uniform_angles(hols)
    assert stat <= 0.13
    assert p > 0.01


def test_ks_degenerate_rejection():
    hols = [complex(1.0, 0.5)] * 50
    stat, p = ks_uniform_angles(hols)
    assert p < 1e-6


def test_ks_too_few():
    with pytest.raises(TooFewSamples):
        ks_uniform_angles([1 + 0j] * 19)


def test_mc_visible_count_regular_small():
    rep = mc_visible_count(4.0, 0.5, "regular", 200, seed=11)
    target = 4.0 * math.pi * 0.25
    assert abs(rep.mean - target) < 5 * math.sqrt(target / 200)
    assert rep.histogram and sum(rep.histogram.values()) == 200
    assert rep.law.params["mean"] == pytest.approx(target)
    assert 0.7 < rep.extras["empirical_factor_vs_pi_r2"] < 1.3


def test_mc_visible_count_vanishing_intensity():
    rep = mc_visible_count(1e-6, 0.5, "regular", 100, seed=3)
    assert rep.histogram == {0: 100}
    assert rep.chi2 is None  # single populated bin: no valid fit


def test_mc_reports_bit_reproducible():
    a = mc_visible_count(4.0, 0.4, "regular", 120, seed=9)
    b = mc_visible_count(4.0, 0.4, "regular", 120, seed=9)
    assert a.to_json() == b.to_json()
    c = mc_nearest_distance(4.0, 0.8, 120, seed=9)
    d = mc_nearest_distance(4.0, 0.8, 120, seed=9)
    assert c.to_json() == d.to_json()


def test_mc_nearest_distance_censoring():
    rep = mc_nearest_distance(1e-6, 1.0, 100, seed=2)
    assert rep.censored == 100
    assert rep.ks is None
    assert rep.samples_summary["median"] is None


def test_mc_requires_trials():
    with pytest.raises(ValueError):
        mc_visible_count(4.0, 0.5, "regular", 50, seed=0)
    with pytest.raises(ValueError):
        mc_visible_count(4.0, 0.5, "typical", 200, seed=0)


def test_histogram_csv_format():
    rep = mc_visible_count(4.0, 0.3, "regular", 100, seed=4)
    csv = rep.histogram_csv()
    lines = csv.strip().split("\n")
    assert lines[0] == "count,frequency"
    total = sum(int(line.split(",")[1]) for line in lines[1:])
    assert total == 100
