import numpy as np
import pytest

from hypercollapse.errors import EmptySample
from hypercollapse.limits import BorelLaw
from hypercollapse.rng import make_rng
from hypercollapse.stats import (binomial_z, compare_distributions, ks_statistic, tv_empirical,
                                 tv_noise_bound, tv_window)


def test_identical_histograms():
    a = np.array([1, 2, 2, 3, 5])
    assert tv_empirical(a, a) == 0.0
    assert tv_window(a, [1, 2, 3, 5], [0.2, 0.4, 0.2, 0.2])[0] == pytest.approx(0.0)


def test_borel_resample_within_noise():
    law = BorelLaw(0.5)
    pmf = law.window(40)
    rng = make_rng(11)
    a = law.sample(10 ** 5, rng)
    b = law.sample(10 ** 5, rng)
    assert tv_empirical(a, b) <= tv_noise_bound(40, 10 ** 5)
    tv, out_e, out_t = tv_window(a, np.arange(1, 41), pmf)
    assert tv <= tv_noise_bound(40, 10 ** 5)
    assert 0 <= out_e < 1e-3 and 0 < out_t <= law.tail_bound(40)


def test_window_reports_outside_mass():
    tv, out_e, out_t = tv_window(np.array([1, 1, 50, 50]), [1, 2], [0.5, 0.25])
    assert out_e == pytest.approx(0.5) and out_t == pytest.approx(0.25)
    assert tv == pytest.approx(0.5 * (0.0 + 0.25))


def test_fair_coin_z():
    flips = make_rng(3).random(10 ** 4) < 0.5
    c = compare_distributions(flips, 0.5, threshold=4.0)
    assert c.statistic == "z" and c.passed


def test_ks_uniform():
    u = make_rng(5).random(5000)
    assert ks_statistic(u, lambda x: np.clip(x, 0, 1)) < 1.63 / np.sqrt(5000) * 1.5
    c = compare_distributions(u, lambda x: np.clip(x, 0, 1), threshold=0.05)
    assert c.statistic == "ks" and c.passed


def test_empty_sample():
    with pytest.raises(EmptySample):
        compare_distributions([], [0.5, 0.5])
    with pytest.raises(EmptySample):
        binomial_z(0, 0, 0.5)


def test_comparison_names_provenance():
    c = compare_distributions([1, 2], [0.5, 0.5], name="x", target_name="uniform", provenance="test")
    d = c.to_dict()
    assert d["target"] == "uniform" and d["provenance"] == "test" and d["window"] == [1, 2]
