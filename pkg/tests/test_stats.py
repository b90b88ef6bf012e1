import math

import numpy as np
import pytest
import scipy.stats as sps

from aztec_gamma.rng import RngStream
from aztec_gamma.stats import (TestReport, bootstrap_tv_threshold, chi2_to_exact,
                               discrete_two_sample, independence_suite,
                               ks_critical, ks_one_sample, ks_statistic,
                               ks_statistic_lattice, lognormal_shuffle_log_covariance,
                               pearson_r, scaling_exponent, tv_distance)


def stream(tag=0):
    return RngStream(1618, tag)


class TestTwoSample:
    def test_identical_counts(self):
        c = {0: 50, 1: 30, 2: 20}
        rep = discrete_two_sample(c, dict(c), tv_threshold=0.01)
        assert rep.statistic == 0.0 and rep.passed

    def test_disjoint_supports(self):
        rep = discrete_two_sample({0: 100}, {1: 100}, tv_threshold=0.5)
        assert rep.statistic == 1.0 and not rep.passed

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            tv_distance({}, {1: 5})

    def test_same_law_passes(self):
        g = stream(1).generator
        p = np.array([0.3, 0.3, 0.2, 0.1, 0.1])
        a = g.multinomial(10_000, p)
        b = g.multinomial(10_000, p)
        rep = discrete_two_sample({i: int(v) for i, v in enumerate(a)},
                                  {i: int(v) for i, v in enumerate(b)},
                                  tv_threshold=0.03)
        assert rep.passed

    def test_bootstrap_calibration(self):
        # null data drawn from the model under test stays under the 99.9%
        # bootstrap quantile in at least 99% of meta-trials
        g = stream(2).generator
        rng = stream(3)
        p = np.array([0.3, 0.3, 0.2, 0.1, 0.1])
        ok = 0
        trials = 200
        for _ in range(trials):
            a = {i: int(v) for i, v in enumerate(g.multinomial(10_000, p))}
            b = {i: int(v) for i, v in enumerate(g.multinomial(10_000, p))}
            thr = bootstrap_tv_threshold(a, b, rng, level=0.999, resamples=300)
            ok += int(tv_distance(a, b) < thr)
        assert ok >= 0.99 * trials

    def test_chi2_to_exact(self):
        g = stream(4).generator
        exact = {0: 0.5, 1: 0.3, 2: 0.2}
        draws = g.multinomial(20_000, list(exact.values()))
        counts = {k: int(v) for k, v in zip(exact, draws)}
        _, pval = chi2_to_exact(counts, exact)
        assert pval > 1e-3


class TestKolmogorov:
    def test_uniform_passes(self):
        u = stream(5).uniform(100_000)
        rep = ks_one_sample(u, lambda t: np.clip(t, 0, 1), test_id="u")
        assert rep.passed

    def test_power_against_wrong_shape(self):
        x = stream(6).generator.gamma(2.0, size=5000)
        rep = ks_one_sample(x, sps.gamma(3.0).cdf)
        assert not rep.passed
        # the distributional distance dwarfs the critical value
        assert rep.statistic > 5 * rep.threshold

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            ks_statistic(np.array([]), lambda t: t)

    def test_critical_values_monotone(self):
        assert ks_critical(1000, 1e-3) > ks_critical(1000, 1e-2)
        assert abs(ks_critical(10_000, 1e-2) - 1.6276 / 100) < 1e-3

    def test_lattice_statistic_removes_discretization(self):
        g = stream(7).generator
        n, reps = 400, 50_000
        x = (g.binomial(n, 0.5, size=reps) - n / 2) / math.sqrt(n / 4)
        raw = ks_statistic(x, sps.norm.cdf)
        lat = ks_statistic_lattice(x, sps.norm.cdf, 1.0 / math.sqrt(n / 4))
        assert lat < ks_critical(reps, 1e-3) < raw


class TestIndependence:
    def test_independent_gammas(self):
        g = stream(8).generator
        n = 100_000
        x = g.gamma(2.0, size=n)
        y = g.gamma(3.0, size=n)
        rep = independence_suite(x, y, stream(9), r_bound=4 / math.sqrt(n))
        assert rep.passed

    def test_perfect_correlation(self):
        x = stream(10).generator.gamma(2.0, size=1000)
        rep = independence_suite(x, x, stream(11))
        assert not rep.passed
        assert rep.detail["r_raw"] == pytest.approx(1.0)

    def test_lognormal_control_detected(self):
        ref = lognormal_shuffle_log_covariance(1.0)
        n = 100_000
        g = stream(12).generator
        x = g.lognormal(size=(n, 2))
        y = g.lognormal(size=(n, 2))
        s = x[:, 0] + y[:, 0]
        a1 = (x[:, 0] / s) * (x[:, 1] + y[:, 1])
        b1 = (y[:, 0] / s) * (x[:, 1] + y[:, 1])
        r = pearson_r(np.log(a1), np.log(b1))
        se = (1 - ref["pearson_log"] ** 2) / math.sqrt(n)
        assert abs(r) > ref["pearson_log"] - 3 * se


class TestScaling:
    def test_exact_power_law(self):
        g = stream(13).generator
        series = [(n, g.normal(0.0, n ** (2 / 3), size=4000))
                  for n in (64, 128, 256, 512)]
        fit = scaling_exponent(series, stream(14))
        assert abs(fit["slope"] - 2 / 3) < 0.02
        lo, hi = fit["ci"]
        assert lo < 2 / 3 < hi

    def test_constant_spread(self):
        g = stream(15).generator
        series = [(n, g.normal(0.0, 3.0, size=4000)) for n in (64, 128, 256, 512)]
        fit = scaling_exponent(series)
        assert abs(fit["slope"]) < 0.02

    def test_degenerate_input(self):
        with pytest.raises(ValueError):
            scaling_exponent([(64, [1.0, 2.0])])


def test_report_serialization():
    rep = TestReport("t", 0.5, 1.0, True, sample_sizes=(10,), seeds=(1, 2),
                     detail={"x": 1.0})
    import json
    d = json.loads(rep.to_json())
    assert d["test_id"] == "t" and d["passed"] is True
    assert d["seeds"] == [1, 2]


def test_reports_reproducible_from_seeds():
    from aztec_gamma.suites import shuffle_suite
    a = shuffle_suite(7, sizes=(2,), envs=1, replicas=2000)
    b = shuffle_suite(7, sizes=(2,), envs=1, replicas=2000)
    assert a[0].to_json() == b[0].to_json()
