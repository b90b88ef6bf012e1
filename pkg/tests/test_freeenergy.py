import math

import numpy as np
import pytest

from aztec_gamma.freeenergy import free_energy_formulas, free_energy_mc
from aztec_gamma.params import ParamSet
from aztec_gamma.randvars import polygamma
from aztec_gamma.rng import RngStream


def homogeneous(n, a=0.5, b=0.5):
    return ParamSet.biased(a, b, n)


class TestFormulas:
    def test_homogeneous_mean_n2(self):
        rep = free_energy_formulas(homogeneous(2), 2, 1.0)
        assert rep.mean == pytest.approx(3 * polygamma(0, 1.0))
        # three terms of -EulerGamma (value frozen from the mpmath oracle)
        assert rep.mean == pytest.approx(-1.7316469947, abs=1e-9)

    def test_term_count(self):
        n = 7
        rep = free_energy_formulas(homogeneous(n), n, 1.0)
        assert rep.annealed == pytest.approx(0.0, abs=1e-12)   # log 1 terms
        assert rep.variance == pytest.approx(n * (n + 1) / 2 * polygamma(1, 1.0))

    def test_gap_bounds_random_sets(self):
        g = RngStream(31).generator
        for _ in range(20):
            n = int(g.integers(2, 7))
            psi = (0.2 + g.random(n + 1)).tolist()
            phi = (0.3 + g.random(n + 1)).tolist()
            theta = [0.0] * n
            ps = ParamSet(psi=psi, phi=phi, theta=theta, phi_min_index=-n)
            for T in (0.05, 1.0, 20.0):
                rep = free_energy_formulas(ps, n, T)
                assert rep.gap_lower < rep.gap < rep.gap_upper

    def test_large_n_limit(self):
        # finite-size deviation is T log(T(a+b)) / (2n); the 2/n envelope
        # holds whenever that prefactor stays below 2
        ab = 1.3
        for n in (20, 40, 80):
            ps = ParamSet.biased(ab / 2, ab / 2, n)
            for T in (0.5, 1.0, 2.0):
                rep = free_energy_formulas(ps, n, T)
                lim = 0.5 * T * math.log(T * ab)
                assert abs(rep.annealed / n**2 - lim) < 2 / n

    def test_deterministic(self):
        r1 = free_energy_formulas(homogeneous(5), 5, 0.7)
        r2 = free_energy_formulas(homogeneous(5), 5, 0.7)
        assert r1.to_json() == r2.to_json()

    def test_variance_normalizations_recorded(self):
        rep = free_energy_formulas(homogeneous(20), 20, 1.0)
        # the two normalizations in circulation differ by a fixed factor 4
        assert rep.variance_alt / rep.variance == pytest.approx(4.0)


class TestMonteCarlo:
    def test_small_run_matches_formulas(self):
        n, reps = 6, 4000
        rep = free_energy_mc(homogeneous(n, 0.7, 0.9), n, 1.0, reps, RngStream(32))
        se = math.sqrt(rep.variance / reps)
        assert abs(rep.empirical_mean - rep.mean) < 4 * se
        assert abs(rep.empirical_var - rep.variance) < 0.15 * rep.variance

    def test_extreme_temperatures_finite(self):
        n, reps = 8, 500
        for T in (0.01, 100.0):
            rep = free_energy_mc(homogeneous(n), n, T, reps, RngStream(33))
            assert np.isfinite(rep.empirical_mean)
            assert np.isfinite(rep.empirical_var)

    def test_report_roundtrip(self):
        rep = free_energy_mc(homogeneous(4), 4, 1.0, 200, RngStream(34))
        import json
        d = json.loads(rep.to_json())
        assert d["replicas"] == 200
        assert "gap" in d
