import math
from collections import Counter

import numpy as np
import pytest
import scipy.stats as sps

from aztec_gamma import oracle
from aztec_gamma.matching import turning_points
from aztec_gamma.params import ParamSet
from aztec_gamma.polymers import (CrossingStats, PathTuple, bg_polymer_exact,
                                  beta_rwre, beta_rwre_endpoints_batch,
                                  burke_ratios, crossings, edge_gamma_polymer,
                                  edge_gamma_sample_endpoints,
                                  edge_gamma_weights_from_cascade, enumerate_path_tuples,
                                  glg_polymer_exact, hybrid_vertices, quenched_path_law,
                                  random_upright_path, sample_path_backward,
                                  stat_loggamma, stat_strictweak,
                                  stationarity_restriction_check, x_mid_of_path,
                                  xmid_batch)
from aztec_gamma.rng import RngStream
from aztec_gamma.stats import ks_statistic, tv_distance
from aztec_gamma.weights import cascade, sample_weight_field


def stream(tag=0):
    return RngStream(2718, tag)


def reference_tuple_5_3():
    """The five-path configuration of the worked 7x7 slice example."""
    paths = (
        ((-3, -1), (-2, -1), (-1, -2), (0, -2), (1, -2), (2, -2), (3, -2),
         (3, -3), (4, -3), (4, -4)),
        ((-3, -2), (-2, -2), (-1, -3), (0, -4), (1, -4), (2, -4), (3, -4),
         (3, -5)),
        ((-3, -3), (-2, -4), (-1, -4), (0, -5), (1, -5), (2, -5), (2, -6)),
        ((-3, -4), (-2, -5), (-1, -5), (0, -6), (0, -7), (1, -7)),
        ((-3, -5), (-2, -6), (-1, -7), (0, -8)),
    )
    return PathTuple(5, 3, paths)


class TestPathTuple:
    def test_example_records(self):
        t = reference_tuple_5_3()
        assert t.pi_record(0) == (1, 2, 3, 4, 5)
        assert t.pi_record(1) == (1, 2, 4, 5, 6)
        assert t.pi_record(2) == (2, 3, 4, 5, 7)
        assert t.pi_record(3) == (2, 4, 5, 6, 8)
        assert t.x_poly() == frozenset({2, 4, 5, 6, 8})

    def test_intersection_rejected(self):
        paths = (((-1, -1), (0, -1), (0, -2)),
                 ((-1, -2), (0, -2), (0, -3)))
        with pytest.raises(ValueError):
            PathTuple(2, 1, paths)

    def test_endpoint_check(self):
        with pytest.raises(ValueError):
            PathTuple(1, 1, (((-1, -1), (0, -1)),))

    def test_steps_round_trip(self):
        t = reference_tuple_5_3()
        assert t.steps()[0] == "RERRRRDRD"


class TestEnumeration:
    def test_tuple_counts_match_swap_graph(self):
        # nonintersecting tuples biject with trimmed swap-graph matchings
        n = 3
        params = ParamSet.biased(0.9, 1.1, n)
        f = sample_weight_field(params, n, stream(1))
        fields = cascade(f)
        for l in (1, 2, 3):
            cg = oracle.build_vswap(fields, l, trimmed=True)
            count = len(oracle.enumerate_matchings(cg.graph).matchings)
            assert count == len(enumerate_path_tuples(n - l + 1, l))

    def test_guard(self):
        with pytest.raises(ValueError):
            enumerate_path_tuples(5, 2)

    def test_vertex_set_corners(self):
        verts = hybrid_vertices(1, 1)
        assert verts == {(-1, -1), (0, -1), (0, -2)}


class TestBranchMergeMeasure:
    def test_two_route_probability(self):
        beta = {(-1, -1): 0.3}
        gamma = {}
        pm = bg_polymer_exact(1, 1, beta, gamma)
        law = pm.x_poly_law()
        assert law[frozenset({1})] == pytest.approx(0.3)
        assert law[frozenset({2})] == pytest.approx(0.7)

    def test_normalization(self):
        n, l = 3, 2
        params = ParamSet.biased(1.0, 0.8, n)
        fields = cascade(sample_weight_field(params, n, stream(2)))
        bw, gw = bg_weights_from_cascade_caller(fields, n, l)
        pm = bg_polymer_exact(n - l + 1, l, bw, gw)
        assert pm.probs.sum() == pytest.approx(1.0, abs=1e-12)

    def test_merge_branch_two_route(self):
        rho = {(-1, -1): 2.0}
        kappa = {(0, -1): 0.25, (0, -2): 8.0}
        pm = glg_polymer_exact(1, 1, rho, kappa)
        law = pm.x_poly_law()
        # routes: rho * kappa(0,-1) = 0.5 against the weight-1 diagonal
        assert law[frozenset({1})] == pytest.approx(0.5 / 1.5)
        assert law[frozenset({2})] == pytest.approx(1.0 / 1.5)


def bg_weights_from_cascade_caller(fields, n, l):
    from aztec_gamma.polymers import bg_weights_from_cascade
    return bg_weights_from_cascade(fields, n, l)


class TestBetaWalk:
    def test_forced_environment(self):
        params = ParamSet.biased(1.0, 1.0, 8, extra=8)
        xs = beta_rwre(params, 8, stream(3), env=lambda y, t: 1.0)
        assert np.all(xs == -1)

    def test_one_step_annealed_law(self):
        params = ParamSet.biased(0.2, 0.25, 4, extra=8)
        n = 40_000
        stays = 0
        rng = stream(4)
        for _ in range(n):
            xs = beta_rwre(params, 1, rng)
            stays += int(xs[1] == -1)
        p = 0.2 / 0.45
        assert abs(stays / n - p) < 4 * math.sqrt(p * (1 - p) / n)

    def test_range_invariants(self):
        params = ParamSet.biased(0.7, 0.8, 16, extra=20)
        xs = beta_rwre(params, 16, stream(5))
        steps = np.diff(xs)
        assert set(steps.tolist()) <= {0, -1}
        assert np.all(xs <= -1) and np.all(xs >= -np.arange(17) - 1)

    def test_batch_normality(self):
        n, reps = 2000, 40_000
        ends = beta_rwre_endpoints_batch(1.0, 1.0, n, stream(6), reps) - 1.0
        z = (ends - n / 2) / math.sqrt(n * 0.25)
        assert abs(z.mean()) < 4 / math.sqrt(reps)
        assert abs(z.var() - 1.0) < 0.05


class TestStationaryEnvs:
    def test_lg_z11(self):
        env = stat_loggamma(1, 1, 1.0, 1.2, stream(7))
        y = np.exp(env.log_y)
        assert np.exp(env.log_z[1, 1]) == pytest.approx(y[1, 1] * (y[1, 0] + y[0, 1]))

    def test_lg_boundary_row(self):
        env = stat_loggamma(3, 3, 1.0, 1.2, stream(8))
        assert env.log_z[3, 0] == pytest.approx(env.log_y[1:, 0].sum())

    def test_sw_z11(self):
        env = stat_strictweak(1, 1, 1.0, 1.2, stream(9))
        z11 = np.exp(env.log_z[1, 1])
        expect = math.exp(env.log_y[0, 1] + env.log_r[0]) + math.exp(env.log_y[0, 0])
        assert z11 == pytest.approx(expect)

    def test_dp_consistency_spot_checks(self):
        g = stream(10)
        for kind, maker in (("inv-gamma", stat_loggamma),
                            ("strict-weak", stat_strictweak)):
            env = maker(12, 12, 0.8, 1.1, g)
            rnd = g.generator
            for _ in range(100):
                i = int(rnd.integers(1, 13))
                j = int(rnd.integers(1, 13))
                assert env.log_z[i, j] == pytest.approx(
                    float(env.check_cell(i, j)), rel=1e-12)

    def test_burke_laws(self):
        reps = 50_000
        env = stat_loggamma(2, 2, 0.9, 0.7, stream(11), replicas=(reps,))
        u, v = burke_ratios(env, 2, 2)
        crit = 1.95 / math.sqrt(reps)
        assert ks_statistic(u, sps.invgamma(0.7).cdf) < crit
        assert ks_statistic(v, sps.invgamma(0.9).cdf) < crit
        env2 = stat_strictweak(2, 2, 0.9, 0.7, stream(12), replicas=(reps,))
        u2, v2 = burke_ratios(env2, 2, 2)
        assert ks_statistic(u2, sps.gamma(1.6).cdf) < crit
        assert ks_statistic(v2, lambda t: sps.beta(0.7, 0.9).sf(1.0 / t)) < crit

    def test_sw_antidiagonal_ratio(self):
        reps = 50_000
        env = stat_strictweak(2, 2, 0.9, 0.7, stream(13), replicas=(reps,))
        v = np.exp(env.log_z[:, 1, 1] - env.log_z[:, 1, 0])
        u = np.exp(env.log_z[:, 1, 1] - env.log_z[:, 0, 1])
        assert ks_statistic(v / u, sps.invgamma(0.7).cdf) < 1.95 / math.sqrt(reps)


class TestBackwardSampler:
    def test_order1_quenched(self):
        env = stat_loggamma(1, 1, 1.0, 1.0, stream(14))
        p10 = math.exp(env.log_y[1, 0]) / (math.exp(env.log_y[1, 0])
                                           + math.exp(env.log_y[0, 1]))
        rng = stream(15)
        hits = 0
        n = 20_000
        for _ in range(n):
            pts = sample_path_backward(env, rng)
            hits += int(x_mid_of_path(pts, 1) == 1)
        assert abs(hits / n - p10) < 4 * math.sqrt(p10 * (1 - p10) / n + 1e-9)

    @pytest.mark.parametrize("maker", [stat_loggamma, stat_strictweak])
    def test_matches_enumerated_law(self, maker):
        env = maker(2, 2, 0.9, 1.1, stream(16))
        law = quenched_path_law(env)
        rng = stream(17)
        n = 40_000
        cnt = Counter()
        for _ in range(n):
            pts = sample_path_backward(env, rng)
            cnt["".join("R" if b[0] > a[0] else "U"
                        for a, b in zip(pts, pts[1:]))] += 1
        tv = 0.5 * sum(abs(cnt.get(k, 0) / n - p) for k, p in law.items())
        assert tv < 0.02

    def test_symmetric_midpoint(self):
        # alpha = beta makes x_mid and n - x_mid exchangeable
        n, reps = 6, 30_000
        xm = xmid_batch("inv-gamma", n, 1.0, 1.0, stream(18), reps)
        c1 = Counter(xm.tolist())
        c2 = Counter((n - xm).tolist())
        assert tv_distance(dict(c1), dict(c2)) < 0.02


class TestDualPolymer:
    def test_order1_odds(self):
        gamma = {}
        a, b = [2.0], [0.5]
        em = edge_gamma_polymer(1, gamma, a, b)
        law = em.endpoint_law()
        # endpoint -1 (one up step) carries the a/b boundary odds
        assert law[-2] / law[-1] == pytest.approx(4.0)

    def test_exact_complementation(self):
        n = 3
        params = ParamSet.biased(0.9, 0.7, n)
        f = sample_weight_field(params, n, stream(19))
        fields = cascade(f)
        meas = oracle.enumerate_matchings(oracle.aztec_graph(f))
        law_west = meas.pushforward(
            lambda pairs: turning_points(oracle.pairs_to_matching(n, pairs))[3])
        gw, ab, bb = edge_gamma_weights_from_cascade(fields, n)
        em = edge_gamma_polymer(n, gw, ab, bb)
        law_y = {}
        for idx, p in enumerate(em.probs):
            lbl = -em.endpoint_y(idx) - 1
            law_y[lbl] = law_y.get(lbl, 0.0) + float(p)
        tv = 0.5 * sum(abs(law_west.get(k, 0) - law_y.get(k, 0))
                       for k in set(law_west) | set(law_y))
        assert tv < 1e-10

    def test_annealed_matches_midpoint(self):
        n, reps = 3, 20_000
        params = ParamSet.biased(0.8, 0.9, n, extra=n)
        labels = edge_gamma_sample_endpoints(n, params, stream(20), reps)
        xm = xmid_batch("inv-gamma", n, 0.8, 0.9, stream(21), reps)
        tv = tv_distance(dict(Counter(labels.tolist())),
                         dict(Counter(xm.tolist())))
        assert tv < 0.03

    def test_guard(self):
        with pytest.raises(ValueError):
            edge_gamma_polymer(9, {}, [1.0] * 9, [1.0] * 9)


class TestCrossings:
    def test_staircase(self):
        # the alternating staircase enters the line y = l at x = l and
        # leaves one step later
        pts = [(0, 0), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3)]
        for ell in (1, 2):
            cs = crossings(pts, 3, ell, ell)
            assert cs.v0 == ell and cs.v1 == ell + 1
            assert cs.w0 == ell - 1 and cs.w1 == ell

    def test_ordering_invariant(self):
        with pytest.raises(ValueError):
            CrossingStats(1, 3, 2, 0, 0)

    def test_bracket_lemma_random_paths(self):
        # midpoint deviation is bracketed by the horizontal-line excursion
        rng = stream(22)
        n = 9
        for _ in range(2000):
            pts = random_upright_path(n, n, rng)
            xm = x_mid_of_path(pts, n)
            for ell in (2, 5, 7):
                cs = crossings(pts, n, ell, ell)
                assert abs(xm - (n - ell)) <= max(cs.v1 - (n - ell),
                                                  (n - ell) - cs.v0)

    def test_onesided_lemma_random_paths(self):
        # v1(l) >= n-l forces x_mid >= n-l; w1(k) >= n-k forces x_mid <= k
        rng = stream(23)
        n = 9
        for _ in range(2000):
            pts = random_upright_path(n, n, rng)
            xm = x_mid_of_path(pts, n)
            for ell in (2, 5, 7):
                cs = crossings(pts, n, ell, ell)
                if cs.v1 >= n - ell:
                    assert xm >= n - ell
                if cs.w1 >= n - ell:
                    assert xm <= ell

    def test_line_out_of_range(self):
        pts = [(0, 0), (0, 1), (1, 1)]
        with pytest.raises(ValueError):
            crossings(pts, 1, 9, 0)


class TestRestriction:
    def test_identical_boxes(self):
        out = stationarity_restriction_check(2, 2, 2, 2, 1.0, 1.0, 400, stream(24))
        tv = tv_distance(out["big"], out["small"])
        assert tv < 0.15

    def test_shrunken_box(self):
        out = stationarity_restriction_check(3, 3, 2, 2, 1.0, 1.0, 20_000, stream(25))
        tv = tv_distance(out["big"], out["small"])
        assert tv < 0.03

    def test_degenerate_corner(self):
        out = stationarity_restriction_check(3, 3, 1, 1, 1.0, 1.0, 2000, stream(26))
        tv = tv_distance(out["big"], out["small"])
        assert tv < 0.05

    def test_bad_box(self):
        with pytest.raises(ValueError):
            stationarity_restriction_check(2, 2, 3, 1, 1.0, 1.0, 10, stream(27))
