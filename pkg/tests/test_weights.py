import math

import numpy as np
import pytest
import scipy.stats as sps
from hypothesis import given, settings, strategies as st

from aztec_gamma.fock import FaceWeightGrid, fock_face_weights, limit_face_weights
from aztec_gamma.params import AdmissibilityError, ParamSet
from aztec_gamma.rng import RngStream
from aztec_gamma.stats import ks_statistic, pearson_r
from aztec_gamma.weights import (WeightField, b_column_zero, cascade, downshuffle,
                                 downshuffle_arrays, hswap_update, partition_product,
                                 partition_product_batch, partition_product_batch_log,
                                 iter_levels_ascending, sample_weight_field,
                                 upshuffle_arrays, vswap_update)


def stream(tag=0):
    return RngStream(314159, tag)


class TestParamSet:
    def test_biased_admissible(self):
        ps = ParamSet.biased(0.2, 0.25, 6)
        ps.validate(6)

    def test_min_shape_enforced(self):
        ps = ParamSet(psi=[0.02] * 3, phi=[0.5] * 4, theta=[0.0] * 3,
                      phi_min_index=-3)
        with pytest.raises(AdmissibilityError):
            ps.validate(3)

    def test_window_errors(self):
        ps = ParamSet.biased(0.5, 0.5, 3)
        with pytest.raises(AdmissibilityError):
            ps.psi_at(9)
        with pytest.raises(AdmissibilityError):
            ps.phi_at(1)

    def test_json_round_trip(self):
        ps = ParamSet(psi=[0.5, 0.6], phi=[0.7, 0.8, 0.9], theta=[0.0, 0.1],
                      s=[1.0, 2.0], phi_min_index=-2)
        ps2 = ParamSet.from_json(ps.to_json())
        assert ps2.psi == ps.psi and ps2.phi == ps.phi
        assert ps2.theta == ps.theta and ps2.s == ps.s
        assert ps2.phi_min_index == -2

    def test_reparametrized_shapes_coincide(self):
        # shifting theta by c and psi/phi oppositely keeps all shapes
        n, c = 3, 0.07
        base = ParamSet(psi=[0.5, 0.6, 0.7], phi=[0.8, 0.9, 1.0, 1.1],
                        theta=[0.0, 0.05, -0.05], phi_min_index=-3)
        shifted = ParamSet(psi=[p - c for p in base.psi],
                           phi=[p + c for p in base.phi],
                           theta=[t + c for t in base.theta], phi_min_index=-3)
        assert np.allclose(base.a_shape_grid(n), shifted.a_shape_grid(n))
        assert np.allclose(base.b_shape_grid(n), shifted.b_shape_grid(n))


class TestWeightField:
    def test_sampled_marginals(self):
        n, reps = 2, 60_000
        ps = ParamSet.biased(0.2, 0.25, n)
        f = sample_weight_field(ps, n, stream(1), replicas=reps)
        crit = 1.95 / math.sqrt(reps)
        for i in range(n):
            for j in range(n):
                assert ks_statistic(f.a[:, i, j], sps.gamma(0.2).cdf) < crit
                assert ks_statistic(f.b[:, i, j], sps.gamma(0.25).cdf) < crit

    def test_sum_mean_n1(self):
        reps = 10**6
        ps = ParamSet(psi=[1.0], phi=[1.0], theta=[0.0], phi_min_index=0)
        f = sample_weight_field(ps, 1, stream(2), replicas=reps)
        tot = f.a[:, 0, 0] + f.b[:, 0, 0]
        assert abs(tot.mean() - 2.0) < 4 * math.sqrt(2.0 / reps)

    def test_positivity_required(self):
        with pytest.raises(ValueError):
            WeightField(1, np.array([[0.0]]), np.array([[1.0]]))

    def test_json_round_trip(self):
        f = WeightField(2, np.array([[1., 2.], [3., 4.]]),
                        np.array([[5., 6.], [7., 8.]]))
        f2 = WeightField.from_json(f.to_json())
        assert np.array_equal(f.a, f2.a) and np.array_equal(f.b, f2.b)
        assert f2.level == 2


class TestShuffleRecursions:
    def test_downshuffle_worked_example(self):
        w = WeightField(2, np.array([[1., 1.], [2., 1.]]),
                        np.array([[1., 3.], [2., 1.]]))
        d = downshuffle(w)
        assert d.a[0, 0] == pytest.approx(2.0, abs=1e-15)
        assert d.b[0, 0] == pytest.approx(1.5, abs=1e-15)

    def test_constant_fixed_point(self):
        w = WeightField.constant(4, 0.7, 1.3)
        d = downshuffle(w)
        assert np.allclose(d.a, 0.7) and np.allclose(d.b, 1.3)
        ua, ub = upshuffle_arrays(w.a, w.b)
        assert np.allclose(ua, 0.7) and np.allclose(ub, 1.3)

    @given(st.integers(2, 5), st.integers(0, 2**32 - 1))
    @settings(max_examples=60, deadline=None)
    def test_up_then_down_identity(self, n, seed):
        g = np.random.default_rng(seed)
        a = g.gamma(1.0, size=(n, n + 1)) + 1e-3
        b = g.gamma(1.0, size=(n, n + 1)) + 1e-3
        ua, ub = upshuffle_arrays(a, b)
        da, db = downshuffle_arrays(ua, ub)
        assert np.allclose(da, a[1:-1, 1:-1], rtol=1e-12)
        assert np.allclose(db, b[1:-1, 1:-1], rtol=1e-12)

    def test_down_then_up_identity(self):
        # the upward recursion applied to a downshuffled grid recovers the
        # original entries on the common interior window
        g = stream(3).generator
        n = 6
        a = g.gamma(1.0, size=(n, n))
        b = g.gamma(1.0, size=(n, n))
        da, db = downshuffle_arrays(a, b)
        ua, ub = upshuffle_arrays(da, db)
        assert np.allclose(ua, a[1:n - 1, 1:n - 1], rtol=1e-12)
        assert np.allclose(ub, b[1:n - 1, 1:n - 1], rtol=1e-12)

    def test_cascade_shapes(self):
        f = WeightField.constant(4, 1.0, 2.0)
        fields = cascade(f)
        assert [x.level for x in fields] == [4, 3, 2, 1]
        assert fields[-1].a.shape == (1, 1)
        f1 = WeightField.constant(1, 1.0, 2.0)
        assert [x.level for x in cascade(f1)] == [1]

    def test_iter_levels_matches_cascade(self):
        ps = ParamSet.biased(0.7, 0.9, 9)
        f = sample_weight_field(ps, 9, stream(4))
        fields = cascade(f)
        for block in (1, 2, 3):
            seen = dict(iter_levels_ascending(f, block=block))
            assert sorted(seen) == list(range(1, 10))
            for lev, (a, b) in seen.items():
                assert np.allclose(a, fields[9 - lev].a)
                assert np.allclose(b, fields[9 - lev].b)


class TestPartitionProduct:
    def test_order_one(self):
        f = WeightField.constant(1, 1.0, 1.0)
        assert partition_product(cascade(f)) == pytest.approx(math.log(2.0))

    def test_unit_weights_n2(self):
        f = WeightField.constant(2, 1.0, 1.0)
        assert partition_product(cascade(f)) == pytest.approx(3 * math.log(2.0))

    def test_batch_matches_single(self):
        g = stream(5).generator
        a = g.gamma(1.0, size=(7, 3, 3))
        b = g.gamma(1.0, size=(7, 3, 3))
        batch = partition_product_batch(a, b)
        batch_log = partition_product_batch_log(np.log(a), np.log(b))
        for r in range(7):
            single = partition_product(cascade(WeightField(3, a[r], b[r])))
            assert batch[r] == pytest.approx(single, rel=1e-12)
            assert batch_log[r] == pytest.approx(single, rel=1e-10)


class TestColumnSwapMaps:
    def test_vswap_symmetric_example(self):
        gh, bh = vswap_update(np.array([0.5, 0.5]), np.array([1.0, 1.0]))
        assert gh[0] == pytest.approx(1.0) and bh[0] == pytest.approx(0.5)

    def test_vswap_worked_example(self):
        gh, bh = vswap_update(np.array([0.25, 0.5]), np.array([2.0, 4.0]))
        assert gh[0] == pytest.approx(2.5) and bh[0] == pytest.approx(0.2)

    def test_vswap_empty(self):
        gh, bh = vswap_update(np.array([0.5]), np.array([1.0]))
        assert gh.size == 0 and bh.size == 0

    def test_vswap_conservation(self):
        g = stream(6).generator
        for _ in range(50):
            m = int(g.integers(2, 8))
            beta = g.uniform(0.05, 0.95, size=m)
            gamma = g.gamma(2.0, size=m) + 0.01
            gh, _ = vswap_update(beta, gamma)
            lhs = gh.sum()
            rhs = gamma.sum() - (1 - beta[0]) * gamma[0] - beta[-1] * gamma[-1]
            assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_vswap_distributional(self):
        n = 10**5
        rng = stream(7)
        g = rng.generator
        xs = np.array([0.7, 1.1, 0.9])
        ys = np.array([1.3, 0.8, 1.2])
        gamma = g.gamma(xs + ys, size=(n, 3))
        beta = g.beta(xs, ys, size=(n, 3))
        num = beta[:, :-1] * gamma[:, :-1]
        gh = num + (1 - beta[:, 1:]) * gamma[:, 1:]
        bh = num / gh
        crit = 1.95 / math.sqrt(n)
        for j in range(2):
            assert ks_statistic(gh[:, j], sps.gamma(xs[j] + ys[j + 1]).cdf) < crit
            assert ks_statistic(bh[:, j], sps.beta(xs[j], ys[j + 1]).cdf) < crit
        for u, v in [(gh[:, 0], gh[:, 1]), (gh[:, 0], bh[:, 1]),
                     (bh[:, 0], bh[:, 1]), (bh[:, 0], gh[:, 1])]:
            assert abs(pearson_r(u, v)) < 5 / math.sqrt(n)

    def test_hswap_symmetric_example(self):
        ah, bh = hswap_update(np.array([1.0, 1.0]), np.array([1.0, 1.0]))
        assert ah[0] == pytest.approx(1.0) and bh[0] == pytest.approx(1.0)

    def test_hswap_worked_example(self):
        # a = (2, 1), b = (2, 3): a' = (2/4)*4 = 2, b' = (2/4)*4 = 2
        ah, bh = hswap_update(np.array([2.0, 1.0]), np.array([2.0, 3.0]))
        assert ah[0] == pytest.approx(2.0) and bh[0] == pytest.approx(2.0)

    def test_hswap_distributional(self):
        # one-column restriction of the downward recursion keeps the
        # Gamma marginals with the row-shifted shape parameters
        n = 10**5
        g = stream(8).generator
        psi, phi = 0.9, 1.2
        th = np.array([0.1, -0.2, 0.05])
        a = g.gamma(psi + th, size=(n, 3))
        b = g.gamma(phi - th, size=(n, 3))
        ah, bh = hswap_update(a.T, b.T)
        ah, bh = ah.T, bh.T
        crit = 1.95 / math.sqrt(n)
        for i in range(2):
            assert ks_statistic(ah[:, i], sps.gamma(psi + th[i]).cdf) < crit
            assert ks_statistic(bh[:, i], sps.gamma(phi - th[i]).cdf) < crit
        assert abs(pearson_r(ah[:, 0], bh[:, 0])) < 5 / math.sqrt(n)

    def test_b_column_zero(self):
        g = stream(9).generator
        a = g.gamma(1.0, size=(3, 3))
        b = g.gamma(1.0, size=(3, 3))
        b0 = b_column_zero(a, b)
        tot = a[:, 0] + b[:, 0]
        expect = b[:-1, 0] / tot[:-1] * tot[1:]
        assert np.allclose(b0, expect)


class TestFockWeights:
    def make_params(self, n):
        return ParamSet(psi=[1.0] * (n + 1), phi=[2.0] * (n + 1),
                        theta=[0.0] * n, phi_min_index=-n)

    def test_limit_even_face(self):
        ps = self.make_params(3)
        lim = limit_face_weights(ps, 3)
        assert np.allclose(lim.even, 0.5)

    def test_large_delta_close_to_limit(self):
        ps = self.make_params(3)
        fw = fock_face_weights(ps, 3, 1e6)
        assert np.abs(fw.even - 0.5).max() < 1e-5 * 0.5

    def test_convergence_rate(self):
        ps = self.make_params(4)
        lim = limit_face_weights(ps, 4)
        for base in (1e2, 1e3, 1e4):
            e1 = np.abs(fock_face_weights(ps, 4, base).even - lim.even).max()
            e2 = np.abs(fock_face_weights(ps, 4, 2 * base).even - lim.even).max()
            assert 0.4 <= e2 / e1 <= 0.6

    def test_ordering_violation(self):
        ps = self.make_params(3)
        with pytest.raises(ValueError):
            fock_face_weights(ps, 3, 1.5)   # delta below max phi

    def test_positive(self):
        with pytest.raises(ValueError):
            FaceWeightGrid(np.array([[1.0, -1.0]]), np.zeros((0, 0)))
