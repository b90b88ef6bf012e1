import numpy as np
import pytest

from aztec_gamma import oracle
from aztec_gamma.matching import (DL, DR, UL, UR, InvalidMatchingError, Matching,
                                  _column_slice, horizontal_slice, matching_weight,
                                  turning_points, turning_points_batch, validate,
                                  vertical_slice, log_weights_batch)
from aztec_gamma.params import ParamSet
from aztec_gamma.rng import RngStream
from aztec_gamma.shuffling import sample_matchings_batch
from aztec_gamma.weights import WeightField, sample_weight_field


def example_matching():
    # the running 3x3 example: columns left to right, labels top to bottom
    return Matching(3, np.array([
        [DL, DR, UL, UL],
        [DL, UR, DL, UR],
        [DR, DL, UR, UR]], dtype=np.int8))


def order1(kind):
    if kind == "a":     # a-edge plus its up-right companion
        return Matching(1, np.array([[DL, UR]], dtype=np.int8))
    return Matching(1, np.array([[DR, UL]], dtype=np.int8))


class TestValidate:
    def test_example_valid(self):
        assert validate(example_matching())

    def test_all_a_edges_invalid(self):
        m = Matching(2, np.array([[DL, DL, DL], [DL, DL, DL]], dtype=np.int8))
        assert not validate(m)

    def test_double_cover_invalid(self):
        m = example_matching()
        m.dir[1, 1] = DL   # two whites now claim the same black
        assert not validate(m)

    def test_boundary_rows(self):
        m = example_matching()
        m.dir[0, 0] = UL
        assert not validate(m)


class TestMatchingWeight:
    def test_example_weight(self):
        g = RngStream(1).generator
        w = WeightField(3, g.gamma(1.0, size=(3, 3)), g.gamma(1.0, size=(3, 3)))
        got = matching_weight(example_matching(), w)
        expect = np.log(w.a[0, 0] * w.a[1, 0] * w.a[1, 2] * w.a[2, 1]
                        * w.b[0, 1] * w.b[0, 2])
        assert got == pytest.approx(expect, rel=1e-12)

    def test_unit_weights_zero(self):
        w = WeightField.constant(3, 1.0, 1.0)
        assert matching_weight(example_matching(), w) == 0.0

    def test_order1(self):
        w = WeightField(1, np.array([[2.5]]), np.array([[4.0]]))
        assert matching_weight(order1("a"), w) == pytest.approx(np.log(2.5))
        assert matching_weight(order1("b"), w) == pytest.approx(np.log(4.0))

    def test_batch_matches_single(self):
        g = RngStream(2).generator
        w = WeightField(3, g.gamma(1.0, size=(3, 3)), g.gamma(1.0, size=(3, 3)))
        m = example_matching()
        batch = log_weights_batch(m.dir[None], w.a, w.b)
        assert batch[0] == pytest.approx(matching_weight(m, w))

    def test_invalid_rejected(self):
        w = WeightField.constant(2, 1.0, 1.0)
        m = Matching(2, np.array([[DL, DL, DL], [DL, DL, DL]], dtype=np.int8))
        with pytest.raises(InvalidMatchingError):
            matching_weight(m, w)


class TestTurningPoints:
    def test_example(self):
        assert turning_points(example_matching()) == (2, 1, 1, 1)

    def test_order1(self):
        assert turning_points(order1("a")) == (1, 0, 0, 1)
        assert turning_points(order1("b")) == (0, 1, 1, 0)

    def test_batch(self):
        m = example_matching()
        assert tuple(turning_points_batch(m.dir[None])[0]) == (2, 1, 1, 1)


class TestSlices:
    def test_example_vertical(self):
        m = example_matching()
        assert vertical_slice(m, 1) == frozenset({1, 3, 4})
        assert vertical_slice(m, 3) == frozenset({2})

    def test_example_horizontal(self):
        m = example_matching()
        assert horizontal_slice(m, 1) == frozenset({1, 2, 4})

    def test_seven_column_example(self):
        # column read off a larger reference picture: labels 2,4,5,6,8 point left
        col = np.array([DR, DL, DR, UL, UL, UL, UR, UL], dtype=np.int8)
        assert _column_slice(col) == frozenset({2, 4, 5, 6, 8})

    def test_range_checks(self):
        m = example_matching()
        with pytest.raises(ValueError):
            vertical_slice(m, 0)
        with pytest.raises(ValueError):
            horizontal_slice(m, 4)

    def test_exhaustive_identities_small(self):
        # |X_l| = n-l+1, |Y_l| = n-l+1, and the boundary identities
        # X_1 = [n+1] minus {west+1}, X_n = {east+1}, over all matchings
        for n in (1, 2, 3, 4):
            f = WeightField.constant(n, 1.0, 1.0)
            meas = oracle.enumerate_matchings(oracle.aztec_graph(f))
            for idx in range(len(meas.matchings)):
                m = oracle.pairs_to_matching(n, meas.pairs(idx))
                assert validate(m)
                tp = turning_points(m)
                for l in range(1, n + 1):
                    assert len(vertical_slice(m, l)) == n - l + 1
                    assert len(horizontal_slice(m, l)) == n - l + 1
                assert vertical_slice(m, 1) == frozenset(
                    set(range(1, n + 2)) - {tp[3] + 1})
                assert vertical_slice(m, n) == frozenset({tp[1] + 1})

    def test_sampled_identities_n50(self):
        n, reps = 50, 10_000
        rng = RngStream(3)
        params = ParamSet.biased(0.4, 0.5, n)
        f = sample_weight_field(params, n, rng)
        grids = sample_matchings_batch(f.a, f.b, rng, replicas=reps)
        tps = turning_points_batch(grids)
        # column 1 leftward labels miss exactly west+1; column n keeps east+1
        col1 = grids[:, 0, :]
        left1 = (col1 == DL) | (col1 == UL)
        assert np.all(left1.sum(axis=1) == n)
        miss = np.argmin(left1, axis=1) + 1
        assert np.array_equal(miss, tps[:, 3] + 1)
        coln = grids[:, n - 1, :]
        leftn = (coln == DL) | (coln == UL)
        assert np.all(leftn.sum(axis=1) == 1)
        keep = np.argmax(leftn, axis=1) + 1
        assert np.array_equal(keep, tps[:, 1] + 1)


class TestSerialization:
    def test_text_round_trip(self):
        m = example_matching()
        assert np.array_equal(Matching.from_text(m.to_text()).dir, m.dir)

    def test_json_round_trip(self):
        m = example_matching()
        assert np.array_equal(Matching.from_json(m.to_json()).dir, m.dir)

    def test_header_required(self):
        with pytest.raises(InvalidMatchingError):
            Matching.from_text("LU\nLU\n")

    def test_letters(self):
        text = example_matching().to_text()
        assert text.splitlines()[0] == "aztec n=3"
        assert set("".join(text.splitlines()[1:])) <= set("LURD")
