import pytest
from fractions import Fraction as F

from src.itm import (
    BTParams,
    BruinParams,
    FiniteType,
    IntervalSet,
    ITM,
    ParameterError,
    Unresolved,
    attractor,
    attractor_by_intersection,
    attractor_sequence,
    classify,
    evaluate,
    from_bruin,
    from_bt,
    image,
    make_itm,
)


class TestIntervalSet:
    def test_adjacent_pieces_merge(self):
        s = IntervalSet.of([(F(1, 4), F(1, 2)), (0, F(1, 4))])
        assert len(s) == 1
        assert s.measure == F(1, 2)

    def test_empty_pieces_dropped(self):
        assert IntervalSet.of([(F(1, 3), F(1, 3))]).is_empty()

    def test_intersect(self):
        a = IntervalSet.of([(0, F(1, 2)), (F(3, 4), 1)])
        b = IntervalSet.of([(F(1, 4), F(7, 8))])
        assert a.intersect(b) == IntervalSet.of([(F(1, 4), F(1, 2)), (F(3, 4), F(7, 8))])

    def test_half_open_membership(self):
        s = IntervalSet.of([(0, F(1, 2))])
        assert s.contains(0)
        assert not s.contains(F(1, 2))

    def test_subset(self):
        assert IntervalSet.of([(F(1, 4), F(1, 2))]).is_subset(IntervalSet.full())
        assert not IntervalSet.full().is_subset(IntervalSet.of([(0, F(1, 2))]))


class TestConstruction:
    def test_bt_matches_bruin_d3(self):
        p = BTParams(F(3, 5), F(1, 7))
        assert from_bt(p) == from_bruin(p.to_bruin())

    def test_bt_branches(self):
        m = from_bt(BTParams(F(2, 3), F(1, 3)))
        assert m.translations == (F(2, 3), F(1, 3), F(-2, 3))
        assert not m.degenerate

    def test_rotation_is_degenerate(self):
        m = from_bt(BTParams(F(1, 3), F(1, 3)))
        assert m.degenerate
        assert len(m.branches) == 2
        assert m.is_bijective()

    @pytest.mark.parametrize("alpha,beta", [(F(1, 3), F(2, 3)), (F(3, 2), F(1, 2)), (F(1, 2), F(-1, 4))])
    def test_bt_outside_region(self, alpha, beta):
        with pytest.raises(ParameterError):
            BTParams(alpha, beta)

    def test_bruin_lengths_must_sum_to_one(self):
        with pytest.raises(ParameterError):
            BruinParams(3, (F(1, 2), F(1, 2), F(1, 2)))

    def test_bruin_length_count(self):
        with pytest.raises(ParameterError):
            BruinParams(4, (F(1, 2), F(1, 2)))

    def test_bruin_alphas(self):
        assert BruinParams(4, (F(1, 4),) * 4).alphas == (F(3, 4), F(1, 2), F(1, 4))

    def test_branch_leaving_interval_rejected(self):
        with pytest.raises(ParameterError):
            ITM.from_pieces([(0, F(1, 2), F(2, 3)), (F(1, 2), 1, F(-1, 2))])

    def test_make_itm_needs_parameters(self):
        with pytest.raises(ParameterError):
            make_itm(alpha=F(1, 2))

    def test_make_itm_from_lengths(self):
        m = make_itm(lengths=(F(1, 4),) * 4)
        assert len(m.branches) == 4


class TestDynamics:
    def test_evaluate(self):
        m = from_bt(BTParams(F(1, 2), F(1, 4)))
        assert evaluate(m, F(1, 8)) == F(5, 8)
        assert evaluate(m, F(5, 8)) == F(7, 8)
        assert evaluate(m, F(7, 8)) == F(1, 8)

    @pytest.mark.parametrize("x", [F(-1, 5), F(1), F(3, 2)])
    def test_evaluate_outside(self, x):
        with pytest.raises(ParameterError):
            evaluate(from_bt(BTParams(F(1, 2), F(1, 4))), x)

    def test_image(self):
        m = from_bt(BTParams(F(2, 3), F(1, 3)))
        assert image(m, IntervalSet.full()) == IntervalSet.of([(0, F(1, 3)), (F(2, 3), 1)])

    def test_attractor_sequence_is_nested(self):
        m = from_bt(BTParams(F(3, 5), F(1, 7)))
        omegas = attractor_sequence(m, 6)
        assert len(omegas) == 7
        for a, b in zip(omegas, omegas[1:]):
            assert b.is_subset(a)

    def test_intersection_agrees(self):
        m = from_bt(BTParams(F(1, 2), F(1, 4)))
        assert attractor(m, 5) == attractor_by_intersection(m, 5)

    def test_negative_depth(self):
        with pytest.raises(ValueError):
            attractor_sequence(from_bt(BTParams(F(1, 2), F(1, 4))), -1)


class TestClassify:
    @pytest.mark.parametrize(
        "alpha,beta,depth,measure",
        [
            (F(2, 3), F(1, 3), 1, F(2, 3)),
            (F(1, 2), F(1, 4), 1, F(3, 4)),
            (F(1, 3), F(1, 3), 0, F(1)),
        ],
    )
    def test_finite_type_bt(self, alpha, beta, depth, measure):
        result = classify(from_bt(BTParams(alpha, beta)), 10)
        assert isinstance(result, FiniteType)
        assert result.depth == depth
        assert result.attractor.measure == measure

    def test_attractor_of_two_thirds(self):
        result = classify(from_bt(BTParams(F(2, 3), F(1, 3))), 10)
        assert result.attractor == IntervalSet.of([(0, F(1, 3)), (F(2, 3), 1)])
        assert str(result) == "FiniteType(1)"

    def test_agrees_with_intersection_oracle(self):
        m = from_bt(BTParams(F(2, 3), F(1, 3)))
        result = classify(m, 10)
        for n in (1, 2, 6):
            assert attractor_by_intersection(m, n) == result.attractor
        assert attractor_by_intersection(m, 0) != result.attractor

    def test_finite_type_bruin_d4(self):
        result = classify(make_itm(lengths=(F(1, 4),) * 4), 10)
        assert isinstance(result, FiniteType)
        assert result.depth == 1
        assert result.attractor.measure == F(1, 2)

    def test_unresolved_when_depth_too_small(self):
        result = classify(from_bt(BTParams(F(2, 3), F(1, 3))), 1)
        assert isinstance(result, Unresolved)
        assert result.max_depth == 1
        assert result.attractor.measure == F(2, 3)

    def test_depth_must_be_positive(self):
        with pytest.raises(ValueError):
            classify(from_bt(BTParams(F(1, 2), F(1, 4))), 0)
