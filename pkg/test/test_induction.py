import random
from fractions import Fraction as F

import pytest

from src.cocycles import KSequence
from src.induction import (
    BoundaryTie,
    CaseTag,
    InsufficientPrecision,
    Reduce,
    SuspensionState,
    ZStep,
    area_check,
    area_sequence,
    cone_columns,
    duality_check,
    height_step,
    itinerary,
    normalize,
    params_from_itinerary,
    r_step,
    required_depth,
    tower_masses,
    z_step,
)
from src.itm import ParameterError


class TestRStep:
    def test_swap(self):
        step = r_step((1, 3, 2, 4), 4)
        assert step.case_tag is CaseTag.SWAP
        assert step.new_lambda == (3, 2, 1, 3)

    def test_expand(self):
        step = r_step((6, 2, 1, 1), 4)
        assert step.case_tag is CaseTag.EXPAND
        assert step.new_lambda == (2, 2, 1, 1)

    def test_reduce(self):
        step = r_step((3, 3, 2, 2), 4)
        assert step.case_tag is CaseTag.REDUCE
        assert step.length_matrix.is_identity()

    def test_length_matrix_inverts_step(self):
        lam = (F(6), F(2), F(1), F(1))
        step = r_step(lam, 4)
        assert step.length_matrix.apply(step.new_lambda) == lam

    @pytest.mark.parametrize("lengths,reason", [((3, 1, 1, 1), "sum"), ((1, 1, 1, 1), "lambda_d")])
    def test_boundary_ties(self, lengths, reason):
        with pytest.raises(BoundaryTie) as excinfo:
            r_step(lengths, 4)
        assert reason in excinfo.value.reason

    @pytest.mark.parametrize("lengths,d", [((1, 1), 2), ((1, 1, 1), 4), ((1, -1, 2), 3), ((0, 0, 0), 3)])
    def test_invalid_lengths(self, lengths, d):
        with pytest.raises(ParameterError):
            r_step(lengths, d)


class TestAcceleratedStep:
    def test_z_step_fast_forwards(self):
        result = z_step((F(4, 7), F(1, 7), F(2, 7)), 3)
        assert isinstance(result, ZStep)
        assert result.k == 2
        assert result.lengths == (F(1, 3), F(1, 3), F(1, 3))

    def test_z_step_reduce(self):
        result = z_step((3, 3, 2, 2), 4)
        assert isinstance(result, Reduce)
        assert result.expand_steps == 0

    def test_itinerary_reproduces_prefix(self):
        point, diameter = params_from_itinerary([2, 3, 1], 3, 3)
        assert point == normalize((14, 9, 4))
        result = itinerary(point, 3, 3)
        assert result.completed
        assert result.ks == KSequence((2, 3, 1))
        assert 0 < diameter <= 1

    def test_itinerary_stops_on_reduce(self):
        result = itinerary((3, 3, 2, 2), 4, 5)
        assert not result.completed
        assert result.reduced_at == 1
        assert str(result) == "(; Reduced(1))"

    def test_tie_reports_step(self):
        with pytest.raises(BoundaryTie) as excinfo:
            itinerary((5, 2, 2), 3, 4)
        assert excinfo.value.step == 2

    def test_itinerary_d4(self):
        ks = [1, 2, 2, 4]
        point, _ = params_from_itinerary(ks, 4, len(ks))
        assert itinerary(point, 4, len(ks)).ks == KSequence(tuple(ks))

    def test_random_round_trips(self):
        rng = random.Random(2024)
        for _ in range(100):
            ks = [rng.randint(1, 6) for _ in range(10)]
            point, _ = params_from_itinerary(ks, 3, len(ks))
            assert itinerary(point, 3, len(ks)).ks == KSequence(tuple(ks))


class TestCones:
    def test_depth_zero_is_simplex(self):
        point, diameter = params_from_itinerary([2], 3, 0)
        assert point == (F(1, 3),) * 3
        assert diameter == 1
        assert cone_columns([2], 3, 0)[0] == (1, 0, 0)

    def test_depth_beyond_itinerary(self):
        with pytest.raises(InsufficientPrecision):
            cone_columns([2, 2], 3, 3)

    def test_required_depth_trivial_tolerance(self):
        assert required_depth([2, 2], 3, F(1)) == 0

    def test_required_depth_unreachable(self):
        with pytest.raises(InsufficientPrecision):
            required_depth([2], 3, F(1, 10**9))

    def test_tower_masses_sum_to_one(self):
        masses = tower_masses([2, 3, 1, 4], 3, 2)
        assert sum(masses) == 1
        assert all(m > 0 for m in masses)

    def test_tower_masses_bounds(self):
        assert tower_masses([2], 3, 0, depth=0) == (F(1, 3),) * 3
        with pytest.raises(ValueError):
            tower_masses([2], 3, 2)


class TestHeights:
    def test_height_step(self):
        state = SuspensionState((4, 1, 2), (1, 1, 1))
        nxt = height_step(state, 2, 3)
        assert nxt.heights == (1, 3, 2)
        assert nxt.lengths == (1, 1, 1)

    def test_height_step_outside_cone(self):
        with pytest.raises(ParameterError):
            height_step(SuspensionState.initial((1, 1, 1)), 2, 3)

    def test_heights_positive(self):
        with pytest.raises(ParameterError):
            SuspensionState((1, 1, 1), (1, 0, 1))

    def test_area_sequence_decreases(self):
        ks = [2, 3, 2]
        point, _ = params_from_itinerary(ks, 3, len(ks))
        areas = area_sequence(ks, 3, point)
        assert areas[0] == 1
        assert all(b < a for a, b in zip(areas, areas[1:]))

    def test_area_constant_for_k1(self):
        ks = [1, 1, 1]
        point, _ = params_from_itinerary(ks, 3, len(ks))
        areas = area_sequence(ks, 3, point)
        assert len(set(areas)) == 1

    @pytest.mark.parametrize("k", [2, 3])
    def test_area_check(self, k):
        assert area_check(k, 3, steps=6).passed

    def test_area_ratio_limit(self):
        report = area_check(2, 3, steps=50, lookahead=20, ratio_tolerance=1e-3)
        assert report.passed
        assert report.values["expected_ratio"] == pytest.approx(1.80194 / 2.24698, abs=1e-4)
        assert report.values["final_ratio"] == pytest.approx(report.values["expected_ratio"], abs=1e-3)


class TestDuality:
    @pytest.mark.parametrize("ks,d", [([2, 3, 1], 3), ([1, 1, 5], 3), ([1, 2, 2, 4], 4)])
    def test_duality(self, ks, d):
        report = duality_check(ks, d)
        assert report.passed
        assert len(report.checks) == 5
