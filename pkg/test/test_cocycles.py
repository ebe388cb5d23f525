from fractions import Fraction
from unittest.mock import patch

import numpy as np
import pytest

from src.cocycles import (
    IntMatrix,
    KSequence,
    MatrixFamily,
    a_inverse,
    a_matrix,
    b3_matrix,
    cnorm,
    cnorm_ratio_check,
    conjugation_check_d3,
    conjugation_suite,
    j_conjugation_holds,
    loop_domination,
    matrix_order_lt,
    o_conjugation_holds,
    order_suite,
    pf_constants,
    prefix_products,
    product,
    random_column_growth,
    recursion_sequences,
    verify_column_growth,
    z_matrix,
)


class TestMatrices:
    def test_a3_2_entries(self):
        assert a_matrix(3, 2).to_lists() == [[0, 2, 1], [1, 0, 0], [0, 1, 1]]

    def test_z3_3_entries(self):
        assert z_matrix(3, 3).to_lists() == [[2, 3, 2], [1, 0, 0], [0, 1, 1]]

    def test_b3_entries(self):
        assert b3_matrix(2).to_lists() == [[0, 1, 0], [1, 0, 1], [1, 0, 2]]

    @pytest.mark.parametrize("d", [3, 4, 5, 6])
    @pytest.mark.parametrize("k", [1, 2, 7])
    def test_determinant_sign(self, d, k):
        assert a_matrix(d, k).det() == (-1) ** d

    @pytest.mark.parametrize("d,k", [(3, 1), (3, 2), (4, 5), (6, 3)])
    def test_closed_form_inverse(self, d, k):
        assert (a_inverse(d, k) @ a_matrix(d, k)).is_identity()
        assert a_matrix(d, k).inverse() == a_inverse(d, k)

    def test_charpoly_a3_2(self):
        assert a_matrix(3, 2).charpoly_coeffs() == (1, -1, -2, 1)

    def test_inverse_requires_unimodular(self):
        with pytest.raises(ValueError):
            IntMatrix.from_rows([[2, 0], [0, 1]]).inverse()

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            IntMatrix(((1, 2),))

    @pytest.mark.parametrize("d,k", [(2, 1), (3, 0)])
    def test_invalid_dimension_or_k(self, d, k):
        with pytest.raises(ValueError):
            a_matrix(d, k)

    def test_power_and_negative_power(self):
        a = a_matrix(3, 2)
        assert a.power(3).to_lists() == [[1, 5, 3], [2, 1, 1], [1, 3, 2]]
        assert (a.power(-2) @ a.power(2)).is_identity()

    def test_square_has_zero_cube_is_positive(self):
        a = a_matrix(3, 2)
        assert a.power(2).to_lists() == [[2, 1, 1], [0, 2, 1], [1, 1, 1]]
        assert not a.power(2).is_positive()
        assert a.power(3).is_positive()


class TestFamilies:
    @pytest.mark.parametrize(
        "name,expected",
        [("A", MatrixFamily.A), ("b3", MatrixFamily.B3), ("ainv", MatrixFamily.A_INV), ("A_INV", MatrixFamily.A_INV)],
    )
    def test_parse(self, name, expected):
        assert MatrixFamily.parse(name) is expected

    def test_parse_unknown(self):
        with pytest.raises(ValueError):
            MatrixFamily.parse("Q")

    def test_b3_only_in_dimension_3(self):
        with pytest.raises(ValueError):
            MatrixFamily.B3.matrix(4, 2)

    def test_inverse_family_not_nonnegative(self):
        assert not MatrixFamily.A_INV.nonnegative
        assert MatrixFamily.ZT.nonnegative

    def test_product_order(self):
        expected = a_matrix(3, 2) @ a_matrix(3, 3)
        assert product(MatrixFamily.A, [2, 3], 3) == expected

    def test_prefix_products_match_products(self):
        ks = [1, 4, 2, 2]
        prefixes = list(prefix_products(MatrixFamily.Z, ks, 4))
        assert len(prefixes) == 4
        for n, p in enumerate(prefixes, start=1):
            assert p == product(MatrixFamily.Z, ks[:n], 4)

    def test_empty_product_rejected(self):
        with pytest.raises(ValueError):
            product(MatrixFamily.A, [], 3)

    def test_ksequence_rejects_zero(self):
        with pytest.raises(ValueError):
            KSequence((1, 0, 2))

    def test_ksequence_periodic(self):
        assert KSequence.periodic([1, 2], 5).ks == (1, 2, 1, 2, 1)


class TestColumnGrowth:
    def test_recursion_matches_columns(self):
        triple = recursion_sequences([2, 3])
        assert triple.xyz == ((3, 0, 1), (1, 3, 1))
        assert triple.abc[0] == (0, 1, 3)

    def test_single_step(self):
        report = verify_column_growth([2])
        assert report.passed
        assert len(report.checks) == 4

    def test_random_itineraries(self):
        report = random_column_growth(40, 8, 6, seed=3)
        assert report.passed
        assert report.values["n_sequences"] == 40

    def test_random_itineraries_come_from_numpy_stream(self):
        rng = np.random.default_rng(5)
        expected = []
        for _ in range(10):
            length = int(rng.integers(1, 7))
            expected.append(tuple(int(k) for k in rng.integers(1, 5, size=length)))
        seen = []

        def record(ks):
            seen.append(tuple(ks))
            return verify_column_growth(ks)

        with patch("src.cocycles.verify_column_growth", side_effect=record):
            report = random_column_growth(10, 6, 4, seed=5)
        assert seen == expected
        assert report.passed

    def test_cnorm_rejects_negative(self):
        with pytest.raises(ValueError):
            cnorm(a_inverse(3, 2))


class TestConjugations:
    @pytest.mark.parametrize("k", [1, 2, 5, 11])
    def test_base_change_d3(self, k):
        assert conjugation_check_d3(k).passed

    @pytest.mark.parametrize("k", [1, 2, 9])
    def test_octant_conjugation(self, k):
        assert o_conjugation_holds(k)

    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_j_conjugation(self, d):
        assert j_conjugation_holds(d, 2)

    def test_suite(self):
        report = conjugation_suite(6, dmax=5)
        assert report.passed
        assert {c.name for c in report.checks} >= {"j-conjugation", "determinant-sign", "d3-factors"}


class TestOrderAndConstants:
    def test_matrix_order(self):
        assert matrix_order_lt(a_matrix(3, 2), z_matrix(3, 2))
        assert not matrix_order_lt(a_matrix(3, 1), z_matrix(3, 1))

    def test_order_suite(self):
        assert order_suite(10, dims=(3, 4)).passed

    def test_cnorm_ratio(self):
        assert cnorm_ratio_check(30).passed

    def test_pf_constants(self):
        report = pf_constants(40)
        assert report.passed
        assert report.values["smallest_m"] is not None
        assert report.values["ratio_at_smallest_m"] > 2

    def test_pf_constants_limit(self):
        with pytest.raises(ValueError):
            pf_constants(0)

    def test_loop_domination(self):
        report = loop_domination(3, (2, 2, 2))
        assert report.passed
        assert report.values["K"] > 1

    def test_loop_not_positive(self):
        report = loop_domination(3, (2,))
        assert not report.passed
        assert "K" not in report.values

    def test_ratio_is_fraction(self):
        value = pf_constants(40).values["ratio_at_smallest_m"]
        assert isinstance(value, Fraction)
