import pytest
from fractions import Fraction as F

from src.cocycles import a_matrix
from src.sadic import (
    Concat,
    Letter,
    Power,
    Substitution,
    abelianization,
    abelianization_power_lengths,
    balanced_times,
    chi,
    chi_abelianization_matches,
    common_prefix_length,
    compose,
    compose_all,
    is_left_proper,
    left_proper_composite,
    strong_coincidence,
    tower_lengths,
    tower_names,
    veech_components,
    veech_residual,
)


class TestSubstitutions:
    def test_chi_images(self):
        s = chi(3, 2)
        assert s.image(1) == (2,)
        assert s.image(2) == (3, 1, 1)
        assert s.image(3) == (3, 1)

    def test_chi_k1_drops_empty_run(self):
        assert chi(3, 1).runs(3) == ((3, 1),)

    @pytest.mark.parametrize("d,k", [(2, 1), (3, 0)])
    def test_chi_invalid(self, d, k):
        with pytest.raises(ValueError):
            chi(d, k)

    def test_from_words_and_str(self):
        s = Substitution.from_words(3, [[1, 2], [2], [3, 3]])
        assert s.runs(3) == ((3, 2),)
        assert str(s) == "1->12, 2->2, 3->3^2"

    def test_invalid_image_letter(self):
        with pytest.raises(ValueError):
            Substitution.from_words(3, [[1], [4], [3]])

    def test_compose_pair(self):
        s = compose(chi(3, 4), chi(3, 2))
        assert s.image(1) == (3, 1, 1, 1, 1)
        assert s.image(2) == (3, 1, 1, 1, 2, 2)
        assert s.image(3) == (3, 1, 1, 1, 2)

    def test_compose_matches_apply(self):
        s, t = chi(4, 3), chi(4, 2)
        st = compose(s, t)
        for a in range(1, 5):
            assert st.image(a) == s.apply(t.image(a))

    def test_compose_dimension_mismatch(self):
        with pytest.raises(ValueError):
            compose(chi(3, 2), chi(4, 2))

    def test_power(self):
        s = chi(3, 2)
        assert s.power(2) == compose(s, s)
        with pytest.raises(ValueError):
            s.power(0)

    def test_compose_all_empty(self):
        with pytest.raises(ValueError):
            compose_all([])

    @pytest.mark.parametrize("d,k", [(3, 1), (3, 5), (5, 2)])
    def test_abelianization_is_a(self, d, k):
        assert chi_abelianization_matches(d, k)

    def test_abelianization_of_composite(self):
        s = compose_all([chi(3, 2), chi(3, 3)])
        assert abelianization(s) == a_matrix(3, 2) @ a_matrix(3, 3)

    def test_power_lengths(self):
        assert abelianization_power_lengths(chi(3, 2), 4)


class TestLeftProper:
    def test_chi_not_left_proper(self):
        assert not is_left_proper(chi(3, 2))

    @pytest.mark.parametrize("d,ks", [(3, (2, 2)), (3, (1, 7)), (4, (2, 1, 3))])
    def test_composite_left_proper(self, d, ks):
        s = left_proper_composite(d, ks)
        assert is_left_proper(s)
        assert all(s.runs(a)[0][0] == d for a in range(1, d + 1))

    def test_composite_needs_d_minus_1(self):
        with pytest.raises(ValueError):
            left_proper_composite(3, (2, 2, 2))

    def test_coincidence_left_proper(self):
        result = strong_coincidence(left_proper_composite(3, (2, 2)), 1)
        assert result.found
        assert result.power == 1
        assert result.letter == 3

    def test_coincidence_after_squaring(self):
        result = strong_coincidence(chi(3, 2), 3)
        assert result.found
        assert result.power == 2
        assert result.letter == 1
        assert result.witness == ((0, 0, 1),)

    def test_coincidence_not_found_is_unknown(self):
        s = Substitution.from_words(3, [[1], [2], [3]])
        result = strong_coincidence(s, 2)
        assert not result.found
        assert str(result) == "Unknown"

    def test_coincidence_power_bound(self):
        with pytest.raises(ValueError):
            strong_coincidence(chi(3, 2), 0)


class TestLazyWords:
    def test_concat_and_power(self):
        word = Concat([Letter(3), Power(Letter(1), 3), Letter(2)])
        assert word.length == 5
        assert word.materialize() == (3, 1, 1, 1, 2)
        assert word.letter_at(4) == 2
        assert word.prefix(2) == (3, 1)

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            Power(Letter(1), 2).letter_at(2)


class TestTowers:
    def test_level_two_names(self):
        family = tower_names((2, 3), 2)
        assert family.word(1) == (3, 1, 1)
        assert family.word(2) == (3, 1, 2, 2, 2)
        assert family.word(3) == (3, 1, 2, 2)
        assert family.heights == (3, 5, 4)
        assert family.heights == tower_lengths((2, 3), 2)

    def test_names_equal_composite_images(self):
        ks = (3, 1, 2, 2)
        family = tower_names(ks, 4, d=4)
        s = compose_all([chi(4, k) for k in ks])
        for a in range(1, 5):
            assert family.word(a) == s.image(a)

    def test_cutoff(self):
        family = tower_names((2, 3), 2, cutoff=4)
        assert family.word(1) == (3, 1, 1)
        assert family.word(2) is None

    def test_huge_k_stays_lazy(self):
        family = tower_names((10**9, 3), 2)
        v = family.v
        assert v.length == 10**9 + 3
        assert v.length == tower_lengths((10**9, 3), 2)[1]
        assert v.letter_at(0) == 3
        assert v.letter_at(1) == 1
        assert v.letter_at(v.length - 1) == 2
        assert family.word(2) is None

    def test_level_outside_itinerary(self):
        with pytest.raises(ValueError):
            tower_names((2,), 2)

    def test_common_prefix(self):
        assert common_prefix_length((2, 3), 2) == 2
        assert common_prefix_length((2, 3), 0) == 0

    def test_common_prefix_huge(self):
        ks = (10**12, 10**12, 5)
        family = tower_names(ks, 3, cutoff=0)
        lcp = common_prefix_length(ks, 3)
        assert 0 < lcp <= min(family.heights)
        for a, b in ((1, 2), (2, 3)):
            assert family.names[a - 1].letter_at(lcp - 1) == family.names[b - 1].letter_at(lcp - 1)


class TestVeech:
    def test_components(self):
        assert veech_components((2, 3), F(1, 2), 2) == (F(1, 2), F(1, 2), F(0))
        assert veech_residual((2, 3), F(1, 2), 2) == F(1, 2)

    def test_level_zero(self):
        assert veech_components((2,), F(1, 3), 0) == (F(1, 3),) * 3

    def test_balanced_times(self):
        assert balanced_times((2, 3), 2, 0, 0) == [0, 1, 2]
        assert balanced_times((2, 3), 2, 0, F(1, 2)) == [2]

    def test_balanced_times_bound(self):
        with pytest.raises(ValueError):
            balanced_times((2, 3), 3, F(1, 10), F(1, 10))
