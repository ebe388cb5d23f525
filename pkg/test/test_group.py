import pytest

from src.cocycles import IntMatrix, a_matrix
from src.group import (
    EMPTY_WORD,
    Atom,
    Commutator,
    Conjugate,
    DerivationError,
    Inverse,
    Product,
    _Derivation,
    a1_inverse_block_form,
    derive_steinberg,
    elementary_t,
    evaluate_word,
    shift_identity_holds,
    steinberg_suite,
    verify_commutation_relations,
    word_atoms,
)


class TestWords:
    def test_empty_word_is_identity(self):
        assert evaluate_word(EMPTY_WORD, 4).is_identity()

    def test_atom_and_inverse(self):
        w = Product((Atom(3), Atom(3, -1)))
        assert evaluate_word(w, 3).is_identity()
        assert evaluate_word(Inverse(Atom(2)), 3) == a_matrix(3, 2).inverse()

    def test_conjugate_and_commutator(self):
        a, b = a_matrix(3, 1), a_matrix(3, 2)
        assert evaluate_word(Conjugate(Atom(1), Atom(2)), 3) == a @ b @ a.inverse()
        assert evaluate_word(Commutator(Atom(1), Atom(2)), 3) == a @ b @ a.inverse() @ b.inverse()

    @pytest.mark.parametrize("atom", [Atom(2, 2), Atom(0)])
    def test_malformed_atom(self, atom):
        with pytest.raises(ValueError):
            evaluate_word(atom, 3)

    def test_atom_counts(self):
        assert word_atoms(Commutator(Atom(1), Atom(2))) == 4
        assert word_atoms(Conjugate(Atom(1), Product((Atom(2), Atom(3))))) == 4
        assert word_atoms(Inverse(Atom(5))) == 1

    def test_shared_subtrees_counted_in_full(self):
        inner = Commutator(Atom(1), Atom(2))
        assert word_atoms(Product((inner, inner))) == 8


class TestElementary:
    def test_t_matrix(self):
        assert elementary_t(3, 1, 3).to_lists() == [[1, 0, 1], [0, 1, 0], [0, 0, 1]]

    def test_diagonal_rejected(self):
        with pytest.raises(ValueError):
            elementary_t(3, 2, 2)

    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_commutation_relations(self, d):
        report = verify_commutation_relations(d)
        assert report.passed
        assert [c.name for c in report.checks] == ["chain-relation", "trivial-relation"]

    def test_commutation_needs_d3(self):
        with pytest.raises(ValueError):
            verify_commutation_relations(2)

    @pytest.mark.parametrize("d", [3, 4, 6])
    @pytest.mark.parametrize("k", [1, 2, 9])
    def test_shift_identity(self, d, k):
        assert shift_identity_holds(d, k)

    @pytest.mark.parametrize("d", [3, 4, 7])
    def test_a1_inverse_block(self, d):
        assert a1_inverse_block_form(d) == a_matrix(d, 1).inverse()


class TestDerivation:
    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_all_generators(self, d):
        words = derive_steinberg(d)
        assert len(words) == d * (d - 1)
        for (i, j), sw in words.items():
            assert sw.target == (i, j)
            assert evaluate_word(sw.word, d) == elementary_t(d, i, j)

    def test_first_generator(self):
        words = derive_steinberg(4)
        assert words[(1, 4)].value == a_matrix(4, 2) @ a_matrix(4, 1).inverse()

    def test_needs_d3(self):
        with pytest.raises(ValueError):
            derive_steinberg(2)

    def test_wrong_word_reports_step(self):
        derivation = _Derivation(3)
        with pytest.raises(DerivationError) as excinfo:
            derivation.record((1, 3), Atom(1), 4)
        assert excinfo.value.step == 4
        assert "step 4" in str(excinfo.value)

    def test_first_column_comes_from_step2(self):
        derivation = _Derivation(4)
        derivation.step1()
        assert (2, 1) not in derivation.words
        derivation.step2()
        assert evaluate_word(derivation.word(3, 1), 4) == elementary_t(4, 3, 1)

    def test_corrupted_first_column_word_reports_step2(self):
        derivation = _Derivation(3)
        derivation.step1()
        derivation.conjugates[2] = Atom(1)
        with pytest.raises(DerivationError) as excinfo:
            derivation.step2()
        assert excinfo.value.step == 2

    def test_missing_conjugate_reports_step2(self):
        derivation = _Derivation(3)
        derivation.step1()
        derivation.conjugates.clear()
        with pytest.raises(DerivationError) as excinfo:
            derivation.step2()
        assert excinfo.value.step == 2

    def test_suite(self):
        report = steinberg_suite((3, 4), kmax=5)
        assert report.passed
        names = {c.name for c in report.checks}
        assert {"isolation-identity-d3", "derivation-d4", "e1d-conjugation-d4"} <= names
        assert set(report.values["atoms_d3"]) == {"T12", "T13", "T21", "T23", "T31", "T32"}

    def test_identity_matrix_type(self):
        assert isinstance(evaluate_word(EMPTY_WORD, 3), IntMatrix)
