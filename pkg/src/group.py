"""
Steinberg generators of SL(d, Z) as explicit words in the matrices A_d(k).

The derivation runs in six steps. Each produced word is evaluated exactly and
compared with I + E_ij before it is used again, so a broken identity is
reported with the step that produced it.
"""

from dataclasses import dataclass
from typing import Callable, Union

from .cocycles import IntMatrix, a_inverse, a_matrix, elementary_e
from .log import loggerInstance
from .report import Report


class DerivationError(ArithmeticError):
    def __init__(self, message: str, step: int) -> None:
        super().__init__(f"step {step}: {message}")
        self.step = step


@dataclass(frozen=True, eq=False)
class Atom:
    """A_d(k) raised to +1 or -1."""

    k: int
    exponent: int = 1


@dataclass(frozen=True, eq=False)
class Product:
    factors: tuple["Word", ...]


@dataclass(frozen=True, eq=False)
class Inverse:
    word: "Word"


@dataclass(frozen=True, eq=False)
class Conjugate:
    """g w g^{-1}."""

    g: "Word"
    word: "Word"


@dataclass(frozen=True, eq=False)
class Commutator:
    """a b a^{-1} b^{-1}."""

    a: "Word"
    b: "Word"


Word = Union[Atom, Product, Inverse, Conjugate, Commutator]

EMPTY_WORD: Word = Product(())


def evaluate_word(w: Word, d: int) -> IntMatrix:
    """Exact value of a word over the atoms A_d(k)^{+-1}.

    Derived words share subtrees, so values are memoized per node.
    """
    memo: dict[int, IntMatrix] = {}

    def ev(node: Word) -> IntMatrix:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Atom):
            if node.exponent not in (1, -1) or node.k < 1:
                raise ValueError(f"Malformed atom A({node.k})^{node.exponent}")
            value = a_matrix(d, node.k) if node.exponent == 1 else a_inverse(d, node.k)
        elif isinstance(node, Product):
            value = IntMatrix.identity(d)
            for f in node.factors:
                value = value @ ev(f)
        elif isinstance(node, Inverse):
            value = ev(node.word).inverse()
        elif isinstance(node, Conjugate):
            g = ev(node.g)
            value = g @ ev(node.word) @ g.inverse()
        elif isinstance(node, Commutator):
            a, b = ev(node.a), ev(node.b)
            value = a @ b @ a.inverse() @ b.inverse()
        else:
            raise ValueError(f"Malformed word node {node!r}")
        memo[key] = value
        return value

    return ev(w)


def word_atoms(w: Word) -> int:
    """Number of atoms in the fully expanded word."""
    memo: dict[int, int] = {}

    def count(node: Word) -> int:
        key = id(node)
        if key not in memo:
            if isinstance(node, Atom):
                memo[key] = 1
            elif isinstance(node, Product):
                memo[key] = sum(count(f) for f in node.factors)
            elif isinstance(node, Inverse):
                memo[key] = count(node.word)
            elif isinstance(node, Conjugate):
                memo[key] = 2 * count(node.g) + count(node.word)
            elif isinstance(node, Commutator):
                memo[key] = 2 * (count(node.a) + count(node.b))
            else:
                raise ValueError(f"Malformed word node {node!r}")
        return memo[key]

    return count(w)


@dataclass(frozen=True)
class SteinbergWord:
    target: tuple[int, int]
    word: Word
    value: IntMatrix


def elementary_t(d: int, i: int, j: int) -> IntMatrix:
    """T_ij = I_d + E_ij (1-based)."""
    if i == j:
        raise ValueError(f"T_ij needs i != j, got ({i},{j})")
    return IntMatrix.identity(d) + elementary_e(d, i, j)


def _commutator(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    return a @ b @ a.inverse() @ b.inverse()


def verify_commutation_relations(d: int) -> Report:
    """[T_ij, T_jk] = T_ik for distinct i, j, k and [T_ij, T_km] = I when j != k and i != m."""
    if d < 3:
        raise ValueError(f"d must be >= 3, got {d}")
    report = Report("commutators")
    identity = IntMatrix.identity(d)
    idx = range(1, d + 1)
    t = {(i, j): elementary_t(d, i, j) for i in idx for j in idx if i != j}
    chain_bad = [
        (i, j, k)
        for i in idx
        for j in idx
        for k in idx
        if len({i, j, k}) == 3 and _commutator(t[i, j], t[j, k]) != t[i, k]
    ]
    report.check("chain-relation", not chain_bad, f"d={d}" if not chain_bad else f"fails at {chain_bad[0]}")
    trivial_bad = [
        (i, j, k, m)
        for (i, j) in t
        for (k, m) in t
        if j != k and i != m and _commutator(t[i, j], t[k, m]) != identity
    ]
    report.check("trivial-relation", not trivial_bad, f"d={d}" if not trivial_bad else f"fails at {trivial_bad[0]}")
    return report


class _Derivation:
    def __init__(self, d: int) -> None:
        self.d = d
        self.words: dict[tuple[int, int], SteinbergWord] = {}
        self.a1: Word = Atom(1)
        self.a1_inv: Word = Atom(1, -1)
        self.conjugates: dict[int, Word] = {}

    def record(self, target: tuple[int, int], word: Word, step: int) -> Word:
        value = evaluate_word(word, self.d)
        expected = elementary_t(self.d, *target)
        if value != expected:
            raise DerivationError(f"word for T{target} evaluates to {value.to_lists()}", step)
        self.words[target] = SteinbergWord(target, word, value)
        loggerInstance.logger.log_debug(f"steinberg d={self.d}: T{target} from step {step}")
        return word

    def word(self, i: int, j: int) -> Word:
        return self.words[(i, j)].word

    def step1(self) -> None:
        """T_1d = A(2) A(1)^{-1}; then W_j = A(1) T_jd A(1)^{-1} = I + E_{j+1,d} - E_{j+1,1}
        isolates T_{j+1,d} = [W_j, T_1d^{-1}]; W_j is kept for step 2."""
        d = self.d
        t1d = self.record((1, d), Product((Atom(2), self.a1_inv)), 1)
        t1d_inv = Inverse(t1d)
        for j in range(1, d - 1):
            w = Conjugate(self.a1, self.word(j, d))
            expected_w = IntMatrix.identity(d) + elementary_e(d, j + 1, d) - elementary_e(d, j + 1, 1)
            if evaluate_word(w, d) != expected_w:
                raise DerivationError(f"conjugate of T({j},{d}) by A(1) is not I + E_{j+1}{d} - E_{j+1}1", 1)
            self.record((j + 1, d), Commutator(w, t1d_inv), 1)
            self.conjugates[j + 1] = w

    def step2(self) -> None:
        """T_j1 = W_{j-1}^{-1} T_jd for j = 2..d-1, with W from step 1."""
        for j in range(2, self.d):
            if j not in self.conjugates:
                raise DerivationError(f"W for row {j} missing after step 1", 2)
            self.record((j, 1), Product((Inverse(self.conjugates[j]), self.word(j, self.d))), 2)

    def step3(self) -> None:
        """Lower diagonal by conjugation with A(1), closed by T_{d,d-1} from X = A(1)^{-1} T_1d A(1)."""
        d = self.d
        for j in range(1, d - 2):
            self.record((j + 2, j + 1), Conjugate(self.a1, self.word(j + 1, j)), 3)
        x = Conjugate(self.a1_inv, self.word(1, d))
        block = evaluate_word(x, d)
        if [list(r[d - 2 :]) for r in block.rows[d - 2 :]] != [[2, 1], [-1, 0]]:
            raise DerivationError(f"X has lower-right block {block.to_lists()}", 3)
        self.record((d, d - 1), Inverse(Conjugate(Inverse(x), self.word(d - 1, d))), 3)

    def step4(self) -> None:
        """Last row: T_dj = [T_{d,j+1}, T_{j+1,j}] for j = d-2 down to 1."""
        d = self.d
        for j in range(d - 2, 0, -1):
            self.record((d, j), Commutator(self.word(d, j + 1), self.word(j + 1, j)), 4)

    def step5(self) -> None:
        """Upper diagonal: T_{j,j+1} = [T_jd, T_{d,j+1}]."""
        d = self.d
        for j in range(1, d - 1):
            self.record((j, j + 1), Commutator(self.word(j, d), self.word(d, j + 1)), 5)

    def step6(self) -> None:
        """Everything else by commutator chains, in order of increasing |i - j|."""
        d = self.d
        for gap in range(2, d):
            for i in range(1, d + 1):
                for j in (i + gap, i - gap):
                    if not 1 <= j <= d or (i, j) in self.words:
                        continue
                    if j > i:
                        word = Commutator(self.word(i, i + 1), self.word(i + 1, j))
                    else:
                        word = Commutator(self.word(i, i - 1), self.word(i - 1, j))
                    self.record((i, j), word, 6)

    def steps(self) -> list[Callable[[], None]]:
        return [self.step1, self.step2, self.step3, self.step4, self.step5, self.step6]


def derive_steinberg(d: int) -> dict[tuple[int, int], SteinbergWord]:
    if d < 3:
        raise ValueError(f"d must be >= 3, got {d}")
    derivation = _Derivation(d)
    for step in derivation.steps():
        step()
    missing = [(i, j) for i in range(1, d + 1) for j in range(1, d + 1) if i != j and (i, j) not in derivation.words]
    if missing:
        raise DerivationError(f"no word for {missing}", 6)
    return derivation.words


def shift_identity_holds(d: int, k: int) -> bool:
    """A_d(k+1) A_d(k)^{-1} = T_1d."""
    return a_matrix(d, k + 1) @ a_inverse(d, k) == elementary_t(d, 1, d)


def a1_inverse_block_form(d: int) -> IntMatrix:
    """A_d(1)^{-1}: shift block on top, then rows (1,0,...,0) and (-1,0,...,0,1)."""
    rows = [[0] * d for _ in range(d)]
    for i in range(d - 2):
        rows[i][i + 1] = 1
    rows[d - 2][0] = 1
    rows[d - 1][0] = -1
    rows[d - 1][d - 1] = 1
    return IntMatrix.from_rows(rows)


def steinberg_suite(dims: tuple[int, ...] = (3, 4, 5, 6), kmax: int = 20) -> Report:
    report = Report("steinberg")
    for d in dims:
        shift_bad = [k for k in range(1, kmax + 1) if not shift_identity_holds(d, k)]
        report.check(f"shift-identity-d{d}", not shift_bad, f"k = 1..{kmax}")
        a1_inv = a_matrix(d, 1).inverse()
        report.check(f"a1-inverse-block-d{d}", a1_inv == a1_inverse_block_form(d))
        conj = a_matrix(d, 1) @ elementary_e(d, 1, d) @ a1_inv
        report.check(f"e1d-conjugation-d{d}", conj == elementary_e(d, 2, d) - elementary_e(d, 2, 1))
        isolated = a_matrix(d, 1) @ elementary_t(d, 1, d) @ a1_inv
        expected = elementary_t(d, 2, d) @ elementary_t(d, 2, 1).inverse()
        report.check(f"isolation-identity-d{d}", isolated == expected, "A1 T1d A1^-1 = T2d T21^-1")
        try:
            words = derive_steinberg(d)
        except DerivationError as e:
            report.check(f"derivation-d{d}", False, str(e))
            continue
        report.check(f"derivation-d{d}", len(words) == d * (d - 1), f"{len(words)} generators")
        report.record(f"atoms_d{d}", {f"T{i}{j}": word_atoms(w.word) for (i, j), w in sorted(words.items())})
    return report
