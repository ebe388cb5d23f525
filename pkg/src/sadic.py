"""
Substitutions chi_k, their algebra, Rokhlin tower names and the Veech residual.

Letters are 1..d. Substitution images are stored run-length encoded, since k
(and therefore 1^k) can be astronomically large in the constructions. Tower
names are lazy word trees: only lengths and prefix queries are ever needed
beyond the materialization cutoff.
"""

import itertools
from abc import ABC, abstractmethod
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

from .cocycles import IntMatrix, KLike, KSequence, MatrixFamily, a_matrix, product
from .induction import tower_masses
from .log import loggerInstance

Run = tuple[int, int]  # (letter, count)

DEFAULT_CUTOFF = 10**6


def _compress(runs: Iterable[Run]) -> tuple[Run, ...]:
    out: list[Run] = []
    for letter, count in runs:
        if count <= 0:
            continue
        if out and out[-1][0] == letter:
            out[-1] = (letter, out[-1][1] + count)
        else:
            out.append((letter, count))
    return tuple(out)


@dataclass(frozen=True)
class Substitution:
    d: int
    images: tuple[tuple[Run, ...], ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.d:
            raise ValueError(f"Expected {self.d} images, got {len(self.images)}")
        for runs in self.images:
            if not runs:
                raise ValueError("Substitution images must be non-empty")
            if any(not 1 <= letter <= self.d or count < 1 for letter, count in runs):
                raise ValueError(f"Image {runs} uses letters outside 1..{self.d}")

    @classmethod
    def from_words(cls, d: int, words: Sequence[Sequence[int]]) -> "Substitution":
        return cls(d, tuple(_compress((letter, 1) for letter in w) for w in words))

    @classmethod
    def identity(cls, d: int) -> "Substitution":
        return cls(d, tuple(((a, 1),) for a in range(1, d + 1)))

    def runs(self, letter: int) -> tuple[Run, ...]:
        return self.images[letter - 1]

    def image(self, letter: int) -> tuple[int, ...]:
        return tuple(itertools.chain.from_iterable(itertools.repeat(a, c) for a, c in self.runs(letter)))

    def image_length(self, letter: int) -> int:
        return sum(c for _, c in self.runs(letter))

    def apply(self, word: Sequence[int]) -> tuple[int, ...]:
        return tuple(itertools.chain.from_iterable(self.image(a) for a in word))

    def power(self, m: int) -> "Substitution":
        if m < 1:
            raise ValueError("Substitution powers start at 1")
        result = self
        for _ in range(m - 1):
            result = compose(self, result)
        return result

    def __str__(self) -> str:
        def show(runs: tuple[Run, ...]) -> str:
            return "".join(f"{a}" if c == 1 else f"{a}^{c}" for a, c in runs)

        return ", ".join(f"{a}->{show(r)}" for a, r in enumerate(self.images, start=1))


def chi(d: int, k: int) -> Substitution:
    """i -> i+1 for i <= d-2, d-1 -> d 1^k, d -> d 1^(k-1)."""
    if d < 3:
        raise ValueError(f"d must be >= 3, got {d}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    images: list[tuple[Run, ...]] = [((i + 1, 1),) for i in range(1, d - 1)]
    images.append(_compress([(d, 1), (1, k)]))
    images.append(_compress([(d, 1), (1, k - 1)]))
    return Substitution(d, tuple(images))


def compose(s: Substitution, t: Substitution) -> Substitution:
    """(s o t)(a) = s(t(a)): apply t first, then s."""
    if s.d != t.d:
        raise ValueError(f"Cannot compose substitutions on {s.d} and {t.d} letters")
    images: list[tuple[Run, ...]] = []
    for letter in range(1, t.d + 1):
        runs: list[Run] = []
        for b, count in t.runs(letter):
            block = s.runs(b)
            if len(block) == 1:
                runs.append((block[0][0], block[0][1] * count))
            else:
                runs.extend(block * count)
        images.append(_compress(runs))
    return Substitution(s.d, tuple(images))


def compose_all(subs: Sequence[Substitution]) -> Substitution:
    """s_1 o s_2 o ... o s_n."""
    if not subs:
        raise ValueError("Nothing to compose")
    result = subs[-1]
    for s in reversed(subs[:-1]):
        result = compose(s, result)
    return result


def abelianization(s: Substitution) -> IntMatrix:
    """Entry (i, j) counts letter i in the image of letter j."""
    rows = [[0] * s.d for _ in range(s.d)]
    for j in range(1, s.d + 1):
        for a, c in s.runs(j):
            rows[a - 1][j - 1] += c
    return IntMatrix.from_rows(rows)


def is_left_proper(s: Substitution) -> bool:
    return len({runs[0][0] for runs in s.images}) == 1


def left_proper_composite(d: int, ks: KLike) -> Substitution:
    """chi_{k_1} o ... o chi_{k_{d-1}}: every image starts with the letter d."""
    seq = KSequence.of(ks)
    if len(seq) != d - 1:
        raise ValueError(f"Need exactly {d - 1} values of k, got {len(seq)}")
    return compose_all([chi(d, k) for k in seq])


@dataclass(frozen=True)
class Coincidence:
    found: bool
    power: Optional[int] = None
    letter: Optional[int] = None
    side: Optional[str] = None
    witness: tuple[tuple[int, ...], ...] = ()

    def __str__(self) -> str:
        if not self.found:
            return "Unknown"
        return f"Yes(power={self.power}, letter={self.letter}, {self.side})"


def _abelian(word: Sequence[int], d: int) -> tuple[int, ...]:
    counts = [0] * d
    for a in word:
        counts[a - 1] += 1
    return tuple(counts)


def strong_coincidence(s: Substitution, max_power: int) -> Coincidence:
    """Search powers up to max_power for a letter b with coinciding prefix (or suffix)
    abelianizations in every image.

    The prefix is the part strictly before the chosen occurrence of b. A
    left-proper substitution qualifies at power 1 with empty prefixes.
    """
    if max_power < 1:
        raise ValueError("max_power must be >= 1")
    if is_left_proper(s):
        first = s.images[0][0][0]
        return Coincidence(True, 1, first, "prefix", tuple(() for _ in range(s.d)))
    for p in range(1, max_power + 1):
        sp = s.power(p)
        words = [sp.image(a) for a in range(1, s.d + 1)]
        for side in ("prefix", "suffix"):
            oriented = words if side == "prefix" else [tuple(reversed(w)) for w in words]
            for b in range(1, s.d + 1):
                common: Optional[set[tuple[int, ...]]] = None
                for w in oriented:
                    vecs = {_abelian(w[:i], s.d) for i, a in enumerate(w) if a == b}
                    common = vecs if common is None else common & vecs
                    if not common:
                        break
                if common:
                    witness = min(common)
                    loggerInstance.logger.log_debug(f"strong coincidence at power {p}, letter {b}, {side}")
                    return Coincidence(True, p, b, side, (witness,))
    return Coincidence(False)


# ---------------------------------------------------------------------------
# Lazy words
# ---------------------------------------------------------------------------


class WordNode(ABC):
    length: int

    @abstractmethod
    def letter_at(self, index: int) -> int: ...

    @abstractmethod
    def iter_letters(self) -> Iterator[int]: ...

    def materialize(self) -> tuple[int, ...]:
        return tuple(self.iter_letters())

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(itertools.islice(self.iter_letters(), n))

    def _check(self, index: int) -> None:
        if not 0 <= index < self.length:
            raise IndexError(f"Index {index} outside word of length {self.length}")


class Letter(WordNode):
    def __init__(self, letter: int) -> None:
        self.letter = letter
        self.length = 1

    def letter_at(self, index: int) -> int:
        self._check(index)
        return self.letter

    def iter_letters(self) -> Iterator[int]:
        yield self.letter


class Power(WordNode):
    def __init__(self, base: WordNode, exponent: int) -> None:
        self.base = base
        self.exponent = exponent
        self.length = base.length * exponent

    def letter_at(self, index: int) -> int:
        self._check(index)
        return self.base.letter_at(index % self.base.length)

    def iter_letters(self) -> Iterator[int]:
        for _ in range(self.exponent):
            yield from self.base.iter_letters()


class Concat(WordNode):
    def __init__(self, parts: Sequence[WordNode]) -> None:
        self.parts = tuple(parts)
        self.offsets = list(itertools.accumulate((p.length for p in self.parts), initial=0))
        self.length = self.offsets[-1]

    def letter_at(self, index: int) -> int:
        self._check(index)
        i = bisect_right(self.offsets, index) - 1
        return self.parts[i].letter_at(index - self.offsets[i])

    def iter_letters(self) -> Iterator[int]:
        for p in self.parts:
            yield from p.iter_letters()


@dataclass(frozen=True)
class TowerFamily:
    """Names and heights of the level-n Rokhlin towers, indexed by letter 1..d.

    For d = 3 the towers are u_n, v_n, w_n in that order.
    """

    ks: KSequence
    n: int
    d: int
    names: tuple[WordNode, ...] = field(compare=False)
    heights: tuple[int, ...] = ()
    cutoff: int = DEFAULT_CUTOFF

    def word(self, letter: int) -> Optional[tuple[int, ...]]:
        """The materialized name, or None beyond the cutoff."""
        node = self.names[letter - 1]
        return node.materialize() if node.length <= self.cutoff else None

    @property
    def u(self) -> WordNode:
        return self.names[0]

    @property
    def v(self) -> WordNode:
        return self.names[1]

    @property
    def w(self) -> WordNode:
        return self.names[-1]


def tower_names(ks: KLike, n: int, cutoff: int = DEFAULT_CUTOFF, d: int = 3) -> TowerFamily:
    """Level-n names chi_{k_1} o ... o chi_{k_n}(a), built by the tower recursion.

    For d = 3: u_{n+1} = v_n, v_{n+1} = w_n u_n^{k_{n+1}}, w_{n+1} = w_n u_n^{k_{n+1}-1},
    from u_0 = 1, v_0 = 2, w_0 = 3.
    """
    seq = KSequence.of(ks)
    if not 0 <= n <= len(seq):
        raise ValueError(f"Level {n} outside 0..{len(seq)}")
    names: list[WordNode] = [Letter(a) for a in range(1, d + 1)]
    for k in seq.ks[:n]:
        sub = chi(d, k)
        new: list[WordNode] = []
        for a in range(1, d + 1):
            parts = [names[b - 1] if c == 1 else Power(names[b - 1], c) for b, c in sub.runs(a)]
            new.append(parts[0] if len(parts) == 1 else Concat(parts))
        names = new
    return TowerFamily(seq, n, d, tuple(names), tuple(node.length for node in names), cutoff)


def tower_lengths(ks: KLike, n: int, d: int = 3) -> tuple[int, ...]:
    """Heights at level n: transpose(A_d(k_1) ... A_d(k_n)) applied to (1, ..., 1)."""
    seq = KSequence.of(ks)
    if n == 0:
        return (1,) * d
    return tuple(int(h) for h in product(MatrixFamily.A, seq.ks[:n], d).transpose().apply((1,) * d))


def common_prefix_length(ks: KLike, n: int, d: int = 3) -> int:
    """Length of the longest common prefix of all level-n tower names.

    Computed on the run structure of the chi's, never on materialized words.
    """
    seq = KSequence.of(ks)
    lengths = [tower_lengths(seq, m, d) for m in range(n + 1)]

    @lru_cache(maxsize=None)
    def lcp(level: int, a: int, b: int) -> int:
        if a == b:
            return lengths[level][a - 1]
        if level == 0:
            return 0
        sub = chi(d, seq[level - 1])
        runs_a = list(sub.runs(a))
        runs_b = list(sub.runs(b))
        size = lengths[level - 1]
        total = 0
        i = j = 0
        while i < len(runs_a) and j < len(runs_b):
            la, ca = runs_a[i]
            lb, cb = runs_b[j]
            if la != lb:
                return total + lcp(level - 1, la, lb)
            step = min(ca, cb)
            total += step * size[la - 1]
            runs_a[i] = (la, ca - step)
            runs_b[j] = (lb, cb - step)
            if ca == step:
                i += 1
            if cb == step:
                j += 1
        return total

    letters = range(1, d + 1)
    return min(lcp(n, a, b) for a in letters for b in letters if a < b)


def veech_components(ks: KLike, t: Fraction, n: int, d: int = 3) -> tuple[Fraction, ...]:
    """Distance from t * h_i^{(n)} to the nearest integer, per tower."""
    t = Fraction(t)
    out: list[Fraction] = []
    for h in tower_lengths(ks, n, d):
        frac = (t * h) % 1
        out.append(min(frac, 1 - frac))
    return tuple(out)


def veech_residual(ks: KLike, t: Fraction, n: int, d: int = 3) -> Fraction:
    return max(veech_components(ks, t, n, d))


def balanced_times(
    ks: KLike,
    n_max: int,
    mass_eps: Union[Fraction, float],
    share_eps: Union[Fraction, float],
    d: int = 3,
) -> list[int]:
    """Levels n <= n_max where every tower mass is >= mass_eps and the names'
    common prefix covers at least share_eps of the shortest tower.

    Masses come from the point built by params_from_itinerary over the whole of ks.
    """
    seq = KSequence.of(ks)
    if n_max > len(seq):
        raise ValueError(f"n_max={n_max} exceeds the itinerary length {len(seq)}")
    mass_eps = Fraction(mass_eps)
    share_eps = Fraction(share_eps)
    out: list[int] = []
    for n in range(n_max + 1):
        masses = tower_masses(seq, d, n)
        share = Fraction(common_prefix_length(seq, n, d), min(tower_lengths(seq, n, d)))
        if min(masses) >= mass_eps and share >= share_eps:
            out.append(n)
    return out


def abelianization_power_lengths(s: Substitution, m: int) -> bool:
    """|s^m(j)| equals the j-th column sum of abelianization(s)^m."""
    sm = s.power(m)
    sums = abelianization(s).power(m).column_sums()
    return all(sm.image_length(j) == sums[j - 1] for j in range(1, s.d + 1))


def chi_abelianization_matches(d: int, k: int) -> bool:
    return abelianization(chi(d, k)) == a_matrix(d, k)
