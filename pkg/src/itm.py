"""
Interval translation mappings over [0, 1) with exact rational arithmetic.

An ITM is a finite partition of [0, 1) into half-open intervals, each moved
by its own translation. Branch images may overlap, so the forward images
T^n [0, 1) shrink; their stabilization decides finite type.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

from .log import loggerInstance

Rational = Union[Fraction, int]

ZERO = Fraction(0)
ONE = Fraction(1)


class ParameterError(ValueError):
    """Parameters outside U_2 or the simplex, or a point outside [0, 1)."""


@dataclass(frozen=True)
class Interval:
    left: Fraction
    right: Fraction

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    def contains(self, x: Rational) -> bool:
        return self.left <= x < self.right

    def __str__(self) -> str:
        return f"[{self.left}, {self.right})"


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint, sorted, non-empty half-open intervals with adjacent pieces merged."""

    intervals: tuple[Interval, ...] = ()

    @classmethod
    def of(cls, pieces: Iterable[tuple[Rational, Rational]]) -> "IntervalSet":
        return cls._canonical(Interval(Fraction(a), Fraction(b)) for a, b in pieces)

    @classmethod
    def empty(cls) -> "IntervalSet":
        return cls(())

    @classmethod
    def full(cls) -> "IntervalSet":
        return cls((Interval(ZERO, ONE),))

    @classmethod
    def _canonical(cls, pieces: Iterable[Interval]) -> "IntervalSet":
        ordered = sorted((p for p in pieces if p.right > p.left), key=lambda p: (p.left, p.right))
        merged: list[Interval] = []
        for p in ordered:
            if merged and p.left <= merged[-1].right:
                last = merged[-1]
                merged[-1] = Interval(last.left, max(last.right, p.right))
            else:
                merged.append(p)
        return cls(tuple(merged))

    @property
    def measure(self) -> Fraction:
        return sum((p.length for p in self.intervals), start=ZERO)

    def is_empty(self) -> bool:
        return not self.intervals

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet._canonical(self.intervals + other.intervals)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out: list[Interval] = []
        i = j = 0
        a, b = self.intervals, other.intervals
        while i < len(a) and j < len(b):
            lo = max(a[i].left, b[j].left)
            hi = min(a[i].right, b[j].right)
            if lo < hi:
                out.append(Interval(lo, hi))
            if a[i].right < b[j].right:
                i += 1
            else:
                j += 1
        return IntervalSet._canonical(out)

    def is_subset(self, other: "IntervalSet") -> bool:
        return self.intersect(other) == self

    def contains(self, x: Rational) -> bool:
        return any(p.contains(x) for p in self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        return " U ".join(str(p) for p in self.intervals)


@dataclass(frozen=True)
class Branch:
    left: Fraction
    right: Fraction
    translation: Fraction

    @property
    def interval(self) -> Interval:
        return Interval(self.left, self.right)


@dataclass(frozen=True)
class ITM:
    branches: tuple[Branch, ...]
    degenerate: bool = False

    def __post_init__(self) -> None:
        if not self.branches:
            raise ParameterError("An ITM needs at least one branch")
        cursor = ZERO
        for b in self.branches:
            if b.left != cursor or b.right <= b.left:
                raise ParameterError("Branches must partition [0, 1) into non-empty intervals")
            if b.left + b.translation < 0 or b.right + b.translation > 1:
                raise ParameterError(f"Branch [{b.left}, {b.right}) is translated outside [0, 1)")
            cursor = b.right
        if cursor != ONE:
            raise ParameterError("Branches must cover [0, 1)")

    @classmethod
    def from_pieces(cls, pieces: Sequence[tuple[Rational, Rational, Rational]]) -> "ITM":
        """Build from (left, right, translation) triples, dropping empty pieces."""
        kept = [Branch(Fraction(l), Fraction(r), Fraction(t)) for l, r, t in pieces if r > l]
        return cls(tuple(kept), degenerate=len(kept) < len(pieces))

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return tuple(b.left for b in self.branches)

    @property
    def translations(self) -> tuple[Fraction, ...]:
        return tuple(b.translation for b in self.branches)

    def is_bijective(self) -> bool:
        return image(self, IntervalSet.full()) == IntervalSet.full()

    def __str__(self) -> str:
        parts = [f"[{b.left},{b.right})" + ("+" if b.translation >= 0 else "") + str(b.translation) for b in self.branches]
        return "ITM(" + ", ".join(parts) + ")"


@dataclass(frozen=True)
class BTParams:
    alpha: Fraction
    beta: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if not (1 >= self.alpha >= self.beta >= 0):
            raise ParameterError(f"(alpha, beta) = ({self.alpha}, {self.beta}) is outside U_2")

    def to_bruin(self) -> "BruinParams":
        return BruinParams(3, (1 - self.alpha, self.alpha - self.beta, self.beta))


@dataclass(frozen=True)
class BruinParams:
    d: int
    lengths: tuple[Fraction, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "lengths", tuple(Fraction(x) for x in self.lengths))
        if self.d < 3:
            raise ParameterError(f"d-Bruin maps need d >= 3, got {self.d}")
        if len(self.lengths) != self.d:
            raise ParameterError(f"Expected {self.d} lengths, got {len(self.lengths)}")
        if any(x < 0 for x in self.lengths) or sum(self.lengths) != 1:
            raise ParameterError(f"Lengths {tuple(str(x) for x in self.lengths)} are not in the simplex")

    @property
    def alphas(self) -> tuple[Fraction, ...]:
        """alpha_1, ..., alpha_{d-1} with alpha_i = 1 - (lambda_1 + ... + lambda_i)."""
        out: list[Fraction] = []
        acc = ONE
        for x in self.lengths[:-1]:
            acc -= x
            out.append(acc)
        return tuple(out)


def from_bt(p: BTParams) -> ITM:
    """The Bruin-Troubetzkoy map x+alpha, x+beta, x+beta-1 on [0,1-a), [1-a,1-b), [1-b,1)."""
    a, b = p.alpha, p.beta
    return ITM.from_pieces([(ZERO, 1 - a, a), (1 - a, 1 - b, b), (1 - b, ONE, b - 1)])


def from_bruin(p: BruinParams) -> ITM:
    """The d-Bruin map: branch i spans [1-alpha_{i-1}, 1-alpha_i) and moves by alpha_i."""
    alphas = p.alphas
    pieces: list[tuple[Rational, Rational, Rational]] = []
    previous = ONE
    for a in alphas:
        pieces.append((1 - previous, 1 - a, a))
        previous = a
    pieces.append((1 - alphas[-1], ONE, alphas[-1] - 1))
    return ITM.from_pieces(pieces)


def evaluate(m: ITM, x: Rational) -> Fraction:
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ParameterError(f"Point {x} is outside [0, 1)")
    for b in m.branches:
        if b.left <= x < b.right:
            return x + b.translation
    raise ParameterError(f"Point {x} is not covered by any branch")  # unreachable for valid maps


def image(m: ITM, s: IntervalSet) -> IntervalSet:
    """Exact forward image T(s)."""
    pieces: list[Interval] = []
    for b in m.branches:
        for p in s:
            lo = max(b.left, p.left)
            hi = min(b.right, p.right)
            if lo < hi:
                pieces.append(Interval(lo + b.translation, hi + b.translation))
    return IntervalSet._canonical(pieces)


def attractor_sequence(m: ITM, n: int) -> list[IntervalSet]:
    """[Omega_0, ..., Omega_n] with Omega_j = I cap TI cap ... cap T^j I.

    The images T^j I are nested, so Omega_j = T^j I and each term is the
    image of the previous one.
    """
    if n < 0:
        raise ValueError("Attractor depth must be >= 0")
    omegas = [IntervalSet.full()]
    for _ in range(n):
        omegas.append(image(m, omegas[-1]))
    return omegas


def attractor(m: ITM, n: int) -> IntervalSet:
    return attractor_sequence(m, n)[-1]


def attractor_by_intersection(m: ITM, n: int) -> IntervalSet:
    """Omega_n as the literal intersection of T^j I for j = 0..n."""
    current = IntervalSet.full()
    result = current
    for _ in range(n):
        current = image(m, current)
        result = result.intersect(current)
    return result


@dataclass(frozen=True)
class FiniteType:
    depth: int
    attractor: IntervalSet

    def __str__(self) -> str:
        return f"FiniteType({self.depth})"


@dataclass(frozen=True)
class Unresolved:
    max_depth: int
    attractor: IntervalSet

    def __str__(self) -> str:
        return f"Unresolved({self.max_depth})"


Classification = Union[FiniteType, Unresolved]


def classify(m: ITM, max_depth: int) -> Classification:
    """Smallest N <= max_depth - 1 with Omega_N = Omega_{N+1}, else Unresolved.

    Infinite type is a limit property; it is never concluded here.
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    previous = IntervalSet.full()
    for n in range(max_depth):
        current = image(m, previous)
        if current == previous:
            loggerInstance.logger.log_debug(f"classify: stabilized at depth {n} on {current}")
            return FiniteType(n, previous)
        previous = current
    loggerInstance.logger.log_debug(f"classify: no stabilization within depth {max_depth}")
    return Unresolved(max_depth, previous)


def make_itm(
    alpha: Optional[Rational] = None,
    beta: Optional[Rational] = None,
    lengths: Optional[Sequence[Rational]] = None,
    d: Optional[int] = None,
) -> ITM:
    """Build either a BT map from (alpha, beta) or a d-Bruin map from its lengths."""
    if lengths is not None:
        dim = d if d is not None else len(lengths)
        return from_bruin(BruinParams(dim, tuple(Fraction(x) for x in lengths)))
    if alpha is None or beta is None:
        raise ParameterError("Give either alpha and beta, or a length vector")
    return from_bt(BTParams(Fraction(alpha), Fraction(beta)))
