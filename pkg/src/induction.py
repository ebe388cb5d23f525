"""
Rauzy-type induction on d-Bruin length vectors and the dual height induction.

Length vectors are indexed 0..d-1 in code (lambda_1..lambda_d in the usual
notation). One induction step is one of three cases:

* Expand (Case 1): lambda_1 > lambda_2 + ... + lambda_d; the first interval
  loses the others' total length. lambda = D lambda'.
* Reduce (Case 2): lambda_d < lambda_1 < lambda_2 + ... + lambda_d; the map
  reduces to one on three intervals and has finite type.
* Swap (Case 3): lambda_1 < lambda_d; cyclic relabelling with
  lambda'_d = lambda_d - lambda_1. lambda = C lambda'.

k - 1 Expand steps followed by one Swap form one accelerated step with
length matrix Z_d(k) = D^{k-1} C and height matrix transpose(A_d(k)).
"""

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .cocycles import (
    IntMatrix,
    KLike,
    KSequence,
    MatrixFamily,
    c_matrix,
    d_matrix,
    product,
    v_c_matrix,
    v_d_matrix,
    z_inverse,
    z_matrix,
    zt_matrix,
)
from .itm import ParameterError
from .log import loggerInstance
from .report import Report

Vector = tuple[Fraction, ...]


class BoundaryTie(ValueError):
    """An equality in a case test: the step is on a boundary and is not resolved."""

    def __init__(self, reason: str, step: int = 1) -> None:
        super().__init__(f"{reason} (step {step})")
        self.reason = reason
        self.step = step


class InsufficientPrecision(ValueError):
    """The requested precision is not reachable with the available depth."""


class CaseTag(Enum):
    EXPAND = "expand"
    REDUCE = "reduce"
    SWAP = "swap"


@dataclass(frozen=True)
class InductionStep:
    case_tag: CaseTag
    length_matrix: IntMatrix
    height_matrix: IntMatrix
    new_lambda: Vector


@dataclass(frozen=True)
class SuspensionState:
    lengths: Vector
    heights: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lengths", tuple(Fraction(x) for x in self.lengths))
        if len(self.lengths) != len(self.heights):
            raise ParameterError("Lengths and heights must have the same dimension")
        if any(h <= 0 for h in self.heights):
            raise ParameterError("Heights must be strictly positive")
        if any(x < 0 for x in self.lengths):
            raise ParameterError("Lengths must be nonnegative")

    @classmethod
    def initial(cls, lengths: Sequence[Union[Fraction, int]]) -> "SuspensionState":
        return cls(tuple(Fraction(x) for x in lengths), (1,) * len(lengths))


@dataclass(frozen=True)
class ZStep:
    """One accelerated step: k and the renormalized lengths Z_d(k)^{-1} lambda."""

    k: int
    lengths: Vector


@dataclass(frozen=True)
class Reduce:
    """Case 2 was reached after `expand_steps` Case-1 steps."""

    lengths: Vector
    expand_steps: int


@dataclass(frozen=True)
class ItineraryResult:
    ks: KSequence
    reduced_at: Optional[int] = None

    @property
    def completed(self) -> bool:
        return self.reduced_at is None

    def __str__(self) -> str:
        exit_kind = "Completed" if self.completed else f"Reduced({self.reduced_at})"
        return f"({self.ks}; {exit_kind})"


def _as_vector(lengths: Sequence[Union[Fraction, int]], d: int) -> Vector:
    if d < 3:
        raise ParameterError(f"d must be >= 3, got {d}")
    vec = tuple(Fraction(x) for x in lengths)
    if len(vec) != d:
        raise ParameterError(f"Expected {d} lengths, got {len(vec)}")
    if any(x < 0 for x in vec) or sum(vec) <= 0:
        raise ParameterError("Lengths must be nonnegative with positive total")
    return vec


def normalize(vec: Sequence[Union[Fraction, int]]) -> Vector:
    total = sum(vec)
    if total == 0:
        raise ParameterError("Cannot normalize a zero vector")
    return tuple(Fraction(x) / total for x in vec)


def r_step(lengths: Sequence[Union[Fraction, int]], d: int) -> InductionStep:
    """One Rauzy-type induction step on unnormalized lengths."""
    lam = _as_vector(lengths, d)
    head = lam[0]
    rest = sum(lam[1:])
    last = lam[d - 1]
    if head > rest:
        new = (head - rest,) + lam[1:]
        return InductionStep(CaseTag.EXPAND, d_matrix(d), v_d_matrix(d), new)
    if head == rest:
        raise BoundaryTie("lambda_1 equals the sum of the other lengths")
    if head < last:
        new = lam[1 : d - 1] + (head, last - head)
        return InductionStep(CaseTag.SWAP, c_matrix(d), v_c_matrix(d), new)
    if head == last:
        raise BoundaryTie("lambda_1 equals lambda_d")
    identity = IntMatrix.identity(d)
    return InductionStep(CaseTag.REDUCE, identity, identity, lam)


def z_step(lengths: Sequence[Union[Fraction, int]], d: int) -> Union[ZStep, Reduce]:
    """One accelerated step; the Case-1 run is fast-forwarded in one division."""
    lam = _as_vector(lengths, d)
    rest = sum(lam[1:])
    if rest == 0:
        raise BoundaryTie("all lengths but the first vanish")
    expand_steps = max(math.ceil(lam[0] / rest) - 1, 0)
    lam = (lam[0] - expand_steps * rest,) + lam[1:]
    step = r_step(lam, d)
    if step.case_tag is CaseTag.REDUCE:
        return Reduce(step.new_lambda, expand_steps)
    # The fast-forward leaves lambda_1 <= rest, so the step cannot be another Expand
    return ZStep(expand_steps + 1, normalize(step.new_lambda))


def itinerary(lengths: Sequence[Union[Fraction, int]], d: int, n: int) -> ItineraryResult:
    """Apply up to n accelerated steps, recording the k's; stop early on Case 2."""
    lam = _as_vector(lengths, d)
    ks: list[int] = []
    for i in range(n):
        try:
            result = z_step(lam, d)
        except BoundaryTie as e:
            raise BoundaryTie(e.reason, step=i + 1) from e
        if isinstance(result, Reduce):
            loggerInstance.logger.log_debug(f"itinerary: Case 2 reached at step {i + 1}")
            return ItineraryResult(KSequence(tuple(ks)), reduced_at=i + 1)
        ks.append(result.k)
        lam = result.lengths
    return ItineraryResult(KSequence(tuple(ks)))


def cone_columns(ks: KLike, d: int, depth: int) -> list[Vector]:
    """Normalized columns of Z_d(k_1) ... Z_d(k_depth): the vertices of the nested cone."""
    seq = KSequence.of(ks)
    if depth > len(seq):
        raise InsufficientPrecision(f"Itinerary of length {len(seq)} cannot reach depth {depth}")
    if depth == 0:
        return [tuple(Fraction(int(i == j)) for i in range(d)) for j in range(d)]
    m = product(MatrixFamily.Z, seq.prefix(depth), d)
    return [normalize(m.column(j)) for j in range(d)]


def params_from_itinerary(ks: KLike, d: int, depth: int) -> tuple[Vector, Fraction]:
    """A simplex point whose itinerary starts with ks[:depth], plus the cone diameter.

    The point is the normalized image of the barycenter, which lies strictly
    inside the cone, so the prefix is reproduced exactly. The bound is the
    sup-norm diameter of the cone's section by the simplex.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    columns = cone_columns(ks, d, depth)
    if depth == 0:
        return normalize((1,) * d), Fraction(1)
    m = product(MatrixFamily.Z, KSequence.of(ks).prefix(depth), d)
    point = normalize(m.apply((1,) * d))
    diameter = max(
        (max(abs(a - b) for a, b in zip(u, v)) for i, u in enumerate(columns) for v in columns[i + 1 :]),
        default=Fraction(0),
    )
    return point, diameter


def required_depth(ks: KLike, d: int, tolerance: Fraction) -> int:
    """Smallest depth whose cone diameter is at most tolerance."""
    seq = KSequence.of(ks)
    for depth in range(len(seq) + 1):
        if params_from_itinerary(seq, d, depth)[1] <= tolerance:
            return depth
    raise InsufficientPrecision(f"Diameter {tolerance} not reached within {len(seq)} steps")


def height_step(state: SuspensionState, k: int, d: int) -> SuspensionState:
    """h' = transpose(A_d(k)) h together with lambda' = Z_d(k)^{-1} lambda (unnormalized)."""
    if len(state.heights) != d:
        raise ParameterError(f"State has dimension {len(state.heights)}, expected {d}")
    heights = tuple(int(h) for h in zt_matrix(d, k).apply(state.heights))
    lengths = tuple(Fraction(x) for x in z_inverse(d, k).apply(state.lengths))
    if any(x < 0 for x in lengths):
        raise ParameterError(f"Lengths are not in the cone of Z_{d}({k}); the step does not apply")
    return SuspensionState(lengths, heights)


def area(state: SuspensionState) -> Fraction:
    """Total area <h, lambda> of the band complex."""
    return sum((h * x for h, x in zip(state.heights, state.lengths)), start=Fraction(0))


def area_sequence(ks: KLike, d: int, lengths: Sequence[Union[Fraction, int]]) -> list[Fraction]:
    """Areas after 0, 1, ..., len(ks) accelerated steps from heights (1, ..., 1)."""
    state = SuspensionState.initial(lengths)
    out = [area(state)]
    for k in KSequence.of(ks):
        state = height_step(state, k, d)
        out.append(area(state))
    return out


def tower_masses(ks: KLike, d: int, n: int, depth: Optional[int] = None) -> tuple[Fraction, ...]:
    """Relative masses h_i lambda_i / sum_j h_j lambda_j of the level-n towers.

    Base lengths at level n are proportional to Z(k_{n+1}) ... Z(k_depth) c
    for the barycenter c, i.e. to the renormalized lengths of the point built
    by params_from_itinerary(ks, d, depth).
    """
    seq = KSequence.of(ks)
    depth = len(seq) if depth is None else depth
    if not 0 <= n <= depth <= len(seq):
        raise ValueError(f"Need 0 <= n <= depth <= {len(seq)}, got n={n}, depth={depth}")
    base: tuple[Union[int, Fraction], ...] = (1,) * d
    if depth > n:
        base = product(MatrixFamily.Z, seq.ks[n:depth], d).apply(base)
    heights: tuple[Union[int, Fraction], ...] = (1,) * d
    if n > 0:
        heights = product(MatrixFamily.A, seq.ks[:n], d).transpose().apply(heights)
    weights = [Fraction(h) * Fraction(x) for h, x in zip(heights, base)]
    total = sum(weights)
    return tuple(w / total for w in weights)


def step_matrices(lengths: Sequence[Union[Fraction, int]], d: int, n: int) -> tuple[IntMatrix, IntMatrix, KSequence]:
    """Run n accelerated steps as single r_steps and accumulate both matrix products.

    Returns (length product, height product, itinerary). The length product is
    L with lambda = L lambda^{(n)}; the height product H maps the initial heights
    to the level-n heights.
    """
    lam = _as_vector(lengths, d)
    length_product = IntMatrix.identity(d)
    height_product = IntMatrix.identity(d)
    ks: list[int] = []
    for _ in range(n):
        expands = 0
        while True:
            step = r_step(lam, d)
            if step.case_tag is CaseTag.REDUCE:
                return length_product, height_product, KSequence(tuple(ks))
            length_product = length_product @ step.length_matrix
            height_product = step.height_matrix @ height_product
            lam = step.new_lambda
            if step.case_tag is CaseTag.SWAP:
                ks.append(expands + 1)
                break
            expands += 1
    return length_product, height_product, KSequence(tuple(ks))


def duality_check(ks: KLike, d: int) -> Report:
    """Single-step matrix products against the accelerated cocycles along ks."""
    seq = KSequence.of(ks)
    report = Report("duality")
    lengths, _ = params_from_itinerary(seq, d, len(seq))
    length_product, height_product, found = step_matrices(lengths, d, len(seq))
    report.check("itinerary-reproduced", found == seq, f"{found} vs {seq}")
    if found != seq:
        return report
    report.check("length-product", length_product == product(MatrixFamily.Z, seq, d), "Z_d(k_1)...Z_d(k_n)")
    report.check(
        "height-product",
        height_product == product(MatrixFamily.A, seq, d).transpose(),
        "transpose(A_d(k_1)...A_d(k_n))",
    )
    report.check(
        "accelerated-heights",
        all(zt_matrix(d, k) == v_c_matrix(d) @ v_d_matrix(d).power(k - 1) for k in set(seq.ks)),
        "V_C V_D^(k-1)",
    )
    report.check(
        "accelerated-lengths",
        all(z_matrix(d, k) == d_matrix(d).power(k - 1) @ c_matrix(d) for k in set(seq.ks)),
        "D^(k-1) C",
    )
    return report


def spectral_radius(m: IntMatrix) -> float:
    return float(max(abs(np.roots(m.charpoly_coeffs()))))


def area_check(k: int, d: int, steps: int, lookahead: int = 10, ratio_tolerance: Optional[float] = None) -> Report:
    """Area decay along the constant itinerary (k, k, ...).

    The step ratio tends to rho(A_d(k)) / rho(Z_d(k)); with ratio_tolerance
    set, the last ratio is checked against that limit.
    """
    report = Report("area")
    seq = KSequence.periodic((k,), steps + lookahead)
    lengths, _ = params_from_itinerary(seq, d, len(seq))
    areas = area_sequence(seq.prefix(steps), d, lengths)
    decreasing = all(b < a for a, b in zip(areas, areas[1:]))
    report.check("strictly-decreasing", decreasing, f"{steps} steps", "area decay for self-similar maps")
    ratio = float(areas[-1] / areas[-2])
    expected = spectral_radius(zt_matrix(d, k)) / spectral_radius(z_matrix(d, k))
    report.record("final_ratio", ratio)
    report.record("expected_ratio", expected)
    report.record("final_area", float(areas[-1]))
    if ratio_tolerance is not None:
        report.check(
            "ratio-limit",
            abs(ratio - expected) < ratio_tolerance,
            f"|{ratio:.6f} - {expected:.6f}| vs {ratio_tolerance}",
        )
    return report
