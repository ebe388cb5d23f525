"""
Exact integer matrix cocycles for Bruin-Troubetzkoy and d-Bruin ITMs.

All matrices are square with Python (arbitrary precision) integer entries.
Products are never approximated: entries grow exponentially along an
itinerary and every lemma checked here is an exact integer statement.

Index conventions: matrix rows and columns are 0-based in code. Letters,
towers and the elementary matrices E_ij / T_ij keep the 1-based indices of
the usual notation.
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Iterator, Optional, Sequence, Union

import numpy as np
import sympy
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from .log import loggerInstance
from .report import Report


class CocycleError(ArithmeticError):
    """An exact identity that must hold by construction did not."""


@dataclass(frozen=True)
class IntMatrix:
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rows)
        if n == 0 or any(len(r) != n for r in self.rows):
            raise ValueError("IntMatrix must be square and non-empty")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(v) for v in r) for r in rows))

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def zeros(cls, d: int) -> "IntMatrix":
        return cls(tuple((0,) * d for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.rows)

    def __getitem__(self, index: tuple[int, int]) -> int:
        i, j = index
        return self.rows[i][j]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if other.d != self.d:
            raise ValueError(f"Dimension mismatch: {self.d} vs {other.d}")
        cols = list(zip(*other.rows))
        return IntMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.rows)
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if other.d != self.d:
            raise ValueError(f"Dimension mismatch: {self.d} vs {other.d}")
        return IntMatrix(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows))
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + other.scale(-1)

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * a for a in r) for r in self.rows))

    def apply(self, v: Sequence[Union[int, Fraction]]) -> tuple[Union[int, Fraction], ...]:
        """Matrix-vector product M v."""
        if len(v) != self.d:
            raise ValueError(f"Vector of length {len(v)} for a {self.d}x{self.d} matrix")
        return tuple(sum((a * x for a, x in zip(r, v)), start=0) for r in self.rows)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def column_sums(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.rows))

    def is_nonnegative(self) -> bool:
        return all(a >= 0 for r in self.rows for a in r)

    def is_positive(self) -> bool:
        return all(a > 0 for r in self.rows for a in r)

    def is_identity(self) -> bool:
        return self == IntMatrix.identity(self.d)

    def to_lists(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def det(self) -> int:
        return int(DomainMatrix.from_list(self.to_lists(), ZZ).det())

    def charpoly_coeffs(self) -> tuple[int, ...]:
        """Coefficients of det(xI - M), leading first."""
        return tuple(int(c) for c in DomainMatrix.from_list(self.to_lists(), ZZ).charpoly())

    def inverse(self) -> "IntMatrix":
        """Exact inverse of a unimodular matrix."""
        return _unimodular_inverse(self)

    def power(self, n: int) -> "IntMatrix":
        base = self if n >= 0 else self.inverse()
        result = IntMatrix.identity(self.d)
        e = abs(n)
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def max_entry(self) -> int:
        return max(a for r in self.rows for a in r)

    def min_entry(self) -> int:
        return min(a for r in self.rows for a in r)

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.rows) + "]"


@dataclass(frozen=True)
class KSequence:
    """An itinerary (k_1, k_2, ...) of the accelerated induction, every k_i >= 1."""

    ks: tuple[int, ...]

    def __post_init__(self) -> None:
        bad = [k for k in self.ks if k < 1]
        if bad:
            raise ValueError(f"Itinerary entries must be >= 1, got {bad[0]}")

    @classmethod
    def of(cls, ks: Union["KSequence", Iterable[int]]) -> "KSequence":
        return ks if isinstance(ks, KSequence) else cls(tuple(int(k) for k in ks))

    @classmethod
    def periodic(cls, pattern: Sequence[int], length: int) -> "KSequence":
        if not pattern:
            raise ValueError("Periodic itinerary needs a non-empty pattern")
        return cls(tuple(pattern[i % len(pattern)] for i in range(length)))

    def prefix(self, n: int) -> "KSequence":
        return KSequence(self.ks[:n])

    def __len__(self) -> int:
        return len(self.ks)

    def __iter__(self) -> Iterator[int]:
        return iter(self.ks)

    def __getitem__(self, i: int) -> int:
        return self.ks[i]

    def __str__(self) -> str:
        return ",".join(str(k) for k in self.ks)


KLike = Union[KSequence, Sequence[int]]


def _check_dk(d: int, k: int) -> None:
    if d < 3:
        raise ValueError(f"Dimension must be >= 3, got {d}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")


@lru_cache(maxsize=4096)
def a_matrix(d: int, k: int) -> IntMatrix:
    """A_d(k), the abelianization of the d-Bruin substitution chi_k."""
    _check_dk(d, k)
    rows = [[0] * d for _ in range(d)]
    rows[0][d - 2] = k
    rows[0][d - 1] = k - 1
    for i in range(1, d - 1):
        rows[i][i - 1] = 1
    rows[d - 1][d - 2] = 1
    rows[d - 1][d - 1] = 1
    return IntMatrix.from_rows(rows)


@lru_cache(maxsize=4096)
def a_inverse(d: int, k: int) -> IntMatrix:
    """Closed form of A_d(k)^{-1}."""
    _check_dk(d, k)
    rows = [[0] * d for _ in range(d)]
    for i in range(d - 2):
        rows[i][i + 1] = 1
    rows[d - 2][0] = 1
    rows[d - 2][d - 1] = -(k - 1)
    rows[d - 1][0] = -1
    rows[d - 1][d - 1] = k
    return IntMatrix.from_rows(rows)


@lru_cache(maxsize=4096)
def b3_matrix(k: int) -> IntMatrix:
    _check_dk(3, k)
    return IntMatrix.from_rows([[0, 1, 0], [1, 0, 1], [k - 1, 0, k]])


@lru_cache(maxsize=4096)
def z_matrix(d: int, k: int) -> IntMatrix:
    """Z_d(k) = D_d^{k-1} C_d, the length matrix of one accelerated step."""
    _check_dk(d, k)
    rows = [[0] * d for _ in range(d)]
    rows[0] = [k - 1] * d
    rows[0][d - 2] = k
    for i in range(1, d - 1):
        rows[i][i - 1] = 1
    rows[d - 1][d - 2] = 1
    rows[d - 1][d - 1] = 1
    return IntMatrix.from_rows(rows)


@lru_cache(maxsize=4096)
def z_inverse(d: int, k: int) -> IntMatrix:
    return z_matrix(d, k).inverse()


def zt_matrix(d: int, k: int) -> IntMatrix:
    """The height matrix of one accelerated step, the transpose of A_d(k)."""
    return a_matrix(d, k).transpose()


@lru_cache(maxsize=64)
def d_matrix(d: int) -> IntMatrix:
    """Length matrix of one Case-1 step: lambda = D lambda'."""
    rows = IntMatrix.identity(d).to_lists()
    for j in range(1, d):
        rows[0][j] = 1
    return IntMatrix.from_rows(rows)


@lru_cache(maxsize=64)
def c_matrix(d: int) -> IntMatrix:
    """Length matrix of one Case-3 step (cyclic relabelling)."""
    rows = [[0] * d for _ in range(d)]
    rows[0][d - 2] = 1
    for i in range(1, d - 1):
        rows[i][i - 1] = 1
    rows[d - 1][d - 2] = 1
    rows[d - 1][d - 1] = 1
    return IntMatrix.from_rows(rows)


@lru_cache(maxsize=64)
def v_d_matrix(d: int) -> IntMatrix:
    """Height matrix of one Case-1 step: the first band is stacked on the last."""
    rows = IntMatrix.identity(d).to_lists()
    rows[d - 1][0] = 1
    return IntMatrix.from_rows(rows)


@lru_cache(maxsize=64)
def v_c_matrix(d: int) -> IntMatrix:
    """Height matrix of one Case-3 step: shift plus one top-stacking."""
    rows = [[0] * d for _ in range(d)]
    for i in range(d - 2):
        rows[i][i + 1] = 1
    rows[d - 2][0] = 1
    rows[d - 2][d - 1] = 1
    rows[d - 1][d - 1] = 1
    return IntMatrix.from_rows(rows)


@lru_cache(maxsize=64)
def j_matrix(d: int) -> IntMatrix:
    """J_d: antidiagonal block on the first d-1 coordinates, last row all -1."""
    rows = [[0] * d for _ in range(d)]
    for i in range(d - 1):
        rows[i][d - 2 - i] = 1
    rows[d - 1] = [-1] * d
    return IntMatrix.from_rows(rows)


O_MATRIX = IntMatrix.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, -1]])
P3_MATRIX = IntMatrix.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
# Columns e3, e2+e3, e1+e2
Q_MATRIX = IntMatrix.from_rows([[0, 0, 1], [0, 1, 1], [1, 1, 0]])
V_A_MATRIX = v_d_matrix(3)
V_CA_MATRIX = IntMatrix.from_rows([[1, 0, 1], [0, 1, 0], [0, 0, 1]])


def elementary_e(d: int, i: int, j: int) -> IntMatrix:
    """E_ij (1-based)."""
    if not (1 <= i <= d and 1 <= j <= d):
        raise ValueError(f"Index ({i},{j}) out of range for d={d}")
    rows = [[0] * d for _ in range(d)]
    rows[i - 1][j - 1] = 1
    return IntMatrix.from_rows(rows)


class MatrixFamily(Enum):
    A = "A"
    B3 = "B3"
    Z = "Z"
    ZT = "ZT"
    A_INV = "AINV"

    def matrix(self, d: int, k: int) -> IntMatrix:
        if self is MatrixFamily.A:
            return a_matrix(d, k)
        if self is MatrixFamily.B3:
            if d != 3:
                raise ValueError("The B family is only defined for d=3")
            return b3_matrix(k)
        if self is MatrixFamily.Z:
            return z_matrix(d, k)
        if self is MatrixFamily.ZT:
            return zt_matrix(d, k)
        return a_inverse(d, k)

    @property
    def nonnegative(self) -> bool:
        return self is not MatrixFamily.A_INV

    @classmethod
    def parse(cls, name: str) -> "MatrixFamily":
        for member in cls:
            if name.upper() in (member.value, member.name):
                return member
        raise ValueError(f"Unknown matrix family {name!r}")


def product(family: MatrixFamily, ks: KLike, d: int) -> IntMatrix:
    """The ordered product M(k_1) M(k_2) ... M(k_n)."""
    seq = KSequence.of(ks)
    if len(seq) == 0:
        raise ValueError("product needs a non-empty itinerary")
    return reduce(lambda acc, k: acc @ family.matrix(d, k), seq.ks[1:], family.matrix(d, seq[0]))


def prefix_products(family: MatrixFamily, ks: KLike, d: int) -> Iterator[IntMatrix]:
    """Yield M(k_1), M(k_1)M(k_2), ... without recomputing shared prefixes."""
    acc: Optional[IntMatrix] = None
    for k in KSequence.of(ks):
        m = family.matrix(d, k)
        acc = m if acc is None else acc @ m
        yield acc


def cnorm(m: IntMatrix) -> int:
    """Largest column L1 norm of a nonnegative matrix."""
    if not m.is_nonnegative():
        raise ValueError("cnorm is defined on nonnegative matrices only")
    return max(m.column_sums())


def matrix_order_lt(a: IntMatrix, z: IntMatrix) -> bool:
    """A < Z: entrywise <= with at least one strict entry."""
    if a.d != z.d:
        raise ValueError(f"Dimension mismatch: {a.d} vs {z.d}")
    pairs = [(x, y) for ra, rz in zip(a.rows, z.rows) for x, y in zip(ra, rz)]
    return all(x <= y for x, y in pairs) and any(x < y for x, y in pairs)


# ---------------------------------------------------------------------------
# d = 3 column recursions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecursionTriple:
    """(x_j, y_j, z_j) and (a_j, b_j, c_j) for j = 1..n, index 0 holding j = 1.

    Triple j is the designated column of the product of the last j factors:
    column 2 of A_3(k_{n-j+1}) ... A_3(k_n) and column 3 of the B_3 product.
    """

    ks: KSequence
    xyz: tuple[tuple[int, int, int], ...] = field(default=())
    abc: tuple[tuple[int, int, int], ...] = field(default=())


def recursion_sequences(ks: KLike) -> RecursionTriple:
    seq = KSequence.of(ks)
    n = len(seq)
    if n == 0:
        raise ValueError("recursion_sequences needs a non-empty itinerary")
    kn = seq[n - 1]
    xyz = [(kn, 0, 1)]
    abc = [(0, 1, kn)]
    for j in range(1, n):
        k = seq[n - 1 - j]
        x, y, z = xyz[-1]
        a, b, c = abc[-1]
        xyz.append(((k - 1) * z + k * y, x, y + z))
        abc.append((b, a + c, (k - 1) * a + k * c))

    triple = RecursionTriple(seq, tuple(xyz), tuple(abc))
    if xyz[-1] != product(MatrixFamily.A, seq, 3).column(1):
        raise CocycleError(f"x,y,z recursion disagrees with column 2 of the A product for {seq}")
    if abc[-1] != product(MatrixFamily.B3, seq, 3).column(2):
        raise CocycleError(f"a,b,c recursion disagrees with column 3 of the B product for {seq}")
    return triple


def verify_column_growth(ks: KLike) -> Report:
    """Check, for every prefix, which column of the A_3 and B_3 products is largest."""
    seq = KSequence.of(ks)
    report = Report("column-growth")
    a_fail: Optional[int] = None
    b_fail: Optional[int] = None
    aux_a_fail: Optional[int] = None
    aux_b_fail: Optional[int] = None
    for n, (pa, pb) in enumerate(
        zip(prefix_products(MatrixFamily.A, seq, 3), prefix_products(MatrixFamily.B3, seq, 3)),
        start=1,
    ):
        sa = pa.column_sums()
        sb = pb.column_sums()
        if a_fail is None and sa[1] < max(sa):
            a_fail = n
        if b_fail is None and sb[2] < max(sb):
            b_fail = n
        if aux_a_fail is None and sa[0] + sa[2] < sa[1]:
            aux_a_fail = n
        if aux_b_fail is None and sb[1] + sb[2] < sb[0]:
            aux_b_fail = n

    def detail(fail: Optional[int]) -> str:
        return "all prefixes" if fail is None else f"fails at prefix {fail}"

    report.check("a-column-2-largest", a_fail is None, detail(a_fail), "column growth lemma")
    report.check("b-column-3-largest", b_fail is None, detail(b_fail), "column growth lemma")
    report.check("a-aux-inequality", aux_a_fail is None, detail(aux_a_fail), "|v1+v3| >= |v2|")
    report.check("b-aux-inequality", aux_b_fail is None, detail(aux_b_fail), "|v2+v3| >= |v1|")
    report.record("ks", seq.ks)
    return report


def random_column_growth(n_sequences: int, max_length: int, max_k: int, seed: int) -> Report:
    """Column growth and recursion agreement over seeded random itineraries."""
    rng = np.random.default_rng(seed)
    report = Report("column-growth")
    failures: list[tuple[int, ...]] = []
    recursion_failures: list[tuple[int, ...]] = []
    for _ in range(n_sequences):
        length = int(rng.integers(1, max_length + 1))
        ks = tuple(int(k) for k in rng.integers(1, max_k + 1, size=length))
        if not verify_column_growth(ks).passed:
            failures.append(ks)
        try:
            recursion_sequences(ks)
        except CocycleError:
            recursion_failures.append(ks)
    report.check(
        "random-prefixes",
        not failures,
        f"{n_sequences} itineraries, length <= {max_length}, k <= {max_k}",
        "column growth lemma",
    )
    report.check("recursions-match-products", not recursion_failures, f"{len(recursion_failures)} mismatches")
    report.record("n_sequences", n_sequences)
    report.record("seed", seed)
    if failures:
        report.record("first_failure", failures[0])
    return report


def check_domination(ks: KLike, M: Fraction, j0: int) -> Report:
    """a_j >= M z_j, b_j >= M(y_j+z_j), c_j >= M(x_j+y_j) at j0 and beyond.

    j0 is 1-based. When the inequalities hold at j0 they are checked at every
    later index, and the column-norm conclusion cnorm(A) <= cnorm(B)/M is
    checked on the full product.
    """
    seq = KSequence.of(ks)
    M = Fraction(M)
    report = Report("domination")
    triple = recursion_sequences(seq)
    n = len(seq)
    if not 1 <= j0 <= n:
        raise ValueError(f"j0 must lie in 1..{n}, got {j0}")

    def holds(j: int) -> bool:
        x, y, z = triple.xyz[j - 1]
        a, b, c = triple.abc[j - 1]
        return a >= M * z and b >= M * (y + z) and c >= M * (x + y)

    at_start = holds(j0)
    report.check("holds-at-j0", at_start, f"j0={j0}, M={M}", "domination lemma")
    if not at_start:
        return report
    broken = [j for j in range(j0, n + 1) if not holds(j)]
    report.check("persists", not broken, "every j >= j0" if not broken else f"breaks at j={broken[0]}")

    x, y, z = triple.xyz[-1]
    a, b, c = triple.abc[-1]
    # Independent route: the full products themselves
    norm_a = cnorm(product(MatrixFamily.A, seq, 3))
    norm_b = cnorm(product(MatrixFamily.B3, seq, 3))
    report.check("closed-form-columns", norm_a == x + y + z and norm_b == a + b + c)
    if M > 0:
        report.check("cnorm-conclusion", norm_a * M <= norm_b, f"cnorm(A)={norm_a}, cnorm(B)={norm_b}")
    else:
        report.skip("cnorm-conclusion", "M = 0 gives no bound")
    report.record("M", M)
    report.record("j0", j0)
    return report


def pf_constants(search_limit: int, reference: tuple[int, Fraction] = (15, Fraction(8997, 4334))) -> Report:
    """Compare min entries of B_3(2)^m against max entries of A_3(2)^m.

    Asserts only that some m <= search_limit has minB/maxA > 2; the reference
    pair (m, M') is evaluated and recorded without being asserted.
    """
    if search_limit < 1:
        raise ValueError("search_limit must be >= 1")
    report = Report("pf")
    a2 = a_matrix(3, 2)
    b2 = b3_matrix(2)
    pa = IntMatrix.identity(3)
    pb = IntMatrix.identity(3)
    table: list[dict[str, object]] = []
    found: Optional[int] = None
    ratio_at_found: Optional[Fraction] = None
    ref_m, ref_M = reference
    ref_holds: Optional[bool] = None
    for m in range(1, max(search_limit, ref_m) + 1):
        pa = pa @ a2
        pb = pb @ b2
        max_a = pa.max_entry()
        min_b = pb.min_entry()
        if m <= search_limit:
            table.append({"m": m, "max_a": max_a, "min_b": min_b})
            if found is None and min_b > 2 * max_a:
                found = m
                ratio_at_found = Fraction(min_b, max_a)
        if m == ref_m:
            ref_holds = min_b * ref_M.denominator >= ref_M.numerator * max_a
    report.check(
        "exists-m-with-ratio-above-2",
        found is not None,
        f"smallest m = {found}" if found is not None else f"none up to m = {search_limit}",
        "Perron-Frobenius constant lemma",
    )
    report.record("smallest_m", found)
    report.record("ratio_at_smallest_m", ratio_at_found)
    report.record("table", table)
    report.record("reference_pair", {"m": ref_m, "M_prime": ref_M, "holds": ref_holds})
    report.note(f"reference pair (m={ref_m}, M'={ref_M}) evaluated: {ref_holds}")
    loggerInstance.logger.log_debug(f"pf_constants: smallest m={found}, reference holds={ref_holds}")
    return report


def conjugation_check_d3(k: int) -> Report:
    """inverse(Q) B_3(k) Q = Z_3(k) with Q the base (e3, e2+e3, e1+e2)."""
    report = Report("conjugation-d3")
    b = b3_matrix(k)
    z = z_matrix(3, k)
    report.check(
        f"base-change-k{k}",
        Q_MATRIX.inverse() @ b @ Q_MATRIX == z,
        provenance="base change lemma",
    )
    report.check(f"charpoly-k{k}", b.charpoly_coeffs() == z.charpoly_coeffs())
    return report


def o_conjugation_holds(k: int) -> bool:
    """O A_3(k)^{-1} O^{-1} = B_3(k)^T."""
    return O_MATRIX @ a_inverse(3, k) @ O_MATRIX.inverse() == b3_matrix(k).transpose()


def j_conjugation_holds(d: int, k: int) -> bool:
    """Z_d(k) = J_d A_d(k)^{-1} J_d^{-1}."""
    j = j_matrix(d)
    return j @ a_inverse(d, k) @ j.inverse() == z_matrix(d, k)


def conjugation_suite(kmax: int, dmax: int = 8) -> Report:
    report = Report("conjugation")
    q_bad = [k for k in range(1, kmax + 1) if not conjugation_check_d3(k).passed]
    report.check("base-change-d3", not q_bad, f"k=1..{kmax}" if not q_bad else f"fails at k={q_bad[0]}")
    o_bad = [k for k in range(1, kmax + 1) if not o_conjugation_holds(k)]
    report.check("octant-conjugation", not o_bad, f"k=1..{kmax}")
    j_bad = [(d, k) for d in range(3, dmax + 1) for k in range(1, kmax + 1) if not j_conjugation_holds(d, k)]
    report.check("j-conjugation", not j_bad, f"d=3..{dmax}, k=1..{kmax}" if not j_bad else f"fails at {j_bad[0]}")
    zt_bad = [
        (d, k)
        for d in range(3, dmax + 1)
        for k in range(1, kmax + 1)
        if zt_matrix(d, k) != a_matrix(d, k).transpose()
        or v_c_matrix(d) @ v_d_matrix(d).power(k - 1) != zt_matrix(d, k)
        or d_matrix(d).power(k - 1) @ c_matrix(d) != z_matrix(d, k)
    ]
    report.check("height-and-length-factorizations", not zt_bad, f"d=3..{dmax}, k=1..{kmax}")
    det_bad = [
        (d, k) for d in range(3, dmax + 1) for k in range(1, kmax + 1) if a_matrix(d, k).det() != (-1) ** d
    ]
    report.check("determinant-sign", not det_bad, "det A_d(k) = (-1)^d")
    report.check(
        "d3-factors",
        V_A_MATRIX == v_d_matrix(3) and P3_MATRIX @ V_CA_MATRIX == v_c_matrix(3),
        "V_A and P_3 V_CA",
    )
    return report


def cnorm_ratio_check(kmax: int) -> Report:
    """1 <= cnorm(A_3(k)) / cnorm(Z_3(k)) < 2 for k = 1..kmax."""
    report = Report("cnorm-ratio")
    bad = [
        k
        for k in range(1, kmax + 1)
        if not (1 <= Fraction(cnorm(a_matrix(3, k)), cnorm(z_matrix(3, k))) < 2)
    ]
    report.check("ratio-in-[1,2)", not bad, f"k=1..{kmax}" if not bad else f"fails at k={bad[0]}")
    return report


def order_suite(kmax: int, dims: Sequence[int] = (3, 4)) -> Report:
    """A_d(k) < Z_d(k) entrywise; at k = 1 the two matrices coincide."""
    report = Report("order")
    for d in dims:
        strict_bad = [k for k in range(2, kmax + 1) if not matrix_order_lt(a_matrix(d, k), z_matrix(d, k))]
        report.check(f"a-below-z-d{d}", not strict_bad, f"k=2..{kmax}", "matrix order definition")
        report.check(f"equal-at-k1-d{d}", a_matrix(d, 1) == z_matrix(d, 1))
    return report


def loop_domination(d: int, loop: KLike, p: int = 3) -> Report:
    """Largest K with K * A_bar <= Z_bar entrywise, A_bar = (A-product of loop)^p."""
    seq = KSequence.of(loop)
    report = Report("loop-domination")
    a_loop = product(MatrixFamily.A, seq, d)
    if not a_loop.is_positive():
        report.check("loop-positive", False, f"A-product of {seq} has zero entries")
        return report
    a_bar = a_loop.power(p)
    z_bar = product(MatrixFamily.Z, seq, d).power(p)
    K = min(Fraction(zv, av) for ra, rz in zip(a_bar.rows, z_bar.rows) for av, zv in zip(ra, rz))
    report.check("loop-positive", True)
    report.check("K-above-1", K > 1, f"K={K}", "criterion domination lemma")
    report.record("K", K)
    return report


@lru_cache(maxsize=1024)
def _unimodular_inverse(m: IntMatrix) -> IntMatrix:
    if abs(m.det()) != 1:
        raise ValueError("Only determinant +-1 matrices have integer inverses")
    inv = sympy.Matrix(m.to_lists()).inv()
    return IntMatrix.from_rows([[int(inv[i, j]) for j in range(m.d)] for i in range(m.d)])
