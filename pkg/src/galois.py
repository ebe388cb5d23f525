"""
Exact characteristic polynomials and Galois certificates for degrees 3 and 4.

Polynomials are integer coefficient tuples, highest degree first. All
arithmetic is delegated to sympy over ZZ; nothing here touches floats.
"""

from dataclasses import dataclass
from enum import Enum
from math import isqrt, lcm
from typing import Optional, Sequence

from sympy import Poly, Symbol, cyclotomic_poly, divisors, sturm, totient
from sympy.ntheory.primetest import is_square

from .cocycles import IntMatrix, a_matrix
from .log import loggerInstance
from .report import Report

X = Symbol("x")
Y = Symbol("y")


@dataclass(frozen=True)
class PolyZ:
    coeffs: tuple[int, ...]
    var: str = "x"

    def __post_init__(self) -> None:
        coeffs = tuple(int(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[0] == 0:
            coeffs = coeffs[1:]
        if not coeffs or (len(coeffs) > 1 and coeffs[0] == 0):
            raise ValueError("Polynomial needs a nonzero leading coefficient")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def of(cls, coeffs: Sequence[int], var: str = "x") -> "PolyZ":
        return cls(tuple(coeffs), var)

    @classmethod
    def from_sympy(cls, p: Poly, var: str = "x") -> "PolyZ":
        return cls(tuple(int(c) for c in p.all_coeffs()), var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[0] == 1

    def to_sympy(self) -> Poly:
        return Poly(list(self.coeffs), Symbol(self.var), domain="ZZ")

    def __call__(self, x: int) -> int:
        acc = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr())


class GaloisGroup(Enum):
    S3 = "S3"
    S4 = "S4"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class GaloisReport:
    poly: PolyZ
    irreducible: bool
    discriminant: int
    disc_is_square: bool
    all_roots_real: bool
    resolvent: Optional[PolyZ]
    group: GaloisGroup
    pinching: bool

    def __str__(self) -> str:
        verdict = "pinching" if self.pinching else "not pinching"
        return f"{self.poly}: disc={self.discriminant}, group={self.group.value}, {verdict}"


def charpoly(m: IntMatrix) -> PolyZ:
    return PolyZ(m.charpoly_coeffs())


def discriminant(p: PolyZ) -> int:
    """Discriminant with the (-1)^(n(n-1)/2) Res(p, p') / lc normalization."""
    if p.degree < 2:
        raise ValueError("Discriminant needs degree >= 2")
    return int(p.to_sympy().discriminant())


def resolvent_cubic(p: PolyZ) -> PolyZ:
    """Resolvent whose roots are r1 r2 + r3 r4 and its two re-pairings.

    For x^4 + a x^3 + b x^2 + c x + d this is
    y^3 - b y^2 + (ac - 4d) y - (a^2 d - 4bd + c^2).
    """
    if p.degree != 4:
        raise ValueError(f"Resolvent cubic needs a quartic, got degree {p.degree}")
    if not p.is_monic:
        raise ValueError("Resolvent cubic needs a monic quartic")
    _, a, b, c, d = p.coeffs
    return PolyZ((1, -b, a * c - 4 * d, -(a * a * d - 4 * b * d + c * c)), var="y")


def _integer_roots(p: PolyZ) -> list[int]:
    constant = p.coeffs[-1]
    if constant == 0:
        return [0]
    candidates = [s * q for q in divisors(abs(constant)) for s in (1, -1)]
    return [r for r in candidates if p(r) == 0]


def _quadratic_factor(p: PolyZ) -> Optional[tuple[PolyZ, PolyZ]]:
    """Monic integer quadratics (x^2+ax+b)(x^2+cx+d) = p, if any."""
    _, A, B, C, E = p.coeffs
    for b in [s * q for q in divisors(abs(E)) for s in (1, -1)]:
        d = E // b
        # a + c = A, ac = B - b - d
        disc = A * A - 4 * (B - b - d)
        if disc < 0 or isqrt(disc) ** 2 != disc:
            continue
        root = isqrt(disc)
        if (A + root) % 2:
            continue
        for a in {(A + root) // 2, (A - root) // 2}:
            c = A - a
            if a * c == B - b - d and a * d + b * c == C:
                return PolyZ((1, a, b)), PolyZ((1, c, d))
    return None


def irreducible_over_Q(p: PolyZ) -> bool:
    """Rational root test, then a search for monic integer quadratic factors of quartics."""
    if p.degree > 4:
        raise ValueError(f"Irreducibility is only decided up to degree 4, got {p.degree}")
    if not p.is_monic:
        raise ValueError("irreducible_over_Q expects a monic polynomial")
    if p.degree <= 1:
        return p.degree == 1
    if _integer_roots(p):
        return False
    if p.degree == 4 and p.coeffs[-1] != 0:
        return _quadratic_factor(p) is None
    return True


def _is_squarefree(p: PolyZ) -> bool:
    sp = p.to_sympy()
    return sp.gcd(sp.diff()).degree() == 0


def _sign_changes(values: Sequence[int]) -> int:
    signs = [v for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def real_root_count(p: PolyZ) -> int:
    """Distinct real roots from Sturm sign variations at -inf and +inf."""
    chain = [q for q in sturm(p.to_sympy()) if not q.is_zero]
    at_plus = [1 if q.LC() > 0 else -1 for q in chain]
    at_minus = [s * (-1 if q.degree() % 2 else 1) for s, q in zip(at_plus, chain)]
    return _sign_changes(at_minus) - _sign_changes(at_plus)


def all_roots_real(p: PolyZ) -> bool:
    if not _is_squarefree(p):
        raise ValueError(f"{p} is not squarefree")
    if p.degree == 3:
        return discriminant(p) > 0
    return real_root_count(p) == p.degree


def galois_certificate(p: PolyZ) -> GaloisReport:
    if p.degree not in (3, 4):
        raise ValueError(f"Galois certificates cover degrees 3 and 4, got {p.degree}")
    if not irreducible_over_Q(p):
        raise ValueError(f"{p} is reducible over Q")
    disc = discriminant(p)
    square = bool(is_square(disc)) if disc >= 0 else False
    real = all_roots_real(p)
    resolvent: Optional[PolyZ] = None
    group = GaloisGroup.UNDETERMINED
    if p.degree == 3:
        if not square:
            group = GaloisGroup.S3
    else:
        resolvent = resolvent_cubic(p)
        if not square and irreducible_over_Q(resolvent):
            group = GaloisGroup.S4
    full = GaloisGroup.S3 if p.degree == 3 else GaloisGroup.S4
    return GaloisReport(p, True, disc, square, real, resolvent, group, real and group is full)


def is_pinching(m: IntMatrix) -> GaloisReport:
    """Irreducible charpoly, all roots real and Galois group S_d, for d in {3, 4}.

    A reducible charpoly yields a report with pinching False and an
    undetermined group instead of an error.
    """
    if m.d not in (3, 4):
        raise ValueError(f"Pinching is decided for d = 3 or 4, got {m.d}")
    p = charpoly(m)
    if not irreducible_over_Q(p):
        disc = discriminant(p)
        return GaloisReport(
            p,
            False,
            disc,
            bool(is_square(disc)) if disc >= 0 else False,
            real_root_count(p) == p.degree,
            resolvent_cubic(p) if p.degree == 4 else None,
            GaloisGroup.UNDETERMINED,
            False,
        )
    return galois_certificate(p)


def cyclotomic_indices(p: PolyZ) -> Optional[list[int]]:
    """Indices j with every irreducible factor of p equal to Phi_j, or None."""
    _, factors = p.to_sympy().factor_list()
    indices: list[int] = []
    for f, _mult in factors:
        e = f.degree()
        match = next(
            (j for j in range(1, 2 * e * e + 3) if totient(j) == e and f == Poly(cyclotomic_poly(j, f.gen), f.gen)),
            None,
        )
        if match is None:
            return None
        indices.append(match)
    return indices


def has_infinite_order(m: IntMatrix) -> bool:
    """A non-cyclotomic charpoly certifies infinite order; otherwise M^L != I does,
    with L the lcm of the cyclotomic indices."""
    indices = cyclotomic_indices(charpoly(m))
    if indices is None:
        return True
    return not m.power(lcm(*indices)).is_identity()


def aux_checks(m: IntMatrix, n: IntMatrix) -> Report:
    report = Report("aux")
    commute = (m @ n) == (n @ m)
    report.record("commute", commute)
    report.check("non-commuting", not commute, "MN != NM" if not commute else "MN = NM")
    for label, mat in (("first", m), ("second", n)):
        infinite = has_infinite_order(mat)
        report.record(f"{label}_infinite_order", infinite)
        report.check(f"{label}-infinite-order", infinite)
    return report


def galois_suite(kmax: int = 100) -> Report:
    """Exact facts behind the pinching and Zariski-density hypotheses."""
    report = Report("galois")
    p3 = charpoly(a_matrix(3, 3))
    report.check("disc-p3", discriminant(p3) == 148, f"disc = {discriminant(p3)}")

    bad = [k for k in range(1, kmax + 1) if discriminant(charpoly(a_matrix(3, k))) != 4 * k**3 + k**2 + 18 * k - 23]
    report.check("disc-formula", not bad, f"k = 1..{kmax}" if not bad else f"first mismatch at k = {bad[0]}")
    wrong_poly = [k for k in range(1, kmax + 1) if charpoly(a_matrix(3, k)).coeffs != (1, -1, -k, 1)]
    report.check("charpoly-d3", not wrong_poly, f"x^3 - x^2 - kx + 1 for k = 1..{kmax}")
    real = [k for k in range(2, kmax + 1) if all_roots_real(charpoly(a_matrix(3, k)))]
    report.check("real-roots-d3", len(real) == kmax - 1, "k = 2..kmax")

    p42 = charpoly(a_matrix(4, 2))
    report.check("disc-a4-2", discriminant(p42) == -643, f"disc = {discriminant(p42)}")
    report.check("resolvent-a4-2", resolvent_cubic(p42).coeffs == (1, 0, -2, -5), str(resolvent_cubic(p42)))

    cert3 = is_pinching(a_matrix(3, 3))
    report.check("a3-3-pinching", cert3.pinching, str(cert3))
    cert4 = is_pinching(a_matrix(4, 2))
    report.check("a4-2-group-s4", cert4.group is GaloisGroup.S4, str(cert4))
    report.check("a4-2-not-pinching", not cert4.pinching)

    orders = {
        "A4(1)A4(2)A4(3)": a_matrix(4, 1) @ a_matrix(4, 2) @ a_matrix(4, 3),
        "A4(3)A4(2)A4(1)": a_matrix(4, 3) @ a_matrix(4, 2) @ a_matrix(4, 1),
    }
    matches: list[str] = []
    for label, mat in orders.items():
        cert = is_pinching(mat)
        report.record(f"product/{label}", cert)
        if cert.discriminant == 916:
            matches.append(label)
        if not cert.irreducible:
            report.note(f"{label}: charpoly {cert.poly} is reducible, so not pinching")
    report.check("product-disc-916", bool(matches), ", ".join(matches) or "no order matches")
    report.record("product_orders_matching_916", matches)

    aux = aux_checks(a_matrix(3, 3), a_matrix(3, 4))
    report.merge(aux, "a3-3-vs-a3-4")
    report.check("a4-1-infinite-order", has_infinite_order(a_matrix(4, 1)))

    # pinching implies irreducible on everything tested
    for cert in (cert3, cert4):
        report.check(f"pinching-implies-irreducible/{cert.poly}", not cert.pinching or cert.irreducible)
    loggerInstance.logger.log_debug(f"galois_suite: {report}")
    return report
