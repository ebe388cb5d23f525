"""
The two explicit Bruin-Troubetzkoy constructions: a measurable eigenvalue -1,
and a map measure-theoretically isomorphic to an irrational rotation.

Everything runs on tower-length ledgers with exact integers. Tower names
are never materialized: k_{3n+3} is itself a tower length, so lengths
square at every irrational block.
"""

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np

from .cocycles import KSequence
from .config import worker_count
from .induction import InsufficientPrecision, tower_masses
from .log import loggerInstance
from .report import Report, to_jsonable

Lengths = tuple[int, int, int]  # (|u|, |v|, |w|)

OFFSET_GRID = 128
POINTS_PER_CHUNK = 256


def next_lengths(lengths: Lengths, k: int) -> Lengths:
    """|u'| = |v|, |v'| = |w| + k|u|, |w'| = |w| + (k-1)|u|."""
    u, v, w = lengths
    return v, w + k * u, w + (k - 1) * u


def lengths_ledger(ks: KSequence) -> list[Lengths]:
    ledger: list[Lengths] = [(1, 1, 1)]
    for k in ks:
        ledger.append(next_lengths(ledger[-1], k))
    return ledger


@dataclass(frozen=True)
class TowerPoint:
    """A point of the tower picture: tower name, level, and an exact offset in (0, 1) inside the level."""

    tower: str
    level: int
    offset: Fraction


def tower_step(point: TowerPoint, height: int) -> TowerPoint:
    """T moves a non-top level to the next level of the same tower at the same offset."""
    if point.level >= height - 1:
        raise ValueError(f"Level {point.level} is the top of a tower of height {height}")
    return TowerPoint(point.tower, point.level + 1, point.offset)


def _randbelow(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n) for arbitrarily large n."""
    if n <= 0:
        raise ValueError("Empty range")
    bits = n.bit_length()
    nbytes = (bits + 7) // 8
    while True:
        value = int.from_bytes(rng.bytes(nbytes), "big") >> (nbytes * 8 - bits)
        if value < n:
            return value


def _sample_points(
    seed: int,
    n_points: int,
    low: int,
    high: int,
    score: Callable[[TowerPoint], float],
    workers: Optional[int] = None,
) -> float:
    """Max of score over n_points u-tower points with levels in [low, high].

    Points are drawn in fixed-size chunks, each chunk from its own spawned
    stream, and maxima are merged in chunk order.
    """
    n_chunks = max(1, math.ceil(n_points / POINTS_PER_CHUNK))
    children = np.random.SeedSequence(seed).spawn(n_chunks)

    def run(chunk: int) -> float:
        rng = np.random.default_rng(children[chunk])
        count = min(POINTS_PER_CHUNK, n_points - chunk * POINTS_PER_CHUNK)
        worst = 0.0
        for _ in range(count):
            level = low + _randbelow(rng, high - low + 1)
            offset = Fraction(2 * int(rng.integers(0, OFFSET_GRID // 2)) + 1, OFFSET_GRID)
            worst = max(worst, score(TowerPoint("u", level, offset)))
        return worst

    results: list[float] = [0.0] * n_chunks
    with ThreadPoolExecutor(max_workers=workers or worker_count()) as executor:
        futures = {executor.submit(run, c): c for c in range(n_chunks)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    return max(results)


# ---------------------------------------------------------------------------
# Eigenvalue -1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinusOneBlock:
    n: int
    k_growth: int  # k_{2n+1}
    k_odd: int  # k_{2n+2}
    slack: int  # (k_{2n+1}-1)|u_{2n}| - 2^n(|w_{2n}| + k_{2n+2}|v_{2n}|)


@dataclass
class MinusOnePlan:
    ks: KSequence
    blocks: list[MinusOneBlock]
    lengths: list[Lengths]
    odd_choice: int
    certificates: Report = field(default_factory=lambda: Report("minus-one"))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def level(self, m: int) -> Lengths:
        return self.lengths[m]

    def to_dict(self) -> dict[str, Any]:
        return {
            "construction": "minus-one",
            "odd_choice": self.odd_choice,
            "ks": [str(k) for k in self.ks],
            "blocks": to_jsonable(self.blocks),
            "lengths": [[str(x) for x in level] for level in self.lengths],
            "certificates": self.certificates.to_dict(include_timestamp=False),
        }


def build_minus_one(n_blocks: int, odd_choice: int = 1) -> MinusOnePlan:
    """k_1 odd, k_2 even, then for n = 1..n_blocks: k_{2n+2} = odd_choice and
    k_{2n+1} minimal with (k_{2n+1}-1)|u_{2n}| > 2^n(|w_{2n}| + k_{2n+2}|v_{2n}|)."""
    if n_blocks < 1:
        raise ValueError(f"n_blocks must be >= 1, got {n_blocks}")
    if odd_choice < 1 or odd_choice % 2 == 0:
        raise ValueError(f"odd_choice must be an odd integer >= 1, got {odd_choice}")
    ks: list[int] = [odd_choice, 2]
    lengths = lengths_ledger(KSequence(tuple(ks)))
    blocks: list[MinusOneBlock] = []
    for n in range(1, n_blocks + 1):
        u, v, w = lengths[2 * n]
        k_odd = odd_choice
        bound = 2**n * (w + k_odd * v)
        k_growth = bound // u + 2
        blocks.append(MinusOneBlock(n, k_growth, k_odd, (k_growth - 1) * u - bound))
        for k in (k_growth, k_odd):
            ks.append(k)
            lengths.append(next_lengths(lengths[-1], k))
    plan = MinusOnePlan(KSequence(tuple(ks)), blocks, lengths, odd_choice)
    _certify_minus_one(plan)
    loggerInstance.logger.log_info(f"minus-one plan with {n_blocks} blocks: {plan.certificates}")
    return plan


def _certify_minus_one(plan: MinusOnePlan) -> None:
    report = plan.certificates
    ks = plan.ks
    report.check("k1-odd", ks[0] % 2 == 1, f"k_1 = {ks[0]}")
    report.check("k2-even", ks[1] % 2 == 0, f"k_2 = {ks[1]}")
    report.check("k-odd-blocks", all(b.k_odd % 2 == 1 for b in plan.blocks))

    bad_parity = [
        n
        for n in range(1, plan.n_blocks + 2)
        if not (plan.lengths[2 * n][0] % 2 == 0 and plan.lengths[2 * n][2] % 2 == 0 and plan.lengths[2 * n][1] % 2 == 1)
    ]
    report.check(
        "parity", not bad_parity, "|u_2n|, |w_2n| even and |v_2n| odd" if not bad_parity else f"fails at n={bad_parity[0]}",
        "parity propagation",
    )
    report.check("growth", all(b.slack > 0 for b in plan.blocks), "(k_{2n+1}-1)|u_2n| > 2^n(|w_2n| + k_{2n+2}|v_2n|)")

    share_bad: list[int] = []
    mass_bad: list[int] = []
    masses: list[dict[str, Fraction]] = []
    for b in plan.blocks:
        n = b.n
        u, v, w = plan.lengths[2 * n]
        bound = Fraction(1, 2**n)
        shares = (
            Fraction(w, w + b.k_growth * u),
            Fraction(w + b.k_odd * v, w + (b.k_growth - 1) * u + b.k_odd * v),
            Fraction(w + (b.k_odd - 1) * v, w + (b.k_growth - 1) * u + (b.k_odd - 1) * v),
        )
        if max(shares) > bound:
            share_bad.append(n)
        mu, mv, mw = tower_masses(ks, 3, 2 * n)
        masses.append({"n": Fraction(n), "u": mu, "v": mv, "w": mw})
        if mv + mw > bound or mu != 1 - mv - mw:
            mass_bad.append(n)
    report.check("spacer-share", not share_bad, "v/w share of every level-(2n+2) tower <= 2^-n", "relative measure bound")
    report.check("v-w-mass", not mass_bad, "relative v+w mass at level 2n <= 2^-n", "relative measure bound")
    report.record("masses", masses)


def minus_one_f(point: TowerPoint) -> int:
    """+1 on even levels of u and on every v or w level, -1 on odd levels of u."""
    if point.tower != "u":
        return 1
    return 1 if point.level % 2 == 0 else -1


def minus_one_residual(
    plan: MinusOnePlan, n: int, n_test_points: int, seed: int = 0, workers: Optional[int] = None
) -> Report:
    """max |f_n(Tx) + f_n(x)| over sampled points on non-top u_{2n} levels,
    with the exact measure of the excluded set (top of u, towers v and w)."""
    if not 1 <= n <= plan.n_blocks:
        raise InsufficientPrecision(f"Level 2n needs 1 <= n <= {plan.n_blocks}, got n={n}")
    report = Report("minus-one-residual")
    u_height = plan.lengths[2 * n][0]
    mu, mv, mw = tower_masses(plan.ks, 3, 2 * n)

    def score(p: TowerPoint) -> float:
        return float(abs(minus_one_f(tower_step(p, u_height)) + minus_one_f(p)))

    residual = _sample_points(seed, n_test_points, 0, u_height - 2, score, workers)
    top = mu / u_height
    excluded = mv + mw + top
    report.record("residual", residual)
    report.record("excluded_measure", excluded)
    report.record("n_test_points", n_test_points)
    report.check("residual-zero", residual == 0.0, f"max |f(Tx) + f(x)| = {residual}")
    report.check("excluded-bound", excluded <= Fraction(1, 2**n) + top, f"excluded = {float(excluded):.3e}")
    return report


# ---------------------------------------------------------------------------
# Irrational rotation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IrrationalBlock:
    n: int
    k_growth: int  # k_{3n+1}
    k_congruence: int  # k_{3n+2}
    k_coprime: int  # k_{3n+3}
    y: int
    residue: int  # |u_{3n-3}| mod |u_{3n}|


@dataclass
class IrrationalPlan:
    ks: KSequence
    blocks: list[IrrationalBlock]
    lengths: list[Lengths]
    certificates: Report = field(default_factory=lambda: Report("irrational"))

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    @property
    def ys(self) -> tuple[int, ...]:
        return tuple(b.y for b in self.blocks)

    @property
    def qs(self) -> tuple[int, ...]:
        """q_n = |u_{3n}| for n = 0..n_blocks."""
        return tuple(self.lengths[3 * n][0] for n in range(self.n_blocks + 1))

    def u_prev(self, n: int) -> int:
        """|u_{3n-3}|, with the empty word below level 0."""
        return 0 if n == 0 else self.lengths[3 * n - 3][0]

    def m(self, n: int) -> int:
        """m_n = |w_{3n-3}| + ... + |w_0|."""
        return sum(self.lengths[3 * i][2] for i in range(n))

    def to_dict(self) -> dict[str, Any]:
        return {
            "construction": "irrational",
            "ks": [str(k) for k in self.ks],
            "blocks": to_jsonable(self.blocks),
            "ys": [str(y) for y in self.ys],
            "qs": [str(q) for q in self.qs],
            "lengths": [[str(x) for x in level] for level in self.lengths],
            "certificates": self.certificates.to_dict(include_timestamp=False),
        }


def build_irrational(n_blocks: int) -> IrrationalPlan:
    """Three induction steps per block:

    k_{3n+2} minimal positive with k|v_{3n}| + |w_{3n}| = |u_{3n-3}| mod |u_{3n}|;
    k_{3n+1} minimal with the growth inequality and gcd(|w_{3n+1}|, |v_{3n}|) = 1;
    k_{3n+3} = |w_{3n+1} v_{3n}^{k_{3n+2}}|.
    """
    if n_blocks < 1:
        raise ValueError(f"n_blocks must be >= 1, got {n_blocks}")
    ks: list[int] = []
    lengths: list[Lengths] = [(1, 1, 1)]
    blocks: list[IrrationalBlock] = []
    for n in range(n_blocks):
        u, v, w = lengths[3 * n]
        u_prev = 0 if n == 0 else lengths[3 * n - 3][0]
        b = ((u_prev - w) * pow(v, -1, u)) % u if u > 1 else 0
        b = b or u
        a = 2**n * (w + b * v) // u + 2
        while math.gcd(w + (a - 1) * u, v) != 1:
            a += 1
        c = w + (a - 1) * u + b * v
        y = (c - u_prev) // u
        blocks.append(IrrationalBlock(n, a, b, c, y, u_prev % u))
        for k in (a, b, c):
            ks.append(k)
            lengths.append(next_lengths(lengths[-1], k))
        loggerInstance.logger.log_debug(f"irrational block {n}: k=({a}, {b}, {c}), y={y}")
    plan = IrrationalPlan(KSequence(tuple(ks)), blocks, lengths)
    _certify_irrational(plan)
    loggerInstance.logger.log_info(f"irrational plan with {n_blocks} blocks: {plan.certificates}")
    return plan


def _certify_irrational(plan: IrrationalPlan) -> None:
    report = plan.certificates
    failures: dict[str, list[int]] = {
        "congruence": [],
        "coprime-u-v": [],
        "coprime-w-v": [],
        "q-recursion": [],
        "y-lower-bound": [],
        "growth": [],
        "k3-is-length": [],
        "coprime-next": [],
    }
    for blk in plan.blocks:
        n = blk.n
        u, v, w = plan.lengths[3 * n]
        w1 = plan.lengths[3 * n + 1][2]
        u3, v3, _ = plan.lengths[3 * n + 3]
        u_prev = plan.u_prev(n)
        checks = {
            "congruence": (u3 - u_prev) % u == 0,
            "coprime-u-v": math.gcd(u, v) == 1,
            "coprime-w-v": math.gcd(w1, v) == 1,
            "q-recursion": u3 == blk.y * u + u_prev,
            "y-lower-bound": blk.y >= blk.k_growth - 1,
            "growth": (blk.k_growth - 1) * u > 2**n * (w + blk.k_congruence * v),
            "k3-is-length": blk.k_coprime == w1 + blk.k_congruence * v,
            "coprime-next": math.gcd(u3, v3) == 1,
        }
        for name, ok in checks.items():
            if not ok:
                failures[name].append(n)
    for name, bad in failures.items():
        report.check(name, not bad, "every block" if not bad else f"fails at block {bad[0]}")
    report.record("ys", plan.ys)
    report.record("qs", plan.qs)


def convergents(ys: tuple[int, ...]) -> list[tuple[int, int]]:
    """(p_n, q_n) of [0; y_1, ..., y_N] for n = 0..N."""
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    out = [(p, q)]
    for y in ys:
        p_prev, p = p, y * p + p_prev
        q_prev, q = q, y * q + q_prev
        out.append((p, q))
    return out


def gamma_approximant(plan: IrrationalPlan, precision: Fraction) -> tuple[Fraction, Fraction]:
    """The first convergent p_n/q_n whose bound 1/(q_n q_{n+1}) is <= precision."""
    if plan.n_blocks < 2:
        raise InsufficientPrecision("gamma needs a plan with at least 2 blocks")
    convs = convergents(plan.ys)
    for n in range(len(convs) - 1):
        p, q = convs[n]
        bound = Fraction(1, q * convs[n + 1][1])
        if bound <= precision:
            return Fraction(p, q), bound
    raise InsufficientPrecision(f"{plan.n_blocks} blocks do not reach precision {precision}")


def spacer_towers(plan: IrrationalPlan, n: Optional[int] = None) -> Report:
    """Length ledgers of the spacer towers z, b and the rotation towers c, d, checked against u_{3n}."""
    n = plan.n_blocks if n is None else n
    if not 1 <= n <= plan.n_blocks:
        raise ValueError(f"n must lie in 1..{plan.n_blocks}, got {n}")
    report = Report("spacers")
    z, b, c, d = 1, 1, 1, 0
    z_ok = b_ok = c_ok = True
    m_terms: list[Fraction] = []
    growth_terms: list[Fraction] = []
    for blk in plan.blocks[:n]:
        i = blk.n
        u, v, w = plan.lengths[3 * i]
        s = w + blk.k_congruence * v
        s_prime = plan.u_prev(i)
        z = (blk.k_growth - 1) * z + s
        b = blk.y * b + s_prime
        c, d = blk.y * c + d, c
        u_next = plan.lengths[3 * i + 3][0]
        z_ok &= z == u_next
        b_ok &= b == u_next
        c_ok &= c == u_next and d == u
        m_terms.append(Fraction(plan.m(i + 1), u_next))
        growth_terms.append(Fraction(s, u_next))
    report.check("z-heights", z_ok, "|z_n| = |u_3n|")
    report.check("b-heights", b_ok, "|b_n| = q_n")
    report.check("c-heights", c_ok, "|c_n| = q_n, |d_n| = q_{n-1}")
    report.check(
        "m-terms-decreasing",
        all(x > y for x, y in zip(m_terms, m_terms[1:])),
        "m_{n+1}/|u_{3n+3}| decreasing",
        "rank one",
    )
    report.check(
        "growth-terms",
        all(t < Fraction(1, 2**i) for i, t in enumerate(growth_terms)),
        "(|w_3n| + k_{3n+2}|v_3n|)/|u_{3n+3}| < 2^-n",
        "rank one",
    )
    report.record("m", [plan.m(i + 1) for i in range(n)])
    report.record("m_terms", m_terms)
    report.record("growth_terms", growth_terms)
    report.record("m_partial_sum", sum(m_terms, Fraction(0)))
    report.record("growth_partial_sum", sum(growth_terms, Fraction(0)))
    return report


def _phase(x: Fraction) -> complex:
    return complex(np.exp(2j * np.pi * float(x % 1)))


def gamma_eigen_residual(
    plan: IrrationalPlan, n: int, n_test_points: int, seed: int = 0, workers: Optional[int] = None
) -> Report:
    """max |f_n(Tx) - e^{2 pi i gamma_apx} f_n(x)| over points on levels m_n..|u_3n|-2.

    f_n is e^{2 pi i j gamma} on level m_n + j of u_{3n}, with gamma taken as
    the deepest convergent of the plan, and gamma_apx = p_n/q_n.
    """
    if not 1 <= n <= plan.n_blocks - 1:
        raise InsufficientPrecision(f"n must lie in 1..{plan.n_blocks - 1} for a {plan.n_blocks}-block plan")
    report = Report("gamma-residual")
    convs = convergents(plan.ys)
    gamma_best = Fraction(*convs[-1])
    gamma_apx = Fraction(*convs[n])
    bound = Fraction(1, convs[n][1] * convs[n + 1][1])
    u_height = plan.lengths[3 * n][0]
    m_n = plan.m(n)
    step = _phase(gamma_apx)

    def f(p: TowerPoint) -> complex:
        if p.tower != "u" or p.level < m_n:
            return 1.0 + 0j
        return _phase((p.level - m_n) * gamma_best)

    def score(p: TowerPoint) -> float:
        return abs(f(tower_step(p, u_height)) - step * f(p))

    residual = _sample_points(seed, n_test_points, m_n, u_height - 2, score, workers)
    mu, mv, mw = tower_masses(plan.ks, 3, 3 * n)
    excluded = mv + mw + (m_n + 1) * mu / u_height
    report.record("residual", residual)
    report.record("gamma_apx", gamma_apx)
    report.record("gamma_error_bound", bound)
    report.record("excluded_measure", excluded)
    report.check("residual-within-bound", residual <= 2 * math.pi * float(bound) + 1e-12, f"residual = {residual:.3e}")
    report.check("excluded-bound", excluded <= Fraction(4, 2**n), f"excluded = {float(excluded):.3e}", "measure bound of the eigenfunction note")
    return report
