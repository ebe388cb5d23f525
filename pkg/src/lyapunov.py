"""
Monte Carlo and periodic estimates of Lyapunov exponents of the cocycle families.

Itineraries are drawn from a SamplingSpec that stands in for the invariant
measure of the accelerated induction. Each sample gets its own RNG stream
spawned from the run seed, samples run in a thread pool, and results are
reduced in sample-index order, so the worker count never changes an estimate.
"""

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .cocycles import MatrixFamily, product
from .config import worker_count
from .log import loggerInstance
from .report import Report

RENORMALIZE_EVERY = 25
DEFAULT_BURN_IN = 100
Z95 = 1.96
PERIODIC_TOL = 1e-5
PERIODIC_GAP_TOL = 1e-4


class Distribution(Enum):
    GEOMETRIC = "geometric"
    UNIFORM = "uniform"
    PERIODIC = "periodic"
    EMPIRICAL = "empirical"


@dataclass(frozen=True)
class SamplingSpec:
    distribution: Distribution
    p: float = 0.5
    kmin: int = 1
    kmax: int = 20
    pattern: tuple[int, ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "pattern", tuple(int(k) for k in self.pattern))
        if self.distribution in (Distribution.PERIODIC, Distribution.EMPIRICAL):
            if not self.pattern:
                raise ValueError(f"{self.distribution.value} sampling needs a non-empty pattern")
            if min(self.pattern) < 1:
                raise ValueError("Itinerary values must be >= 1")
            return
        if self.kmin < 1 or self.kmax < self.kmin:
            raise ValueError(f"Need 1 <= kmin <= kmax, got kmin={self.kmin}, kmax={self.kmax}")
        if self.distribution is Distribution.GEOMETRIC and not 0 < self.p <= 1:
            raise ValueError(f"Geometric parameter must lie in (0, 1], got {self.p}")

    @classmethod
    def geometric(cls, p: float = 0.5, kmax: int = 20, seed: int = 0) -> "SamplingSpec":
        return cls(Distribution.GEOMETRIC, p=p, kmax=kmax, seed=seed)

    @classmethod
    def uniform(cls, kmin: int, kmax: int, seed: int = 0) -> "SamplingSpec":
        return cls(Distribution.UNIFORM, kmin=kmin, kmax=kmax, seed=seed)

    @classmethod
    def periodic(cls, pattern: Sequence[int], seed: int = 0) -> "SamplingSpec":
        return cls(Distribution.PERIODIC, pattern=tuple(pattern), seed=seed)

    @classmethod
    def empirical(cls, ks: Sequence[int], seed: int = 0) -> "SamplingSpec":
        return cls(Distribution.EMPIRICAL, pattern=tuple(ks), seed=seed)

    @property
    def is_all_ones(self) -> bool:
        if self.distribution in (Distribution.PERIODIC, Distribution.EMPIRICAL):
            return set(self.pattern) == {1}
        return self.kmax == 1 or (self.distribution is Distribution.GEOMETRIC and self.p == 1)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.distribution is Distribution.PERIODIC:
            return np.resize(np.array(self.pattern, dtype=np.int64), n)
        if self.distribution is Distribution.EMPIRICAL:
            return rng.choice(np.array(self.pattern, dtype=np.int64), size=n)
        if self.distribution is Distribution.UNIFORM:
            return rng.integers(self.kmin, self.kmax + 1, size=n)
        ks = np.arange(self.kmin, self.kmax + 1)
        weights = self.p * (1 - self.p) ** (ks - 1)
        return rng.choice(ks, size=n, p=weights / weights.sum())

    def __str__(self) -> str:
        if self.distribution in (Distribution.PERIODIC, Distribution.EMPIRICAL):
            return f"{self.distribution.value}({','.join(map(str, self.pattern))})"
        if self.distribution is Distribution.UNIFORM:
            return f"uniform({self.kmin}..{self.kmax})"
        return f"geometric(p={self.p}, kmax={self.kmax})"


@dataclass(frozen=True)
class LyapunovEstimate:
    exponents: tuple[float, ...]
    n_steps: int
    n_samples: int
    ci95: tuple[Optional[float], ...]
    seed: int
    family: str = "A"
    burn_in: int = DEFAULT_BURN_IN
    samples: tuple[tuple[float, ...], ...] = field(default=(), repr=False)

    def __str__(self) -> str:
        parts = []
        for value, ci in zip(self.exponents, self.ci95):
            parts.append(f"{value:.6f}" + (f" +- {ci:.2e}" if ci is not None else ""))
        return f"{self.family}: (" + ", ".join(parts) + f") over {self.n_samples} x {self.n_steps} steps"


@lru_cache(maxsize=1024)
def _float_matrix(family: MatrixFamily, d: int, k: int) -> np.ndarray:
    m = np.array(family.matrix(d, k).to_lists(), dtype=float)
    m.setflags(write=False)
    return m


def _itineraries(spec: SamplingSpec, n_samples: int, length: int) -> list[np.ndarray]:
    children = np.random.SeedSequence(spec.seed).spawn(n_samples)
    return [spec.sample(np.random.default_rng(child), length) for child in children]


def _validate(n_steps: int, n_samples: int, burn_in: int) -> None:
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if burn_in < 0:
        raise ValueError(f"burn_in must be >= 0, got {burn_in}")


def _top_one(family: MatrixFamily, d: int, ks: np.ndarray, burn_in: int) -> tuple[float, ...]:
    r = np.ones(d)
    log_scale = 0.0
    for i, k in enumerate(ks):
        if i == burn_in:
            r = r / r.max()
            log_scale = 0.0
        r = r @ _float_matrix(family, d, int(k))
        if (i + 1) % RENORMALIZE_EVERY == 0:
            scale = r.max()
            log_scale += math.log(scale)
            r = r / scale
    n = len(ks) - burn_in
    return ((log_scale + math.log(r.max())) / n,)


def _spectrum_one(family: MatrixFamily, d: int, ks: np.ndarray, burn_in: int) -> tuple[float, ...]:
    q = np.eye(d)
    logs = np.zeros(d)
    for i, k in enumerate(ks):
        q, r = np.linalg.qr(_float_matrix(family, d, int(k)).T @ q)
        diag = np.abs(np.diag(r))
        if not np.all(np.isfinite(diag)) or np.any(diag == 0.0):
            raise FloatingPointError(f"rank loss in QR step {i} for k={int(k)}")
        if i >= burn_in:
            logs += np.log(diag)
    n = len(ks) - burn_in
    return tuple(sorted((float(v) / n for v in logs), reverse=True))


def _run(
    kernel: Callable[[MatrixFamily, int, np.ndarray, int], tuple[float, ...]],
    family: MatrixFamily,
    spec: SamplingSpec,
    d: int,
    n_steps: int,
    n_samples: int,
    burn_in: int,
    workers: Optional[int],
    reverse: bool = False,
) -> LyapunovEstimate:
    _validate(n_steps, n_samples, burn_in)
    if n_steps == 1:
        # a single measured step is the first matrix itself
        burn_in = 0
    paths = _itineraries(spec, n_samples, burn_in + n_steps)
    if reverse:
        paths = [p[::-1] for p in paths]
    results: list[Optional[tuple[float, ...]]] = [None] * n_samples
    max_workers = workers if workers is not None else worker_count()
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(kernel, family, d, path, burn_in): idx for idx, path in enumerate(paths)}
        for future in as_completed(futures):
            results[futures[future]] = future.result()
    table = np.array(results, dtype=float)
    means = table.mean(axis=0)
    if n_samples > 1:
        ci: tuple[Optional[float], ...] = tuple(float(v) for v in Z95 * table.std(axis=0, ddof=1) / math.sqrt(n_samples))
    else:
        ci = (None,) * table.shape[1]
    order = np.argsort(-means, kind="stable")
    estimate = LyapunovEstimate(
        exponents=tuple(float(means[i]) for i in order),
        n_steps=n_steps,
        n_samples=n_samples,
        ci95=tuple(ci[i] for i in order),
        seed=spec.seed,
        family=family.value,
        burn_in=burn_in,
        samples=tuple(tuple(float(v) for v in row) for row in table),
    )
    loggerInstance.logger.log_debug(f"lyapunov {kernel.__name__} {spec} d={d}: {estimate}")
    return estimate


def top_exponent(
    family: MatrixFamily,
    spec: SamplingSpec,
    d: int,
    n_steps: int,
    n_samples: int,
    burn_in: int = DEFAULT_BURN_IN,
    workers: Optional[int] = None,
) -> LyapunovEstimate:
    """(1/n) log cnorm of the product, averaged over samples.

    The running row vector 1^T M(k_1)...M(k_i) is rescaled every
    RENORMALIZE_EVERY steps; only the steps after burn_in count.
    """
    if not family.nonnegative:
        raise ValueError(f"top_exponent needs a nonnegative family, got {family.value}")
    return _run(_top_one, family, spec, d, n_steps, n_samples, burn_in, workers)


def spectrum(
    family: MatrixFamily,
    spec: SamplingSpec,
    d: int,
    n_steps: int,
    n_samples: int,
    burn_in: int = DEFAULT_BURN_IN,
    workers: Optional[int] = None,
    reverse: bool = False,
) -> LyapunovEstimate:
    """All exponents from QR re-orthonormalization of the transposed product."""
    return _run(_spectrum_one, family, spec, d, n_steps, n_samples, burn_in, workers, reverse)


def periodic_reference(family: MatrixFamily, pattern: Sequence[int], d: int) -> tuple[float, ...]:
    """Exact exponents of a periodic itinerary: log |eigenvalues| of the period product per step."""
    m = np.array(product(family, tuple(pattern), d).to_lists(), dtype=float)
    moduli = np.abs(np.linalg.eigvals(m))
    return tuple(sorted((math.log(float(v)) / len(pattern) for v in moduli), reverse=True))


def periodic_tolerance(
    family: MatrixFamily, pattern: Sequence[int], d: int, n_steps: int, base: float = PERIODIC_TOL
) -> float:
    """Tolerance for periodic_oracle: base for a period of one, plus a partial-period allowance otherwise."""
    if len(pattern) == 1:
        return base
    worst = max(math.log(float(np.linalg.norm(_float_matrix(family, d, int(k)), 2))) for k in pattern)
    return base + 2 * len(pattern) * worst / n_steps


def periodic_oracle(family: MatrixFamily, spec: SamplingSpec, d: int, estimate: LyapunovEstimate) -> Report:
    """Compare an estimate on a periodic itinerary with the eigenvalues of its period product."""
    if spec.distribution is not Distribution.PERIODIC:
        raise ValueError(f"periodic_oracle needs a periodic spec, got {spec}")
    report = Report("periodic")
    if spec.is_all_ones:
        report.skip("matches-reference", "unit-modulus eigenvalues grow polynomially")
        return report
    if estimate.burn_in == 0:
        report.skip("matches-reference", "no burn-in, so the estimate includes the alignment transient")
        return report
    reference = periodic_reference(family, spec.pattern, d)[: len(estimate.exponents)]
    tol = periodic_tolerance(family, spec.pattern, d, estimate.n_steps)
    error = max(abs(a - b) for a, b in zip(estimate.exponents, reference))
    report.record("reference", reference)
    report.record("max_error", error)
    report.check("matches-reference", error <= tol, f"max error {error:.2e} (tol {tol:.1e})", "log moduli of the period product")
    return report


def _ci(values: np.ndarray) -> Optional[float]:
    if len(values) < 2:
        return None
    return float(Z95 * values.std(ddof=1) / math.sqrt(len(values)))


def _excludes_zero(mean: float, ci: Optional[float], positive: bool) -> bool:
    margin = ci if ci is not None else 0.0
    return mean - margin > 0 if positive else mean + margin < 0


def _dual_family(d: int) -> MatrixFamily:
    return MatrixFamily.B3 if d == 3 else MatrixFamily.Z


def exponent_gap(
    spec: SamplingSpec,
    d: int,
    n_steps: int,
    n_samples: int,
    burn_in: int = DEFAULT_BURN_IN,
    workers: Optional[int] = None,
) -> Report:
    """Paired estimate of lambda_1(B or Z) - lambda_1(A) on identical itineraries."""
    report = Report("gap")
    dual = _dual_family(d)
    a = top_exponent(MatrixFamily.A, spec, d, n_steps, n_samples, burn_in, workers)
    b = top_exponent(dual, spec, d, n_steps, n_samples, burn_in, workers)
    diffs = np.array([sb[0] - sa[0] for sa, sb in zip(a.samples, b.samples)])
    gap = float(diffs.mean())
    ci = _ci(diffs)
    report.record("lambda1_A", a.exponents[0])
    report.record(f"lambda1_{dual.value}", b.exponents[0])
    report.record("gap", gap)
    report.record("gap_ci95", ci)
    report.record("spec", str(spec))
    if spec.distribution is Distribution.PERIODIC and not spec.is_all_ones and n_steps > 1 and burn_in > 0:
        expected = periodic_reference(dual, spec.pattern, d)[0] - periodic_reference(MatrixFamily.A, spec.pattern, d)[0]
        tol = periodic_tolerance(MatrixFamily.A, spec.pattern, d, n_steps, PERIODIC_GAP_TOL)
        report.record("gap_reference", expected)
        report.check("gap-matches-reference", abs(gap - expected) <= tol, f"{gap:.6f} vs {expected:.6f} (tol {tol:.1e})")
    if spec.is_all_ones:
        report.skip("gap-positive", "all-ones itineraries are excluded by the hypothesis k_i > 1 infinitely often")
        report.note(f"gap on the all-ones itinerary is {gap:.3e}")
    else:
        report.check("gap-positive", _excludes_zero(gap, ci, True), f"gap = {gap:.6f}, ci = {ci}")
    return report


def second_exponent_sign(
    spec: SamplingSpec,
    d: int,
    n_steps: int,
    n_samples: int,
    burn_in: int = DEFAULT_BURN_IN,
    workers: Optional[int] = None,
) -> Report:
    """lambda_2(A_d) > 0 through lambda_1(Z) > 0 and lambda_1(A) + lambda_d(A) = lambda_1(A) - lambda_1(Z) < 0.

    For d = 3 the two claims force lambda_2 > 0 since the exponents sum to 0;
    for every d the QR spectrum's lambda_2 is reported and checked as well.
    """
    report = Report("second-exponent")
    spec_a = spectrum(MatrixFamily.A, spec, d, n_steps, n_samples, burn_in, workers)
    top_z = top_exponent(MatrixFamily.Z, spec, d, n_steps, n_samples, burn_in, workers)
    top_a = top_exponent(MatrixFamily.A, spec, d, n_steps, n_samples, burn_in, workers)

    lam2 = spec_a.exponents[1]
    report.record("spectrum_A", spec_a.exponents)
    report.record("spectrum_A_ci95", spec_a.ci95)
    report.check("lambda2-positive", _excludes_zero(lam2, spec_a.ci95[1], True), f"lambda_2 = {lam2:.6f}")

    z1 = top_z.exponents[0]
    report.check("inverse-top-positive", _excludes_zero(z1, top_z.ci95[0], True), f"lambda_1(Z) = {z1:.6f}")

    diffs = np.array([sa[0] - sz[0] for sa, sz in zip(top_a.samples, top_z.samples)])
    extreme_sum = float(diffs.mean())
    report.record("lambda1_plus_lambdad", extreme_sum)
    if spec.is_all_ones:
        report.skip("extreme-sum-negative", "all-ones itineraries are excluded")
    else:
        report.check("extreme-sum-negative", _excludes_zero(extreme_sum, _ci(diffs), False), f"{extreme_sum:.6f}")

    sums = [abs(sum(row)) for row in spec_a.samples]
    report.check("exponent-sum-zero", max(sums) < 1e-8, f"max |sum| = {max(sums):.2e}")
    return report


def inverse_consistency(
    spec: SamplingSpec,
    d: int,
    n_steps: int,
    n_samples: int,
    burn_in: int = DEFAULT_BURN_IN,
    workers: Optional[int] = None,
) -> Report:
    """lambda_i(A) = -lambda_{d+1-i}(A^{-1}) with the inverse family run on reversed itineraries."""
    report = Report("inverse")
    forward = spectrum(MatrixFamily.A, spec, d, n_steps, n_samples, burn_in, workers)
    backward = spectrum(MatrixFamily.A_INV, spec, d, n_steps, n_samples, burn_in, workers, reverse=True)
    for i in range(d):
        lhs = forward.exponents[i]
        rhs = -backward.exponents[d - 1 - i]
        tol = (forward.ci95[i] or 0.0) + (backward.ci95[d - 1 - i] or 0.0) + 10.0 / n_steps
        report.check(f"lambda{i + 1}", abs(lhs - rhs) <= tol, f"{lhs:.6f} vs {rhs:.6f} (tol {tol:.2e})")
    report.record("spectrum_A", forward.exponents)
    report.record("spectrum_A_inverse", backward.exponents)
    return report


def sweep(
    family: MatrixFamily,
    spec: SamplingSpec,
    d: int,
    kmax_values: Sequence[int],
    n_steps: int,
    n_samples: int,
    burn_in: int = DEFAULT_BURN_IN,
    workers: Optional[int] = None,
) -> list[dict[str, Any]]:
    """One CSV row per truncation (or period value for periodic specs) with spectrum and CIs."""
    rows: list[dict[str, Any]] = []
    for kmax in kmax_values:
        if spec.distribution is Distribution.PERIODIC:
            varied = replace(spec, pattern=(kmax,))
        elif spec.distribution is Distribution.EMPIRICAL:
            varied = replace(spec, pattern=tuple(k for k in spec.pattern if k <= kmax) or (1,))
        else:
            varied = replace(spec, kmax=max(kmax, spec.kmin))
        est = spectrum(family, varied, d, n_steps, n_samples, burn_in, workers)
        row: dict[str, Any] = {"family": family.value, "d": d, "spec": str(varied), "kmax": kmax}
        for i, (value, ci) in enumerate(zip(est.exponents, est.ci95), start=1):
            row[f"lambda_{i}"] = value
            row[f"ci95_{i}"] = ci
        rows.append(row)
    return rows
