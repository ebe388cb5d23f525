"""
Named verification suites and a parallel runner.

Each suite takes a SuiteParams and returns a Report. The runner executes
suites concurrently, turns an exception into a FAIL check for that suite,
and merges reports in the order the suites were requested.
"""

from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .cocycles import (
    a_matrix,
    cnorm_ratio_check,
    conjugation_suite,
    loop_domination,
    order_suite,
    pf_constants,
    random_column_growth,
    z_matrix,
)
from .config import worker_count
from .galois import galois_suite, is_pinching
from .group import DerivationError, derive_steinberg, steinberg_suite, verify_commutation_relations
from .induction import area_check, duality_check
from .log import loggerInstance
from .lyapunov import SamplingSpec, second_exponent_sign
from .report import Report
from .sadic import abelianization, chi, compose_all, is_left_proper, strong_coincidence


@dataclass(frozen=True)
class SuiteParams:
    d: int = 3
    kmax: int = 50
    samples: int = 1000
    max_length: int = 15
    max_k: int = 10
    pf_limit: int = 40
    seed: int = 0
    mc_steps: int = 0
    mc_samples: int = 20


def _column_growth(p: SuiteParams) -> Report:
    return random_column_growth(p.samples, p.max_length, p.max_k, p.seed)


def _pf(p: SuiteParams) -> Report:
    return pf_constants(p.pf_limit)


def _conjugation(p: SuiteParams) -> Report:
    return conjugation_suite(p.kmax, dmax=max(8, p.d))


def _commutators(p: SuiteParams) -> Report:
    report = Report("commutators")
    for d in sorted({3, 4, 5, p.d}):
        report.merge(verify_commutation_relations(d), f"d{d}")
    return report


def _steinberg(p: SuiteParams) -> Report:
    dims = tuple(sorted({3, 4, 5, 6, p.d}))
    return steinberg_suite(dims, kmax=20)


def _galois(p: SuiteParams) -> Report:
    return galois_suite(max(p.kmax, 100))


def _order(p: SuiteParams) -> Report:
    return order_suite(max(p.kmax, 100), dims=tuple(sorted({3, 4, p.d})))


def _duality(p: SuiteParams) -> Report:
    report = Report("duality")
    rng = np.random.default_rng(p.seed)
    for i in range(min(p.samples, 50)):
        ks = [int(k) for k in rng.integers(1, p.max_k + 1, size=int(rng.integers(1, 9)))]
        report.merge(duality_check(ks, p.d), f"seq{i}")
    return report


def _area(p: SuiteParams) -> Report:
    report = Report("area")
    for k in (2, 3, 5):
        report.merge(area_check(k, p.d, steps=12), f"k{k}")
    if p.d == 3:
        report.merge(area_check(2, 3, steps=50, lookahead=20, ratio_tolerance=1e-3), "k2-limit")
    return report


def _cnorm_ratio(p: SuiteParams) -> Report:
    return cnorm_ratio_check(p.kmax)


def positive_left_proper_word(d: int, k: int = 2, max_len: int = 0) -> tuple[int, Optional[Report]]:
    """Shortest power of chi_k, at least d-1 long, that is left-proper with a positive abelianization."""
    limit = max_len or 4 * d
    for m in range(d - 1, limit + 1):
        sub = compose_all([chi(d, k)] * m)
        if is_left_proper(sub) and abelianization(sub).is_positive():
            return m, loop_domination(d, (k,) * m)
    return 0, None


def _hypotheses(p: SuiteParams) -> Report:
    """The five weak-mixing hypotheses, each checked as far as exact or Monte Carlo means reach."""
    report = Report("hypotheses")
    d = p.d
    dets = {a_matrix(d, k).det() for k in range(1, p.kmax + 1)} | {z_matrix(d, k).det() for k in range(1, p.kmax + 1)}
    report.check("det-unimodular", dets <= {1, -1}, f"determinants {sorted(dets)}", "hypothesis (i)")

    pair = compose_all([chi(d, 2)] * (d - 1))
    report.check("left-proper-composite", is_left_proper(pair), str(pair), "hypothesis (ii)")
    report.check("strong-coincidence", strong_coincidence(pair, 1).found, "", "hypothesis (ii)")
    m, dom = positive_left_proper_word(d)
    report.check("positive-left-proper-word", m > 0, f"chi_2 composed {m} times", "hypothesis (ii)")
    if dom is not None:
        report.merge(dom, "loop")

    report.merge(cnorm_ratio_check(p.kmax), "log-integrability")

    if p.mc_steps > 0:
        spec = SamplingSpec.geometric(0.5, 20, seed=p.seed)
        report.merge(second_exponent_sign(spec, d, p.mc_steps, p.mc_samples), "second-exponent")
    else:
        report.skip("second-exponent", "Monte Carlo disabled (mc_steps = 0)", "hypothesis (iv)")

    try:
        words = derive_steinberg(d)
        report.check("steinberg-generation", len(words) == d * (d - 1), f"{len(words)} generators", "hypothesis (v)")
    except DerivationError as e:
        report.check("steinberg-generation", False, str(e), "hypothesis (v)")
    if d == 3:
        report.check("pinching-a3-3", is_pinching(a_matrix(3, 3)).pinching, "", "hypothesis (v)")
    return report


SUITES: dict[str, Callable[[SuiteParams], Report]] = {
    "column-growth": _column_growth,
    "pf": _pf,
    "conjugation": _conjugation,
    "commutators": _commutators,
    "steinberg": _steinberg,
    "galois": _galois,
    "order": _order,
    "duality": _duality,
    "area": _area,
    "hypotheses": _hypotheses,
    "cnorm-ratio": _cnorm_ratio,
}


def resolve_suites(spec: str) -> list[str]:
    """Parse "all" or a comma list of suite names."""
    if spec.strip() == "all":
        return list(SUITES)
    names = [s.strip() for s in spec.split(",") if s.strip()]
    unknown = [n for n in names if n not in SUITES]
    if unknown or not names:
        raise ValueError(f"Unknown suite(s): {', '.join(unknown) or spec!r}; choose from {', '.join(SUITES)}")
    return names


def run_suites(names: Sequence[str], params: SuiteParams, workers: Optional[int] = None) -> Report:
    report = Report("verify")
    results: dict[str, Report] = {}
    max_workers = workers if workers is not None else worker_count()
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_name = {executor.submit(SUITES[name], params): name for name in names}
        for future in as_completed(future_to_name):
            name = future_to_name[future]
            try:
                results[name] = future.result()
            except Exception as e:
                loggerInstance.logger.log_info(f"Error computing {name}: {e}")
                failed = Report(name)
                failed.check("completed", False, f"{type(e).__name__}: {e}")
                results[name] = failed
    for name in names:
        sub = results[name]
        report.merge(sub, name)
        loggerInstance.logger.log_info(f"suite {name}: {sub}")
    report.record("suites", list(names))
    return report
