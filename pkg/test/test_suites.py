from unittest.mock import patch

import pytest

from src.report import CheckStatus, Report
from src.suites import SUITES, SuiteParams, positive_left_proper_word, resolve_suites, run_suites


def _ok(_params):
    report = Report("ok")
    report.check("fine", True)
    report.record("answer", 42)
    return report


def _boom(_params):
    raise RuntimeError("kaboom")


@pytest.fixture
def small():
    return SuiteParams(d=3, kmax=10, samples=3, max_length=5, max_k=5, pf_limit=10)


class TestResolve:
    def test_all(self):
        assert resolve_suites("all") == list(SUITES)

    def test_comma_list(self):
        assert resolve_suites("pf, area") == ["pf", "area"]

    @pytest.mark.parametrize("spec", ["nope", "pf,nope", ",", ""])
    def test_unknown(self, spec):
        with pytest.raises(ValueError):
            resolve_suites(spec)


class TestRunner:
    def test_results_merged_in_request_order(self):
        with patch.dict(SUITES, {"ok": _ok, "also": _ok}):
            report = run_suites(["also", "ok"], SuiteParams(), workers=2)
        assert [c.name for c in report.checks] == ["also/fine", "ok/fine"]
        assert report.values["ok/answer"] == 42
        assert report.values["suites"] == ["also", "ok"]
        assert report.passed

    def test_exception_becomes_failed_check(self):
        with patch.dict(SUITES, {"ok": _ok, "boom": _boom}):
            report = run_suites(["boom", "ok"], SuiteParams(), workers=2)
        failed = report.failures
        assert [c.name for c in failed] == ["boom/completed"]
        assert "RuntimeError: kaboom" in failed[0].detail
        assert not report.passed

    def test_small_exact_suites(self, small):
        report = run_suites(["commutators", "area", "duality"], small, workers=3)
        assert report.passed


class TestHypotheses:
    def test_positive_left_proper_word(self):
        m, dom = positive_left_proper_word(3)
        assert m == 3
        assert dom is not None

    def test_monte_carlo_skipped_by_default(self, small):
        report = SUITES["hypotheses"](small)
        statuses = {c.name: c.status for c in report.checks}
        assert statuses["second-exponent"] is CheckStatus.SKIP
        assert statuses["det-unimodular"] is CheckStatus.PASS
        assert statuses["steinberg-generation"] is CheckStatus.PASS
        assert statuses["pinching-a3-3"] is CheckStatus.PASS
