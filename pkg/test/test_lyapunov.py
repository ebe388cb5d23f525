import math

import numpy as np
import pytest

from src.cocycles import MatrixFamily, a_matrix, cnorm, z_matrix
from src.lyapunov import (
    Distribution,
    SamplingSpec,
    exponent_gap,
    inverse_consistency,
    periodic_oracle,
    periodic_reference,
    second_exponent_sign,
    spectrum,
    sweep,
    top_exponent,
)
from src.report import CheckStatus


def log_moduli(m):
    roots = np.roots(np.array(m.charpoly_coeffs(), dtype=float))
    return sorted((math.log(abs(r)) for r in roots), reverse=True)


@pytest.fixture
def period_two():
    return SamplingSpec.periodic((2,))


class TestSamplingSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"distribution": Distribution.PERIODIC},
            {"distribution": Distribution.EMPIRICAL, "pattern": (2, 0)},
            {"distribution": Distribution.UNIFORM, "kmin": 0, "kmax": 3},
            {"distribution": Distribution.UNIFORM, "kmin": 4, "kmax": 3},
            {"distribution": Distribution.GEOMETRIC, "p": 0.0},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SamplingSpec(**kwargs)

    def test_periodic_sample(self):
        spec = SamplingSpec.periodic((1, 3))
        assert list(spec.sample(np.random.default_rng(0), 5)) == [1, 3, 1, 3, 1]

    def test_empirical_draws_from_pattern(self):
        spec = SamplingSpec.empirical((2, 7, 7, 9))
        values = spec.sample(np.random.default_rng(4), 200)
        assert set(values.tolist()) <= {2, 7, 9}

    @pytest.mark.parametrize("spec", [SamplingSpec.geometric(0.3, 6), SamplingSpec.uniform(2, 5)])
    def test_bounded_draws(self, spec):
        values = spec.sample(np.random.default_rng(1), 500)
        assert values.min() >= spec.kmin
        assert values.max() <= spec.kmax

    @pytest.mark.parametrize(
        "spec,expected",
        [
            (SamplingSpec.periodic((1,)), True),
            (SamplingSpec.uniform(1, 1), True),
            (SamplingSpec.geometric(1.0, 20), True),
            (SamplingSpec.periodic((1, 2)), False),
            (SamplingSpec.geometric(0.5, 20), False),
        ],
    )
    def test_all_ones(self, spec, expected):
        assert spec.is_all_ones is expected

    def test_str(self):
        assert str(SamplingSpec.uniform(2, 5)) == "uniform(2..5)"
        assert str(SamplingSpec.periodic((1, 2))) == "periodic(1,2)"


class TestPeriodicExponents:
    def test_spectrum_matches_eigenvalues(self, period_two):
        est = spectrum(MatrixFamily.A, period_two, 3, n_steps=2000, n_samples=1, workers=1)
        expected = log_moduli(a_matrix(3, 2))
        for got, want in zip(est.exponents, expected):
            assert got == pytest.approx(want, abs=1e-2)
        assert est.ci95 == (None, None, None)

    def test_top_exponent(self, period_two):
        est = top_exponent(MatrixFamily.A, period_two, 3, n_steps=2000, n_samples=1, workers=1)
        assert est.exponents[0] == pytest.approx(log_moduli(a_matrix(3, 2))[0], abs=1e-2)

    def test_single_step_is_log_cnorm(self):
        est = top_exponent(MatrixFamily.A, SamplingSpec.periodic((5,)), 3, n_steps=1, n_samples=1, workers=1)
        assert est.exponents[0] == pytest.approx(math.log(cnorm(a_matrix(3, 5))))
        assert est.exponents[0] == pytest.approx(math.log(6))
        assert est.burn_in == 0

    def test_z_top_exponent(self, period_two):
        est = top_exponent(MatrixFamily.Z, period_two, 3, n_steps=2000, n_samples=1, workers=1)
        assert est.exponents[0] == pytest.approx(log_moduli(z_matrix(3, 2))[0], abs=1e-2)

    def test_exponents_sum_to_zero(self, period_two):
        est = spectrum(MatrixFamily.A, period_two, 4, n_steps=500, n_samples=2, workers=1)
        for row in est.samples:
            assert abs(sum(row)) < 1e-8

    def test_inverse_family_rejected_for_top(self, period_two):
        with pytest.raises(ValueError):
            top_exponent(MatrixFamily.A_INV, period_two, 3, n_steps=10, n_samples=1)

    @pytest.mark.parametrize("n_steps,n_samples,burn_in", [(0, 1, 0), (10, 0, 0), (10, 1, -1)])
    def test_invalid_sizes(self, period_two, n_steps, n_samples, burn_in):
        with pytest.raises(ValueError):
            spectrum(MatrixFamily.A, period_two, 3, n_steps, n_samples, burn_in)


class TestPeriodicOracle:
    def test_reference_single_letter(self):
        assert list(periodic_reference(MatrixFamily.A, (2,), 3)) == pytest.approx(log_moduli(a_matrix(3, 2)))

    def test_reference_is_per_step(self):
        expected = [v / 2 for v in log_moduli(a_matrix(3, 2) @ a_matrix(3, 3))]
        assert list(periodic_reference(MatrixFamily.A, (2, 3), 3)) == pytest.approx(expected)

    @pytest.mark.parametrize("pattern", [(2,), (2, 3)])
    def test_spectrum_matches_reference(self, pattern):
        spec = SamplingSpec.periodic(pattern)
        est = spectrum(MatrixFamily.A, spec, 3, n_steps=2000, n_samples=1, workers=1)
        report = periodic_oracle(MatrixFamily.A, spec, 3, est)
        assert report.passed

    def test_ten_thousand_steps_within_1e5(self, period_two):
        est = spectrum(MatrixFamily.A, period_two, 3, n_steps=10_000, n_samples=1, workers=1)
        report = periodic_oracle(MatrixFamily.A, period_two, 3, est)
        assert report.values["max_error"] < 1e-5

    def test_top_only_compares_first(self, period_two):
        est = top_exponent(MatrixFamily.Z, period_two, 3, n_steps=500, n_samples=1, workers=1)
        report = periodic_oracle(MatrixFamily.Z, period_two, 3, est)
        assert report.passed
        assert len(report.values["reference"]) == 1

    def test_all_ones_skipped(self):
        spec = SamplingSpec.periodic((1,))
        est = spectrum(MatrixFamily.A, spec, 3, n_steps=200, n_samples=1, workers=1)
        assert periodic_oracle(MatrixFamily.A, spec, 3, est).checks[0].status is CheckStatus.SKIP

    def test_needs_periodic_spec(self):
        spec = SamplingSpec.geometric(0.5, 10)
        est = spectrum(MatrixFamily.A, spec, 3, n_steps=50, n_samples=1, workers=1)
        with pytest.raises(ValueError):
            periodic_oracle(MatrixFamily.A, spec, 3, est)

    def test_gap_reference(self, period_two):
        report = exponent_gap(period_two, 3, n_steps=1000, n_samples=1, workers=1)
        assert report.values["gap_reference"] == pytest.approx(math.log(2.24698 / 1.80194), abs=1e-4)
        assert report.values["gap"] == pytest.approx(report.values["gap_reference"], abs=1e-4)


class TestDeterminism:
    def test_worker_count_does_not_change_estimate(self):
        spec = SamplingSpec.geometric(0.5, 10, seed=11)
        one = spectrum(MatrixFamily.A, spec, 3, n_steps=300, n_samples=6, workers=1)
        many = spectrum(MatrixFamily.A, spec, 3, n_steps=300, n_samples=6, workers=4)
        assert one.exponents == many.exponents
        assert one.samples == many.samples

    def test_seed_changes_estimate(self):
        a = top_exponent(MatrixFamily.A, SamplingSpec.geometric(0.5, 10, seed=1), 3, 300, 3, workers=1)
        b = top_exponent(MatrixFamily.A, SamplingSpec.geometric(0.5, 10, seed=2), 3, 300, 3, workers=1)
        assert a.samples != b.samples


class TestReports:
    def test_gap_periodic(self, period_two):
        report = exponent_gap(period_two, 3, n_steps=1000, n_samples=2, workers=1)
        assert report.passed
        assert report.values["gap"] > 0.1

    def test_gap_all_ones_skipped(self):
        report = exponent_gap(SamplingSpec.periodic((1,)), 3, n_steps=200, n_samples=2, workers=1)
        assert report.checks[0].status is CheckStatus.SKIP
        assert report.passed

    def test_second_exponent_periodic(self, period_two):
        report = second_exponent_sign(period_two, 3, n_steps=1000, n_samples=2, workers=1)
        assert report.passed
        assert report.values["lambda1_plus_lambdad"] < 0

    def test_inverse_consistency_periodic(self, period_two):
        report = inverse_consistency(period_two, 3, n_steps=1000, n_samples=2, workers=1)
        assert report.passed
        assert len(report.checks) == 3

    def test_sweep_rows(self, period_two):
        rows = sweep(MatrixFamily.A, period_two, 3, [2, 3], n_steps=300, n_samples=1, workers=1)
        assert [r["kmax"] for r in rows] == [2, 3]
        assert rows[1]["spec"] == "periodic(3)"
        assert rows[1]["lambda_1"] == pytest.approx(log_moduli(a_matrix(3, 3))[0], abs=2e-2)
        assert set(rows[0]) >= {"lambda_1", "ci95_3"}


@pytest.mark.slow
class TestMonteCarlo:
    def test_gap_geometric(self):
        report = exponent_gap(SamplingSpec.geometric(0.5, 20, seed=1), 3, n_steps=3000, n_samples=8)
        assert report.passed

    def test_second_exponent_geometric(self):
        report = second_exponent_sign(SamplingSpec.geometric(0.5, 20, seed=2), 3, n_steps=3000, n_samples=8)
        assert report.passed
