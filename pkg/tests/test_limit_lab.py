"""Tests for the limit-theorem checks."""

import numpy as np
import pytest

from stable_limit_lab.config import settings
from stable_limit_lab.exceptions import ContractError, ParameterDomainError, UsageError
from stable_limit_lab.state import (
    CoefficientFamily,
    ExperimentConfig,
    MAProcessSpec,
    StableParams,
    Verdict,
)
from stable_limit_lab.tools.limit_lab import (
    battery_specs,
    decompose_truncated_sum,
    default_lambda_grid,
    default_truncation,
    newman_battery,
    newman_gap_check,
    newman_majorant,
    truncation_split_check,
    verify_alpha1_identity,
    verify_main,
    verify_tangent_convergence,
)
from stable_limit_lab.tools.process_gen import limit_mu_inf, spec_from_family
from stable_limit_lab.tools.stable_core import ks_noise_floor


def make_config(coeffs, alpha=1.5, beta=0.0, **kwargs) -> ExperimentConfig:
    spec = MAProcessSpec(coeffs=coeffs, innovation=StableParams(alpha=alpha, beta=beta))
    return ExperimentConfig(spec=spec, **kwargs)


class TestDefaults:
    """Tests for default truncation and lambda grid."""

    def test_truncation_below_eta(self):
        """Test a^-alpha stays below the split target."""
        a = default_truncation(1.5)
        assert a ** -1.5 < 0.01

    def test_lambda_grid(self):
        """Test the grid covers (0, 2]."""
        grid = default_lambda_grid()
        assert len(grid) == 20
        assert grid[0] > 0
        assert grid[-1] == pytest.approx(2.0)


class TestMain:
    """Tests for verify_main."""

    def test_converges(self, stream):
        """Test S_n / B_n is within noise of the limit law."""
        config = make_config([1.0, 0.5], n_grid=[50, 500], reps=4000, master_seed=3)
        report = verify_main(config, stream, config_hash="abc")

        assert report.limit == limit_mu_inf(config.spec)
        assert [row.n for row in report.rows] == [50, 500]
        assert report.config_hash == "abc"
        assert report.rows[-1].ks < 5 * ks_noise_floor(4000)
        assert report.rows[-1].ecf_gap < 0.1

    def test_diverging_precondition(self, stream):
        """Test a diverging lag sum is a contract violation."""
        family = CoefficientFamily(kind="power", theta=0.8, length=60)
        config = ExperimentConfig(spec=spec_from_family(family, StableParams(alpha=1.5)), reps=1000)
        with pytest.raises(ContractError):
            verify_main(config, stream)


class TestAlphaOne:
    """Tests for verify_alpha1_identity."""

    def test_identity_holds(self, stream):
        """Test S_n / n has the law of X_1 for symmetric Cauchy innovations."""
        spec = MAProcessSpec(coeffs=[1.0, 0.5, 0.25], innovation=StableParams(alpha=1.0))
        report = verify_alpha1_identity(spec, [10, 100], 5000, stream)

        assert report.verdict == Verdict.PASS
        assert len(report.rows) == 2

    def test_requires_alpha_one(self, stream):
        """Test other indices are a usage error."""
        spec = MAProcessSpec(coeffs=[1.0], innovation=StableParams(alpha=1.5))
        with pytest.raises(UsageError):
            verify_alpha1_identity(spec, [10], 1000, stream)


class TestTangent:
    """Tests for verify_tangent_convergence."""

    def test_iid_gap_vanishes(self):
        """Test the tangent of an i.i.d. sequence is already at its limit."""
        spec = MAProcessSpec(coeffs=[1.0], innovation=StableParams(alpha=1.5, beta=0.5))
        table = verify_tangent_convergence(spec, [10, 100])
        assert all(row.gap < 1e-12 for row in table.rows)

    def test_gaps_decrease(self):
        """Test the gaps shrink monotonically and strict stability holds."""
        spec = MAProcessSpec(coeffs=[1.0, 0.5, 0.25], innovation=StableParams(alpha=1.3, beta=0.2))
        table = verify_tangent_convergence(spec, [10, 100, 1000])

        assert table.monotone
        assert table.rows[0].gap > table.rows[-1].gap
        assert all(row.stability_gap < 1e-10 for row in table.rows)

    def test_tracked_logarithm_matches_exponent(self):
        """Test the power taken from the cf alone agrees with exp(psi / N)."""
        spec = MAProcessSpec(coeffs=[1.0, 0.5, 0.25], innovation=StableParams(alpha=1.3, beta=0.8))
        table = verify_tangent_convergence(spec, [10, 100, 1000])

        for row in table.rows:
            assert row.tracked_points == settings.lambda_points
            assert row.tracked_gap is not None
            assert row.tracked_gap < 1e-10

    def test_untrackable_lambda_are_skipped(self):
        """Test lambda where cf(mu_N) underflows are left out of the tracked comparison."""
        spec = MAProcessSpec(coeffs=[1.0, 0.5], innovation=StableParams(alpha=1.5))
        table = verify_tangent_convergence(spec, [10], np.array([1.0, 50.0]))

        assert table.rows[0].tracked_points == 1
        assert table.rows[0].tracked_gap < 1e-10


class TestSplit:
    """Tests for decompose_truncated_sum and truncation_split_check."""

    def test_decompose(self):
        """Test T and V of a single path."""
        parts = decompose_truncated_sum(np.array([[0.5, 3.0], [0.1, -0.2]]), 1.0, 1.0)
        np.testing.assert_allclose(parts.t_part, [1.5, -0.1])
        np.testing.assert_allclose(parts.v_part, [2.0, 0.0], atol=1e-15)
        assert parts.nonzero_v.tolist() == [True, False]

    def test_union_bound(self, stream):
        """Test P(V != 0) stays below n P(|X_1| > a B_n)."""
        config = make_config([1.0, 0.5], n_grid=[10, 100], reps=2000)
        table = truncation_split_check(config, stream, a=2.0)

        assert table.a == 2.0
        assert table.limit_bound == pytest.approx(2.0**-1.5)
        assert all(row.within_bound for row in table.rows)
        assert all(row.iid_exact <= row.bound for row in table.rows)


class TestNewman:
    """Tests for Newman's inequality."""

    def test_majorant(self):
        """Test the majorant of the two-tap average."""
        spec = MAProcessSpec(coeffs=[1.0, 1.0], innovation=StableParams(alpha=1.5))
        assert newman_majorant(spec, 4, 1.0, 1.0) == pytest.approx(0.5)

    def test_inequality_holds(self, stream):
        """Test the inequality for an associated sequence."""
        spec = MAProcessSpec(coeffs=[1.0, 1.0], innovation=StableParams(alpha=1.5))
        report = newman_gap_check(spec, 5, 4, 1.0, 1.0, 5000, stream)

        assert report.holds
        assert report.rhs > 0
        assert report.slack == pytest.approx(report.rhs - report.lhs)

    def test_invalid_blocks(self, stream):
        """Test empty blocks are rejected."""
        spec = MAProcessSpec(coeffs=[1.0], innovation=StableParams(alpha=1.5))
        with pytest.raises(ParameterDomainError):
            newman_gap_check(spec, 0, 4, 1.0, 1.0, 1000, stream)

    def test_battery(self, stream):
        """Test the battery covers twenty associated processes."""
        assert len(battery_specs()) == 20
        reports = newman_battery(1000, stream)
        assert len(reports) == 20
        assert all(r.m == 10 and r.N == 10 for r in reports)
