"""Tests for state models."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from stable_limit_lab.state import (
    CoefficientFamily,
    ConditionReport,
    DiscreteSpectralMeasure,
    Experiment,
    ExperimentConfig,
    FunctionalSection,
    LabState,
    MAProcessSpec,
    PairLevyMeasure,
    ParamRep,
    StableParams,
    StableVectorModel,
    StepPath,
    TruncCovCurve,
    Verdict,
    WorkflowStatus,
)


class TestStableParams:
    """Tests for StableParams."""

    def test_defaults(self):
        """Test creating a standard symmetric law."""
        params = StableParams(alpha=1.5)

        assert params.beta == 0.0
        assert params.scale == 1.0
        assert params.is_symmetric

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha": 0.0},
            {"alpha": 2.0},
            {"alpha": 1.5, "beta": 1.1},
            {"alpha": 1.5, "scale": 0.0},
            {"alpha": 1.5, "location": math.inf},
        ],
    )
    def test_domain_violations(self, kwargs):
        """Test parameters outside the domain are rejected."""
        with pytest.raises(ValidationError):
            StableParams(**kwargs)

    def test_alpha_one_requires_symmetry(self):
        """Test alpha = 1 admits beta = 0 only."""
        StableParams(alpha=1.0, beta=0.0)
        with pytest.raises(ValidationError, match="alpha = 1"):
            StableParams(alpha=1.0, beta=0.5)

    def test_frozen(self):
        """Test params are immutable."""
        params = StableParams(alpha=1.2)
        with pytest.raises(ValidationError):
            params.alpha = 1.3


class TestSpectralMeasure:
    """Tests for DiscreteSpectralMeasure and StableVectorModel."""

    def test_shift_defaults_to_zero(self):
        """Test the shift is filled in with zeros."""
        gamma = DiscreteSpectralMeasure(dimension=2, atoms=[[1.0, 0.0]], weights=[1.0])
        assert gamma.shift == [0.0, 0.0]

    def test_non_unit_atom_rejected(self):
        """Test atoms must lie on the unit sphere."""
        with pytest.raises(ValidationError, match="unit vector"):
            DiscreteSpectralMeasure(dimension=2, atoms=[[1.0, 1.0]], weights=[1.0])

    def test_nonpositive_weight_rejected(self):
        """Test weights must be positive."""
        with pytest.raises(ValidationError, match="positive"):
            DiscreteSpectralMeasure(dimension=1, atoms=[[1.0]], weights=[0.0])

    def test_symmetry(self):
        """Test the symmetry check pairs atoms with their mirrors."""
        sym = DiscreteSpectralMeasure(dimension=1, atoms=[[1.0], [-1.0]], weights=[0.5, 0.5])
        skew = DiscreteSpectralMeasure(dimension=1, atoms=[[1.0], [-1.0]], weights=[0.7, 0.3])

        assert sym.is_symmetric()
        assert not skew.is_symmetric()

    def test_alpha_one_model_requires_symmetric_measure(self):
        """Test alpha = 1 vectors must have a symmetric spectral measure."""
        gamma = DiscreteSpectralMeasure(dimension=1, atoms=[[1.0]], weights=[1.0])
        with pytest.raises(ValidationError, match="symmetric"):
            StableVectorModel(alpha=1.0, gamma=gamma)

    def test_pair_measure_needs_dimension_two(self):
        """Test pair Levy measures live on R^2."""
        gamma = DiscreteSpectralMeasure(dimension=1, atoms=[[1.0]], weights=[1.0])
        with pytest.raises(ValidationError, match="R\\^2"):
            PairLevyMeasure(model=StableVectorModel(alpha=1.5, gamma=gamma))


class TestMAProcessSpec:
    """Tests for MAProcessSpec and CoefficientFamily."""

    def test_memory(self):
        """Test q is the index of the last coefficient."""
        spec = MAProcessSpec(coeffs=[1.0, 0.5, 0.25], innovation=StableParams(alpha=1.5))
        assert spec.memory == 2
        assert spec.alpha == 1.5

    def test_negative_coefficient_rejected(self):
        """Test coefficients must be nonnegative."""
        with pytest.raises(ValidationError, match="nonnegative"):
            MAProcessSpec(coeffs=[1.0, -0.1], innovation=StableParams(alpha=1.5))

    def test_zero_coefficients_rejected(self):
        """Test at least one coefficient must be positive."""
        with pytest.raises(ValidationError, match="positive"):
            MAProcessSpec(coeffs=[0.0, 0.0], innovation=StableParams(alpha=1.5))

    def test_location_requires_alpha_below_one(self):
        """Test innovations with alpha >= 1 must be centered."""
        with pytest.raises(ValidationError, match="location 0"):
            MAProcessSpec(coeffs=[1.0], innovation=StableParams(alpha=1.5, location=0.3))
        MAProcessSpec(coeffs=[1.0], innovation=StableParams(alpha=0.7, location=0.3))

    def test_family_needs_its_parameter(self):
        """Test each family kind requires its own parameter."""
        with pytest.raises(ValidationError, match="rho"):
            CoefficientFamily(kind="geometric")
        with pytest.raises(ValidationError, match="theta"):
            CoefficientFamily(kind="power")


class TestReports:
    """Tests for report and curve models."""

    def test_pass_requires_finite_rhs(self):
        """Test a pass verdict cannot carry an infinite right-hand side."""
        with pytest.raises(ValidationError, match="finite"):
            ConditionReport(rhs_limit=math.inf, diverging=True, verdict=Verdict.PASS)

        report = ConditionReport(rhs_limit=math.inf, diverging=True, verdict=Verdict.FAIL)
        assert not report.rhs_finite

    def test_curve_grid_must_increase(self):
        """Test TruncCovCurve rejects a non-increasing grid."""
        with pytest.raises(ValidationError, match="increasing"):
            TruncCovCurve(a_grid=[1.0, 1.0], values=[0.1, 0.2], lag_range=[1])


class TestPaths:
    """Tests for StepPath and ParamRep."""

    def test_step_path(self):
        """Test a valid step path."""
        path = StepPath(jump_times=[0.0, 0.5], values=[0.0, 1.0])
        assert path.segments == 2
        assert isinstance(path.jump_times, np.ndarray)

    @pytest.mark.parametrize(
        "times",
        [[0.1, 0.5], [0.0, 0.5, 0.5], [0.0, 1.5]],
    )
    def test_invalid_jump_times(self, times):
        """Test jump times must start at 0, increase strictly and stay in [0, 1]."""
        with pytest.raises(ValidationError):
            StepPath(jump_times=times, values=[0.0] * len(times))

    def test_param_rep_requires_monotone_jumps(self):
        """Test values within a jump must move monotonically."""
        ParamRep(points=np.array([[0.0, 0.0], [0.5, 0.0], [0.5, 1.0], [1.0, 1.0]]))
        with pytest.raises(ValidationError, match="monotone"):
            ParamRep(points=np.array([[0.5, 0.0], [0.5, 1.0], [0.5, 0.5]]))


class TestExperimentConfig:
    """Tests for ExperimentConfig."""

    def test_defaults(self):
        """Test a minimal config."""
        spec = MAProcessSpec(coeffs=[1.0], innovation=StableParams(alpha=1.5))
        config = ExperimentConfig(spec=spec)

        assert config.master_seed == 0
        assert config.reps >= 1000
        assert config.functional.t_points == [0.0, 0.5, 1.0]

    def test_n_grid_must_increase(self):
        """Test n_grid must be strictly increasing."""
        spec = MAProcessSpec(coeffs=[1.0], innovation=StableParams(alpha=1.5))
        with pytest.raises(ValidationError, match="increasing"):
            ExperimentConfig(spec=spec, n_grid=[100, 100])

    def test_t_points_order(self):
        """Test the three time points must be ordered in [0, 1]."""
        with pytest.raises(ValidationError, match="t_points"):
            FunctionalSection(t_points=[0.5, 0.2, 1.0])


class TestLabState:
    """Tests for the pipeline LabState."""

    def test_initial_state(self):
        """Test creating the initial pipeline state."""
        state = LabState(config_path="experiment.json", experiment=Experiment.MAIN)

        assert state.status == WorkflowStatus.IN_PROGRESS
        assert state.config is None
        assert state.newman_reports == []
        assert state.error_kind is None

    def test_error_kind_values(self):
        """Test error_kind only admits the known categories."""
        with pytest.raises(ValidationError):
            LabState(config_path="x.json", experiment=Experiment.MAIN, error_kind="fatal")
