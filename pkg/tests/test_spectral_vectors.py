"""Tests for jointly stable vectors."""

import cmath
import math

import numpy as np
import pytest

from stable_limit_lab.exceptions import ConfigError, ContractError, ParameterDomainError
from stable_limit_lab.state import (
    DiscreteSpectralMeasure,
    MAProcessSpec,
    PairLevyMeasure,
    StableParams,
    StableVectorModel,
)
from stable_limit_lab.tools.process_gen import pair_spectral
from stable_limit_lab.tools.spectral_vectors import (
    cf_vector,
    is_associated,
    is_strictly_stable,
    log_cf_vector,
    measure_from_json,
    measure_to_json,
    merge_atoms,
    model_from_vectors,
    project_measure,
    sample_vector,
    scalar_weights,
    spectral_covariance,
    truncated_levy_cov,
)
from stable_limit_lab.tools.stable_core import k_alpha, log_cf_stable

DIAG = 1 / math.sqrt(2)


def scalar_model(params: StableParams) -> StableVectorModel:
    w_plus, w_minus = scalar_weights(params)
    return model_from_vectors(params.alpha, np.array([[1.0], [-1.0]]), np.array([w_plus, w_minus]))


class TestConstruction:
    """Tests for merge_atoms, model_from_vectors and scalar_weights."""

    def test_merge_adds_weights(self):
        """Test equal atoms merge and zero weights vanish."""
        atoms, weights = merge_atoms(
            np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([1.0, 2.0, 0.0])
        )
        assert atoms.tolist() == [[1.0, 0.0]]
        assert weights.tolist() == [3.0]

    def test_vectors_scale_weights(self):
        """Test |v|^alpha goes into the weight of the direction."""
        model = model_from_vectors(1.5, np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 0.0]]), np.ones(3))
        assert model.gamma.atoms == [[1.0, 0.0]]
        assert model.gamma.weights[0] == pytest.approx(1 + 2**1.5)

    def test_scalar_weights(self):
        """Test w+ + w- = sigma^alpha / K and the skewness split."""
        params = StableParams(alpha=1.5, beta=0.5, scale=2.0)
        w_plus, w_minus = scalar_weights(params)
        assert w_plus + w_minus == pytest.approx(2**1.5 / k_alpha(1.5))
        assert w_plus / w_minus == pytest.approx(3.0)

    @pytest.mark.parametrize("params", [
        StableParams(alpha=1.5, beta=0.5, scale=2.0),
        StableParams(alpha=0.6, beta=-0.4),
        StableParams(alpha=1.0, scale=0.5),
    ])
    def test_scalar_model_matches_univariate_law(self, params):
        """Test a two-atom model on the line reproduces the univariate exponent."""
        model = scalar_model(params)
        t = np.linspace(-2, 2, 9)[:, None]
        np.testing.assert_allclose(log_cf_vector(model, t), log_cf_stable(params, t[:, 0]), atol=1e-12)


class TestProjection:
    """Tests for project_measure."""

    def test_projection_is_marginal(self):
        """Test the projection of (Z1 + Z2, Z2) on the first coordinate."""
        params = StableParams(alpha=1.2, beta=0.3)
        w_plus, w_minus = scalar_weights(params)
        vectors = np.array([[1.0, 0.0], [1.0, 1.0], [-1.0, 0.0], [-1.0, -1.0]])
        model = model_from_vectors(1.2, vectors, np.array([w_plus, w_plus, w_minus, w_minus]))
        first = project_measure(model, [0])

        marginal = StableParams(alpha=1.2, beta=0.3, scale=2 ** (1 / 1.2))
        t = np.linspace(-1, 1, 5)[:, None]
        np.testing.assert_allclose(log_cf_vector(first, t), log_cf_stable(marginal, t[:, 0]), atol=1e-12)

    def test_alpha_one_symmetric_projection_has_no_drift(self):
        """Test the compensator drift cancels for symmetric measures."""
        model = model_from_vectors(1.0, np.array([[DIAG, DIAG], [-DIAG, -DIAG]]), np.array([0.5, 0.5]))
        first = project_measure(model, [0])
        assert first.gamma.shift[0] == pytest.approx(0.0, abs=1e-15)

    def test_out_of_range(self):
        """Test coordinates outside the dimension are rejected."""
        model = scalar_model(StableParams(alpha=1.5))
        with pytest.raises(ParameterDomainError):
            project_measure(model, [1])


class TestPredicates:
    """Tests for is_associated and is_strictly_stable."""

    def test_associated(self):
        """Test orthant membership of the atoms."""
        inside = DiscreteSpectralMeasure(dimension=2, atoms=[[0.6, 0.8], [-0.6, -0.8]], weights=[1.0, 1.0])
        outside = DiscreteSpectralMeasure(dimension=2, atoms=[[0.6, -0.8]], weights=[1.0])
        axis = DiscreteSpectralMeasure(dimension=2, atoms=[[1.0, 0.0], [0.0, -1.0]], weights=[1.0, 1.0])

        assert is_associated(inside)
        assert not is_associated(outside)
        assert is_associated(axis)

    def test_strict_stability(self):
        """Test a shift breaks strict stability when alpha != 1."""
        centered = scalar_model(StableParams(alpha=1.5))
        shifted = model_from_vectors(0.7, np.array([[1.0]]), np.array([1.0]), shift=[0.5])

        assert is_strictly_stable(centered)
        assert not is_strictly_stable(shifted)


class TestSampling:
    """Tests for cf_vector and sample_vector."""

    def test_cf_at_zero(self):
        """Test cf(0) = 1."""
        spec = MAProcessSpec(coeffs=[1.0, 0.5], innovation=StableParams(alpha=1.4, beta=0.2))
        model = pair_spectral(spec, 1).model
        assert cf_vector(model, np.zeros(2)) == pytest.approx(1.0)

    def test_wrong_dimension(self):
        """Test t must match the dimension."""
        with pytest.raises(ParameterDomainError):
            log_cf_vector(scalar_model(StableParams(alpha=1.5)), np.zeros(3))

    def test_cf_against_quadrature(self, radial_quadrature):
        """Test the cf of two rays at alpha = 1.3 against quadrature along each ray."""
        atoms, weights = [[0.6, 0.8], [1.0, 0.0]], [0.7, 0.4]
        model = StableVectorModel(
            alpha=1.3, gamma=DiscreteSpectralMeasure(dimension=2, atoms=atoms, weights=weights)
        )
        t = np.array([0.7, -0.2])
        exponent = sum(w * radial_quadrature(1.3, float(np.dot(t, s))) for s, w in zip(atoms, weights))
        assert complex(cf_vector(model, t)) == pytest.approx(cmath.exp(exponent), abs=1e-7)

    @pytest.mark.parametrize("alpha", [0.6, 1.7])
    def test_single_ray_against_quadrature(self, alpha, radial_quadrature):
        """Test one atom on the diagonal carries the compensated radial integral of its projection."""
        model = StableVectorModel(
            alpha=alpha, gamma=DiscreteSpectralMeasure(dimension=2, atoms=[[DIAG, DIAG]], weights=[1.5])
        )
        t = np.array([0.7, -0.2])
        expected = 1.5 * radial_quadrature(alpha, 0.5 * DIAG)
        assert complex(log_cf_vector(model, t)) == pytest.approx(expected, abs=1e-8)

    def test_alpha_one_against_quadrature(self, radial_quadrature):
        """Test a symmetric alpha = 1 measure, whose ray drifts u (1 - gamma - log|u|) cancel in pairs."""
        atoms = [[0.6, 0.8], [-0.6, -0.8], [1.0, 0.0], [-1.0, 0.0]]
        weights = [1.0, 1.0, 0.4, 0.4]
        model = StableVectorModel(
            alpha=1.0, gamma=DiscreteSpectralMeasure(dimension=2, atoms=atoms, weights=weights)
        )
        t = np.array([0.7, -0.2])
        exponent = sum(w * radial_quadrature(1.0, float(np.dot(t, s))) for s, w in zip(atoms, weights))

        assert exponent.imag == pytest.approx(0.0, abs=1e-8)
        assert complex(log_cf_vector(model, t)) == pytest.approx(exponent, abs=1e-8)
        assert exponent.real == pytest.approx(-math.pi * (0.26 + 0.4 * 0.7), abs=1e-8)

    def test_sampling_requires_strict_stability(self, stream):
        """Test shifted models cannot be sampled."""
        shifted = model_from_vectors(0.7, np.array([[1.0]]), np.array([1.0]), shift=[0.5])
        with pytest.raises(ContractError):
            sample_vector(shifted, 10, stream)

    @pytest.mark.parametrize("innovation", [
        StableParams(alpha=1.5, beta=0.4),
        StableParams(alpha=1.0),
        StableParams(alpha=0.8, beta=-0.5),
    ])
    def test_ecf_matches_cf(self, innovation, stream):
        """Test draws of (X_1, X_2) follow the exact joint cf."""
        spec = MAProcessSpec(coeffs=[1.0, 0.6, 0.3], innovation=innovation)
        model = pair_spectral(spec, 1).model
        x = sample_vector(model, 40_000, stream)
        t = np.array([[0.3, 0.0], [0.2, 0.5], [-0.4, 0.3], [0.6, 0.6]])
        empirical = np.exp(1j * x @ t.T).mean(axis=0)
        assert np.max(np.abs(empirical - cf_vector(model, t))) < 0.03


class TestTruncatedCovariance:
    """Tests for spectral_covariance and truncated_levy_cov."""

    def test_spectral_covariance(self):
        """Test the 1-based covariance functional."""
        gamma = DiscreteSpectralMeasure(dimension=2, atoms=[[0.6, 0.8]], weights=[2.0])
        assert spectral_covariance(gamma, 1, 2) == pytest.approx(0.96)
        assert spectral_covariance(gamma, 2, 2) == pytest.approx(1.28)
        with pytest.raises(ParameterDomainError):
            spectral_covariance(gamma, 0, 1)

    def test_two_tap_moving_average(self):
        """Test the lag-1 value of X_j = Z_j + Z_(j-1) at alpha = 1.5 is 2."""
        spec = MAProcessSpec(coeffs=[1.0, 1.0], innovation=StableParams(alpha=1.5))
        pair = pair_spectral(spec, 1)

        assert truncated_levy_cov(pair, 1.0) == pytest.approx(2.0, rel=1e-10)
        assert truncated_levy_cov(pair, 4.0) == pytest.approx(4.0, rel=1e-10)

    def test_independent_coordinates(self):
        """Test atoms on the axes contribute nothing."""
        spec = MAProcessSpec(coeffs=[1.0], innovation=StableParams(alpha=1.3))
        assert truncated_levy_cov(pair_spectral(spec, 1), 1.0) == 0.0

    def test_alpha_one_closed_form(self):
        """Test the logarithmic middle term at alpha = 1 against quadrature."""
        from scipy import integrate

        gamma = DiscreteSpectralMeasure(dimension=2, atoms=[[0.6, 0.8]], weights=[1.0])
        pair = PairLevyMeasure(model=StableVectorModel(alpha=1.5, gamma=gamma))
        alpha1 = PairLevyMeasure(
            model=StableVectorModel(
                alpha=1.0,
                gamma=DiscreteSpectralMeasure(dimension=2, atoms=[[0.6, 0.8], [-0.6, -0.8]], weights=[1.0, 1.0]),
            )
        )

        def radial(alpha, s1, s2):
            f = lambda x: np.clip(x, -1.0, 1.0)  # noqa: E731
            value, _ = integrate.quad(lambda r: f(r * s1) * f(r * s2) / r ** (1 + alpha), 0, 5, points=[1.25, 5 / 3])
            tail, _ = integrate.quad(lambda r: np.sign(s1 * s2) / r ** (1 + alpha), 5, np.inf)
            return value + tail

        assert truncated_levy_cov(pair, 1.0) == pytest.approx(radial(1.5, 0.6, 0.8), rel=1e-6)
        assert truncated_levy_cov(alpha1, 1.0) == pytest.approx(2 * radial(1.0, 0.6, 0.8), rel=1e-6)

    def test_requires_association(self):
        """Test a pair with mass in the second quadrant is rejected."""
        gamma = DiscreteSpectralMeasure(dimension=2, atoms=[[0.6, -0.8]], weights=[1.0])
        pair = PairLevyMeasure(model=StableVectorModel(alpha=1.5, gamma=gamma))
        with pytest.raises(ContractError):
            truncated_levy_cov(pair, 1.0)


class TestJSON:
    """Tests for measure_to_json and measure_from_json."""

    def test_round_trip(self):
        """Test a model survives the JSON form."""
        model = scalar_model(StableParams(alpha=1.5, beta=0.2))
        assert measure_from_json(measure_to_json(model)) == model

    def test_invalid_document(self):
        """Test schema violations are reported."""
        with pytest.raises(ConfigError) as exc_info:
            measure_from_json({"alpha": 2.5, "atoms": [[1.0]], "weights": [-1.0]})
        assert len(exc_info.value.diagnostics) == 2
