"""
State definitions for the Stable Limit Lab.

This module defines all the Pydantic models used by the tools and the
LangGraph experiment pipeline: stable laws and their spectral measures,
moving-average process specs, diagnostic and convergence reports, step paths,
experiment configs and the pipeline state itself.
"""

import math
from enum import Enum
from typing import Any, Callable, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

ATOM_NORM_TOL = 1e-12
SYMMETRY_TOL = 1e-12


# -----------------------------------------------------------------------------
# Enums
# -----------------------------------------------------------------------------


class Verdict(str, Enum):
    """Outcome of a numerical verification."""

    PASS = "pass"
    FAIL = "fail"


class WorkflowStatus(str, Enum):
    """Overall pipeline status."""

    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"
    PRECONDITION_FAILED = "precondition_failed"
    FAILED = "failed"


class Experiment(str, Enum):
    """Experiments the pipeline can run."""

    DIAGNOSE = "diagnose"
    MAIN = "main"
    ALPHA1 = "alpha1"
    TANGENT = "tangent"
    FUNCTIONAL = "functional"
    NEWMAN = "newman"


# -----------------------------------------------------------------------------
# Univariate stable laws
# -----------------------------------------------------------------------------


class StableParams(BaseModel):
    """Univariate alpha-stable law in the 1-parameterization S_alpha(scale, beta, location)."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, lt=2, description="Index of stability")
    beta: float = Field(default=0.0, ge=-1, le=1, description="Skewness")
    scale: float = Field(default=1.0, gt=0, description="Scale sigma")
    location: float = Field(default=0.0, description="Location mu")

    @model_validator(mode="after")
    def _check_domain(self) -> "StableParams":
        for name in ("alpha", "beta", "scale", "location"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.alpha == 1.0 and self.beta != 0.0:
            raise ValueError("alpha = 1 requires beta = 0 (only symmetric 1-stable laws)")
        return self

    @property
    def is_symmetric(self) -> bool:
        return self.beta == 0.0 and self.location == 0.0


class MarginalTail(BaseModel):
    """Tail of |X_1|: P(|X_1| > x) ~ tail_constant * x^-alpha."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, lt=2)
    tail_constant: float = Field(gt=0, description="lim x^alpha P(|X_1| > x)")
    slowly_varying_limit: float = Field(gt=0, description="Constant limit of l(x)")
    right_fraction: float = Field(
        default=0.5, ge=0, le=1, description="Share of the tail mass on the positive side"
    )


class NormalizingConstant(BaseModel):
    """B_n solving n P(|X_1| > B_n) = 1."""

    n: int = Field(ge=1)
    value: float = Field(gt=0)
    asymptotic: float = Field(gt=0, description="(n * tail_constant)^(1/alpha)")
    fallback: bool = Field(
        default=False, description="True when no exact solution exists and the asymptotic value is used"
    )


class ConvPowerLaw(BaseModel):
    """Infinitely divisible law given by its characteristic function, raised to a power."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    base_cf: Callable[[np.ndarray], np.ndarray]
    exponent: float = Field(gt=0)
    base_exponent: Callable[[np.ndarray], np.ndarray] | None = Field(
        default=None,
        description="Characteristic exponent psi with base_cf = exp(psi); skips branch tracking when given",
    )


# -----------------------------------------------------------------------------
# Jointly stable vectors
# -----------------------------------------------------------------------------


class DiscreteSpectralMeasure(BaseModel):
    """Finite atomic measure on the unit sphere of R^N plus a shift vector."""

    model_config = ConfigDict(frozen=True)

    dimension: int = Field(ge=1)
    atoms: list[list[float]] = Field(min_length=1)
    weights: list[float] = Field(min_length=1)
    shift: list[float] = Field(default_factory=list)

    @model_validator(mode="before")
    @classmethod
    def _default_shift(cls, data: Any) -> Any:
        if isinstance(data, dict) and not data.get("shift") and data.get("dimension"):
            data = {**data, "shift": [0.0] * int(data["dimension"])}
        return data

    @model_validator(mode="after")
    def _check_measure(self) -> "DiscreteSpectralMeasure":
        if len(self.atoms) != len(self.weights):
            raise ValueError("atoms and weights must have the same length")
        for k, atom in enumerate(self.atoms):
            if len(atom) != self.dimension:
                raise ValueError(f"atom {k} has dimension {len(atom)}, expected {self.dimension}")
            norm = math.sqrt(sum(s * s for s in atom))
            if abs(norm - 1.0) > ATOM_NORM_TOL:
                raise ValueError(f"atom {k} is not a unit vector (norm {norm!r})")
        for k, w in enumerate(self.weights):
            if not (math.isfinite(w) and w > 0):
                raise ValueError(f"weight {k} must be positive and finite")
        if len(self.shift) != self.dimension:
            raise ValueError("shift must have one entry per coordinate")
        return self

    @property
    def atoms_array(self) -> np.ndarray:
        return np.asarray(self.atoms, dtype=float)

    @property
    def weights_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @property
    def shift_array(self) -> np.ndarray:
        return np.asarray(self.shift, dtype=float)

    def is_symmetric(self, tol: float = SYMMETRY_TOL) -> bool:
        """True when every atom s has a partner -s of equal weight."""
        atoms, weights = self.atoms_array, self.weights_array
        for s in atoms:
            same = weights[np.all(np.abs(atoms - s) <= tol, axis=1)].sum()
            mirror = weights[np.all(np.abs(atoms + s) <= tol, axis=1)].sum()
            if abs(same - mirror) > tol * max(1.0, same):
                return False
        return True


class StableVectorModel(BaseModel):
    """Jointly alpha-stable vector with a discrete spectral measure."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, lt=2)
    gamma: DiscreteSpectralMeasure

    @model_validator(mode="after")
    def _check_alpha_one(self) -> "StableVectorModel":
        if self.alpha == 1.0 and not self.gamma.is_symmetric():
            raise ValueError("alpha = 1 requires a symmetric spectral measure")
        return self

    @property
    def dimension(self) -> int:
        return self.gamma.dimension


class PairLevyMeasure(BaseModel):
    """Levy measure (dr / r^(1+alpha)) Gamma(ds) / tail_normalization of a stable pair."""

    model_config = ConfigDict(frozen=True)

    model: StableVectorModel
    tail_normalization: float = Field(
        default=1.0, gt=0, description="Divides the measure; the marginal tail constant for tangent pairs"
    )

    @field_validator("model")
    @classmethod
    def _check_pair(cls, model: StableVectorModel) -> StableVectorModel:
        if model.dimension != 2:
            raise ValueError("a pair Levy measure lives on R^2")
        return model


# -----------------------------------------------------------------------------
# Moving-average processes
# -----------------------------------------------------------------------------


class CoefficientFamily(BaseModel):
    """Coefficient family c_0, c_1, ... truncated at a finite length."""

    kind: Literal["geometric", "power"]
    rho: float | None = Field(default=None, gt=0, lt=1, description="c_i = rho^i")
    theta: float | None = Field(default=None, gt=0, description="c_i = (1 + i)^-theta")
    length: int = Field(default=200, ge=1)

    @model_validator(mode="after")
    def _check_parameter(self) -> "CoefficientFamily":
        if self.kind == "geometric" and self.rho is None:
            raise ValueError("a geometric family needs rho")
        if self.kind == "power" and self.theta is None:
            raise ValueError("a power family needs theta")
        return self


class MAProcessSpec(BaseModel):
    """X_j = sum_i c_i Z_(j-i) with nonnegative c_i and i.i.d. stable innovations Z."""

    model_config = ConfigDict(frozen=True)

    coeffs: list[float] = Field(min_length=1)
    innovation: StableParams
    family: CoefficientFamily | None = Field(
        default=None, description="Family the coefficients were truncated from, if any"
    )

    @model_validator(mode="after")
    def _check_spec(self) -> "MAProcessSpec":
        if any(not math.isfinite(c) or c < 0 for c in self.coeffs):
            raise ValueError("coefficients must be finite and nonnegative")
        if not any(c > 0 for c in self.coeffs):
            raise ValueError("at least one coefficient must be positive")
        z = self.innovation
        if 1.0 <= z.alpha < 2.0 and z.location != 0.0:
            raise ValueError("innovations with alpha in [1, 2) must have location 0")
        return self

    @property
    def alpha(self) -> float:
        return self.innovation.alpha

    @property
    def coeffs_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    @property
    def memory(self) -> int:
        """q: index of the last coefficient (support is c_0..c_q)."""
        return len(self.coeffs) - 1


class TangentModel(BaseModel):
    """Projection-consistent family of the finite-dimensional laws of the stable tangent."""

    model_config = ConfigDict(frozen=True)

    spec: MAProcessSpec
    slices: dict[int, StableVectorModel] = Field(default_factory=dict)


# -----------------------------------------------------------------------------
# Diagnostics
# -----------------------------------------------------------------------------


class MCEstimate(BaseModel):
    """Monte Carlo estimate with its standard error."""

    value: float
    se: float = Field(ge=0)


class TruncCovCurve(BaseModel):
    """a -> sum over lags of Cov(f_a(X_1), f_a(X_(1+r)))."""

    a_grid: list[float] = Field(min_length=2)
    values: list[float]
    lag_range: list[int]
    standard_errors: list[float] | None = None
    source: Literal["closed_form", "monte_carlo"] = "closed_form"

    @model_validator(mode="after")
    def _check_curve(self) -> "TruncCovCurve":
        if len(self.values) != len(self.a_grid):
            raise ValueError("one value per grid point is required")
        if any(a <= 0 for a in self.a_grid):
            raise ValueError("a_grid must be positive")
        if any(b <= a for a, b in zip(self.a_grid, self.a_grid[1:])):
            raise ValueError("a_grid must be strictly increasing")
        return self


class RVCheck(BaseModel):
    """Log-log slope of a truncated covariance curve against 2 - alpha."""

    slope: float
    intercept: float
    expected: float
    verdict: Verdict


class SingleLagRow(BaseModel):
    n: int
    b_n: float
    lhs: float
    se: float
    rhs: float
    rel_gap: float
    within_envelope: bool


class SingleLagTable(BaseModel):
    """n B_n^-2 Cov(f_(aB_n)(X_1), f_(aB_n)(X_(1+r))) against its Levy-integral limit."""

    lag: int
    a: float
    rows: list[SingleLagRow]
    limit: float
    unit_limit: float = Field(description="Limit at a = 1; limit / unit_limit = a^(2 - alpha)")


class ConditionRow(BaseModel):
    n: int
    b_n: float
    lhs: float
    se: float


class LagBreakdown(BaseModel):
    lag: int
    lhs: float
    se: float
    rhs: float


class UniformityRow(BaseModel):
    a: float
    lhs: float
    se: float
    rhs: float
    within_envelope: bool


class ConditionReport(BaseModel):
    """Both sides of the summability condition with per-lag breakdown and verdict."""

    lhs_sequence: list[ConditionRow] = Field(default_factory=list)
    rhs_limit: float
    per_lag: list[LagBreakdown] = Field(default_factory=list)
    uniformity: list[UniformityRow] = Field(default_factory=list)
    diverging: bool = False
    verdict: Verdict

    @model_validator(mode="after")
    def _check_verdict(self) -> "ConditionReport":
        if self.verdict == Verdict.PASS and not math.isfinite(self.rhs_limit):
            raise ValueError("a pass verdict requires a finite right-hand side")
        return self

    @property
    def rhs_finite(self) -> bool:
        return math.isfinite(self.rhs_limit) and not self.diverging


class LagSum(BaseModel):
    """A lag sum of covariance-like quantities with its divergence flag."""

    value: float
    per_lag: list[float] = Field(default_factory=list)
    diverging: bool = False


class HMatrix(BaseModel):
    """Empirical H(x, y) = F(x, y) - F(x) F(y) on a rectangular grid."""

    x_grid: list[float]
    y_grid: list[float]
    values: list[list[float]]
    se: list[list[float]]


class HoeffdingRow(BaseModel):
    """Integral of the empirical H over [-a, a]^2 against Cov(f_a(X_1), f_a(X_(1+r)))."""

    a: float
    integral: float
    covariance: float
    se: float
    within_envelope: bool


# -----------------------------------------------------------------------------
# Limit laboratory
# -----------------------------------------------------------------------------


class ConvergenceRow(BaseModel):
    n: int
    b_n: float
    bn_over_root: float = Field(description="B_n / n^(1/alpha)")
    ks: float = Field(ge=0, le=1)
    ks_noise_floor: float
    ecf_gap: float = Field(ge=0, le=2)
    ecf_gap_se: float
    fitted: StableParams | None = None


class ConvergenceReport(BaseModel):
    """Per-n distances between simulated S_n / B_n and the limit law."""

    limit: StableParams
    lambda_grid: list[float]
    rows: list[ConvergenceRow] = Field(default_factory=list)
    master_seed: int | None = None
    config_hash: str | None = None


class Alpha1Row(BaseModel):
    n: int
    ks: float
    p_value: float
    ecf_gap: float


class Alpha1Report(BaseModel):
    """Two-sample comparison of S_n / n with X_1 for symmetric 1-stable sequences."""

    rows: list[Alpha1Row] = Field(default_factory=list)
    verdict: Verdict


class TangentRow(BaseModel):
    N: int
    gap: float = Field(description="sup over lambda of |cf_(mu_N)^(1/N) - cf_(mu_inf)|")
    stability_gap: float = Field(
        description="sup over lambda of |conv power - cf_(mu_N)(lambda N^(-1/alpha))|"
    )
    tracked_points: int = Field(
        description="points lambda N^(-1/alpha) where |cf_(mu_N)| is large enough to track its logarithm"
    )
    tracked_gap: float | None = Field(
        default=None,
        description="sup over those points of |tracked-logarithm power - exponent power|; None if there are none",
    )


class TangentTable(BaseModel):
    rows: list[TangentRow] = Field(default_factory=list)
    monotone: bool


class SplitRow(BaseModel):
    n: int
    b_n: float
    empirical: float
    se: float
    bound: float
    iid_exact: float
    within_bound: bool


class SplitTable(BaseModel):
    """P(V_(n,n)^(a) != 0) against the union bound n P(|X_1| > a B_n)."""

    a: float
    limit_bound: float = Field(description="a^-alpha")
    rows: list[SplitRow] = Field(default_factory=list)


class TruncatedSumDecomposition(BaseModel):
    """S_n / B_n = T + V per replicate, with T the sum of truncated terms."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    t_part: np.ndarray
    v_part: np.ndarray
    nonzero_v: np.ndarray


class NewmanReport(BaseModel):
    """Monte Carlo check of Newman's inequality for blocks of truncated variables."""

    m: int
    N: int
    a: float
    lam: float
    lhs: float
    lhs_se: float
    rhs: float
    rhs_se: float
    slack: float
    holds: bool
    majorant: float = Field(description="lambda^2 a^(2-alpha) N^-1 sum_r min(r, N) L_r")


class FunctionalRow(BaseModel):
    n: int
    sup_ks: float
    terminal_ks: float
    oracle: Literal["exact", "fine_grid"]
    factorization_gap: float
    factorization_se: float
    cov_majorant: float


class FunctionalReport(BaseModel):
    rows: list[FunctionalRow] = Field(default_factory=list)
    t_points: list[float]
    oracle_grid_bias: float


# -----------------------------------------------------------------------------
# Paths
# -----------------------------------------------------------------------------


class StepPath(BaseModel):
    """Cadlag piecewise-constant path on [0, 1]; values[k] holds on [jump_times[k], jump_times[k+1])."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    jump_times: np.ndarray
    values: np.ndarray

    @field_validator("jump_times", "values", mode="before")
    @classmethod
    def _as_array(cls, v: Any) -> np.ndarray:
        return np.asarray(v, dtype=float)

    @model_validator(mode="after")
    def _check_path(self) -> "StepPath":
        t, v = self.jump_times, self.values
        if t.ndim != 1 or v.ndim != 1 or len(t) != len(v) or len(t) == 0:
            raise ValueError("jump_times and values must be 1-d of equal positive length")
        if t[0] != 0.0:
            raise ValueError("the first jump time must be 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("jump times must be strictly increasing")
        if t[-1] > 1.0:
            raise ValueError("jump times must lie in [0, 1]")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        return self

    @property
    def segments(self) -> int:
        return len(self.jump_times)


class ParamRep(BaseModel):
    """Discrete parametric representation of a completed graph as (time, value) points."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: np.ndarray

    @model_validator(mode="after")
    def _check_order(self) -> "ParamRep":
        p = self.points
        if p.ndim != 2 or p.shape[1] != 2:
            raise ValueError("points must be an (k, 2) array of (time, value)")
        dt = np.diff(p[:, 0])
        if np.any(dt < 0):
            raise ValueError("time coordinate must be nondecreasing")
        dv = np.diff(p[:, 1])
        # within a jump (dt == 0) the value moves monotonically from the left limit to the value
        start = 0
        for k in range(len(dt) + 1):
            if k == len(dt) or dt[k] > 0:
                run = dv[start:k]
                if run.size and not (np.all(run >= 0) or np.all(run <= 0)):
                    raise ValueError("values within a jump must be monotone")
                start = k + 1
        return self


class DistanceReport(BaseModel):
    m1: float
    j1: float
    uniform: float


# -----------------------------------------------------------------------------
# Experiment configs
# -----------------------------------------------------------------------------


class SimulateSection(BaseModel):
    n: int = Field(default=1000, ge=1)


class DiagnoseSection(BaseModel):
    n_grid: list[int] = Field(default=[1000, 10_000])
    reps: int = Field(default=200_000, ge=1000)
    a_grid: list[float] | None = Field(
        default=None, description="Truncation levels of the curve; None means 10 to 1000 marginal scales"
    )


class TangentSection(BaseModel):
    N_grid: list[int] = Field(default=[10, 100, 1000, 10_000])


class NewmanSection(BaseModel):
    m: int = Field(default=50, ge=1)
    N: int = Field(default=20, ge=1)
    a: float = Field(default=1.0, gt=0)
    lam: float = Field(default=1.0)
    reps: int = Field(default=20_000, ge=1000)
    battery: bool = False


class FunctionalSection(BaseModel):
    n_grid: list[int] = Field(default=[100, 1000, 10_000])
    reps: int = Field(default=10_000, ge=1000)
    t_points: list[float] = Field(default=[0.0, 0.5, 1.0])
    oracle_steps: int = Field(default=10_000, ge=10)

    @field_validator("t_points")
    @classmethod
    def _check_t_points(cls, t: list[float]) -> list[float]:
        if len(t) != 3 or not (0.0 <= t[0] < t[1] < t[2] <= 1.0):
            raise ValueError("t_points must be 0 <= t0 < t1 < t2 <= 1")
        return t


class ExperimentConfig(BaseModel):
    """Everything an experiment needs; built from a validated JSON config."""

    spec: MAProcessSpec
    n_grid: list[int] = Field(default=[100, 1000])
    reps: int = Field(default=10_000, ge=1000)
    a: float | None = Field(default=None, gt=0, description="Truncation level; None derives it from split_eta")
    lambda_grid: list[float] | None = None
    master_seed: int = Field(default=0, ge=0)
    simulate: SimulateSection = Field(default_factory=SimulateSection)
    diagnose: DiagnoseSection = Field(default_factory=DiagnoseSection)
    tangent: TangentSection = Field(default_factory=TangentSection)
    newman: NewmanSection = Field(default_factory=NewmanSection)
    functional: FunctionalSection = Field(default_factory=FunctionalSection)

    @field_validator("n_grid")
    @classmethod
    def _check_n_grid(cls, n_grid: list[int]) -> list[int]:
        if not n_grid or any(n < 1 for n in n_grid):
            raise ValueError("n_grid must hold positive integers")
        if any(b <= a for a, b in zip(n_grid, n_grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        return n_grid


# -----------------------------------------------------------------------------
# Run bookkeeping
# -----------------------------------------------------------------------------


class RunManifest(BaseModel):
    """What a CLI run produced and how to reproduce it."""

    experiment: str
    config_hash: str
    master_seed: int
    tool_version: str
    workers: int
    outputs: list[str] = Field(default_factory=list)
    wall_clock_seconds: float = 0.0


class LabState(BaseModel):
    """State carried through the experiment pipeline graph."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    # Inputs
    config_path: str
    experiment: Experiment
    seed_override: int | None = None
    workers: int = 1
    out_dir: str | None = None
    reproducible: bool = False

    # Loaded config
    raw_config: dict[str, Any] | None = None
    config: ExperimentConfig | None = None
    config_hash: str | None = None

    # Results
    lag_sum: LagSum | None = None
    condition_report: ConditionReport | None = None
    curve: TruncCovCurve | None = None
    rv_check: RVCheck | None = None
    single_lag_table: SingleLagTable | None = None
    hoeffding_rows: list[HoeffdingRow] = Field(default_factory=list)
    spectral_condition: LagSum | None = None
    convergence_report: ConvergenceReport | None = None
    alpha1_report: Alpha1Report | None = None
    tangent_table: TangentTable | None = None
    split_table: SplitTable | None = None
    functional_report: FunctionalReport | None = None
    newman_reports: list[NewmanReport] = Field(default_factory=list)

    # Bookkeeping
    outputs: list[str] = Field(default_factory=list)
    messages: list[str] = Field(default_factory=list)
    status: WorkflowStatus = WorkflowStatus.IN_PROGRESS
    error_message: str | None = None
    error_kind: Literal["usage", "config", "numeric", "other"] | None = None
