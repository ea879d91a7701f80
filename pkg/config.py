"""
Configuration for the Stable Limit Lab.

Loads settings from environment variables and provides defaults.
"""

from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load .env file if present
load_dotenv()

__version__ = "0.1.0"


class Settings(BaseSettings):
    """Application settings loaded from environment."""

    model_config = SettingsConfigDict(
        env_prefix="STABLE_LAB_",
        env_file=".env",
        extra="ignore",
    )

    # ----- Univariate stable laws -----
    cdf_abs_tol: float = Field(
        default=1e-6,
        description="Absolute tolerance of cdf_stable (Fourier inversion)",
    )
    ecf_grid: list[float] = Field(
        default=[round(0.05 * k, 2) for k in range(1, 21)],
        description="Default t-grid of the empirical-CF regression fit",
    )
    ecf_min_modulus: float = Field(
        default=1e-4,
        description="Smallest |ECF| accepted by the regression fit",
    )
    conv_power_min_modulus: float = Field(
        default=1e-12,
        description="Smallest |cf| along which conv_power tracks the logarithm",
    )
    ks_quantile_knots: int = Field(
        default=512,
        description="Number of quantile knots on which the CDF is evaluated for KS",
    )

    # ----- Spectral measures -----
    orthant_tol: float = Field(
        default=1e-9,
        description="Orthant tolerance for numerically derived spectral measures",
    )

    # ----- Monte Carlo -----
    workers: int = Field(
        default=1,
        description="Worker threads for replicate-parallel Monte Carlo",
    )
    chunk_size: int = Field(
        default=20_000,
        description="Replicates per chunk; chunking never depends on the worker count",
    )
    path_chunk_elements: int = Field(
        default=2_000_000,
        description="Largest number of path values held per chunk when whole paths are simulated",
    )
    jackknife_groups: int = Field(
        default=20,
        description="Groups of the delete-one-group jackknife",
    )
    sigma_envelope: float = Field(
        default=3.0,
        description="Number of standard errors in Monte Carlo verdict envelopes",
    )
    partial_sum_method: str = Field(
        default="aggregate",
        description="How S_n is simulated for distributional checks: 'aggregate' or 'path'",
    )

    # ----- Diagnostics -----
    limit_rel_tol: float = Field(
        default=0.10,
        description="Relative gap accepted between a pre-limit quantity and its limit",
    )
    rv_slope_tol: float = Field(
        default=0.1,
        description="Accepted |slope - (2 - alpha)| of the regular-variation check",
    )
    h_grid_points: int = Field(
        default=41,
        description="Points per axis of the H-function grid",
    )
    ia_exponent: float | None = Field(
        default=None,
        description="Exponent p in a^(p-2) of I^A; None means use alpha",
    )
    family_length: int = Field(
        default=200,
        description="Truncation length of geometric / power coefficient families",
    )
    divergence_rel_tol: float = Field(
        default=0.02,
        description="Relative growth of a lag sum under doubling that flags divergence",
    )

    # ----- Limit laboratory -----
    split_eta: float = Field(
        default=0.01,
        description="Target bound eta on P(V != 0); the default truncation is a = 1.01 * eta^(-1/alpha)",
    )
    lambda_points: int = Field(
        default=20,
        description="Points of the lambda-grid in (0, 2] used for CF gaps",
    )

    # ----- Paths -----
    m1_tol: float = Field(
        default=1e-3,
        description="Tolerance of the M1 / J1 refinement",
    )
    m1_max_depth: int = Field(
        default=14,
        description="Maximum number of grid refinements of the M1 / J1 search",
    )
    m1_max_points: int = Field(
        default=6000,
        description="Largest number of graph samples per path in the M1 / J1 search",
    )
    limit_oracle_steps: int = Field(
        default=10_000,
        description="Steps of the fine-grid stable Levy path used as sup oracle",
    )

    # ----- Paths on disk -----
    output_dir: Path = Field(
        default=Path(__file__).parent / "output",
        description="Directory for output files",
    )


# Global settings instance
settings = Settings()


def get_output_path(filename: str) -> Path:
    """Get the full path to an output file, creating the directory if needed."""
    settings.output_dir.mkdir(parents=True, exist_ok=True)
    return settings.output_dir / filename


def validate_settings() -> list[str]:
    """Validate that settings are usable. Returns list of errors."""
    errors = []

    if settings.partial_sum_method not in ("aggregate", "path"):
        errors.append("STABLE_LAB_PARTIAL_SUM_METHOD must be 'aggregate' or 'path'")

    if settings.workers < 1:
        errors.append("STABLE_LAB_WORKERS must be at least 1")

    if settings.chunk_size < 100:
        errors.append("STABLE_LAB_CHUNK_SIZE must be at least 100")

    if settings.cdf_abs_tol <= 0:
        errors.append("STABLE_LAB_CDF_ABS_TOL must be positive")

    return errors
