"""
Diagnostics of the summability condition on truncated covariances.

For a stationary stable moving average the condition compares

    n * sum_(r>=1) Cov(f_1(X_1 / B_n), f_1(X_(1+r) / B_n))

with its closed-form limit sum_r int f_1(x1) f_1(x2) nu_r(dx1, dx2), where
f_a(x) = max(-a, min(a, x)) and nu_r is the normalized Levy measure of the
pair (X_1, X_(1+r)). Monte Carlo sides come with jackknife standard errors
and are compared inside sigma-envelopes.
"""

from typing import Any, Callable, Sequence

import numpy as np
from scipy import integrate

from ..config import settings
from ..exceptions import ParameterDomainError
from ..state import (
    ConditionReport,
    ConditionRow,
    HMatrix,
    HoeffdingRow,
    LagBreakdown,
    LagSum,
    MAProcessSpec,
    MCEstimate,
    RVCheck,
    SingleLagRow,
    SingleLagTable,
    TruncCovCurve,
    UniformityRow,
    Verdict,
)
from .process_gen import (
    marginal_params,
    normalizing_constant,
    pair_spectral,
    simulate_path_chunks,
    spec_from_family,
)
from .spectral_vectors import spectral_covariance, truncated_levy_cov

UNIFORMITY_LEVELS = (0.5, 1.0, 2.0)
MIN_RV_POINTS = 5
MIN_RV_DECADES = 2.0
RV_GRID_POINTS = 9
HOEFFDING_ABS_TOL = 1e-3


# -----------------------------------------------------------------------------
# Basic estimators
# -----------------------------------------------------------------------------


def truncate(x: np.ndarray | float, a: float) -> np.ndarray:
    """f_a(x) = max(-a, min(a, x))."""
    if not a > 0:
        raise ParameterDomainError("truncation level must be positive")
    return np.clip(x, -a, a)


def jackknife_se(
    statistic: Callable[..., Any],
    *arrays: np.ndarray,
    groups: int | None = None,
) -> tuple[Any, Any]:
    """
    Statistic on the full sample and its delete-one-group jackknife standard error.

    ``arrays`` share their first (replicate) axis, which is cut into
    contiguous groups. The statistic may return a scalar or an array
    (real or complex); the standard error has the same shape.
    """
    count = len(arrays[0])
    g = min(groups or settings.jackknife_groups, count)
    if g < 2:
        raise ParameterDomainError("the jackknife needs at least two replicates")
    bounds = np.linspace(0, count, g + 1).astype(int)
    full = statistic(*arrays)
    leave_out = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        keep = np.ones(count, dtype=bool)
        keep[lo:hi] = False
        leave_out.append(np.asarray(statistic(*(a[keep] for a in arrays))))
    leave_out = np.asarray(leave_out)
    spread = np.abs(leave_out - leave_out.mean(axis=0)) ** 2
    se = np.sqrt((g - 1) / g * spread.sum(axis=0))
    return full, (float(se) if np.ndim(se) == 0 else se)


def _cov(x: np.ndarray, y: np.ndarray) -> float | np.ndarray:
    """Column-wise covariance of paired samples along axis 0."""
    return np.mean(x * y, axis=0) - np.mean(x, axis=0) * np.mean(y, axis=0)


def sample_windows(
    spec: MAProcessSpec, lags: Sequence[int], reps: int, stream: np.random.Generator
) -> np.ndarray:
    """
    Columns (X_1, X_(1+r) for r in lags), shape (reps, 1 + len(lags)).

    Only a window of length max(lags) + 1 is simulated per replicate.
    """
    lags = list(lags)
    if any(r < 0 for r in lags):
        raise ParameterDomainError("lags must be nonnegative")
    width = max(lags, default=0) + 1
    columns = [0] + lags
    return simulate_path_chunks(spec, width, reps, stream, lambda paths: paths[:, columns])


def empirical_trunc_cov(
    spec: MAProcessSpec, lag: int, a: float, reps: int, stream: np.random.Generator
) -> MCEstimate:
    """Cov(f_a(X_1), f_a(X_(1+lag))) with jackknife standard error; lag 0 is the variance."""
    window = truncate(sample_windows(spec, [lag], reps, stream), a)
    value, se = jackknife_se(_cov, window[:, 0], window[:, 1])
    return MCEstimate(value=float(value), se=float(se))


def _within(lhs: float, se: float, rhs: float) -> bool:
    return abs(lhs - rhs) <= settings.sigma_envelope * se + settings.limit_rel_tol * abs(rhs)


# -----------------------------------------------------------------------------
# Single lag and the summability condition
# -----------------------------------------------------------------------------


def single_lag_limit_check(
    spec: MAProcessSpec,
    r: int,
    a: float,
    n_grid: Sequence[int],
    reps: int,
    stream: np.random.Generator,
) -> SingleLagTable:
    """
    n B_n^-2 Cov(f_(aB_n)(X_1), f_(aB_n)(X_(1+r))) for each n against
    int f_a(x1) f_a(x2) nu_r(dx1, dx2).

    One sample of pairs is shared by every n.
    """
    if r < 1:
        raise ParameterDomainError("lag must be at least 1")
    pair = pair_spectral(spec, r)
    limit = truncated_levy_cov(pair, a)
    unit = truncated_levy_cov(pair, 1.0)
    window = sample_windows(spec, [r], reps, stream)

    rows = []
    for n in n_grid:
        b_n = normalizing_constant(spec, n).value
        scaled = truncate(window / b_n, a)
        value, se = jackknife_se(_cov, scaled[:, 0], scaled[:, 1])
        lhs, se = n * float(value), n * float(se)
        rel_gap = abs(lhs - limit) / limit if limit > 0 else abs(lhs)
        rows.append(
            SingleLagRow(
                n=n, b_n=b_n, lhs=lhs, se=se, rhs=limit, rel_gap=rel_gap,
                within_envelope=_within(lhs, se, limit),
            )
        )
    return SingleLagTable(lag=r, a=a, rows=rows, limit=limit, unit_limit=unit)


def _lag_limits(spec: MAProcessSpec, a: float = 1.0) -> list[float]:
    """L_r(a) for r = 1 .. q; pairs further apart are independent."""
    return [truncated_levy_cov(pair_spectral(spec, r), a) for r in range(1, spec.memory + 1)]


def lag_sum_divergence(spec: MAProcessSpec) -> LagSum:
    """
    sum_r L_r(1) for the process, flagged as diverging when it comes from
    a coefficient family and doubling the truncation length grows the sum
    by more than ``divergence_rel_tol``.
    """
    per_lag = _lag_limits(spec)
    value = float(sum(per_lag))
    diverging = False
    if spec.family is not None:
        doubled = spec_from_family(
            spec.family.model_copy(update={"length": 2 * spec.family.length}), spec.innovation
        )
        longer = float(sum(_lag_limits(doubled)))
        diverging = value <= 0 or (longer - value) / value > settings.divergence_rel_tol
    return LagSum(value=value, per_lag=per_lag, diverging=diverging)


def condition_part_report(
    spec: MAProcessSpec,
    n_grid: Sequence[int],
    reps: int,
    stream: np.random.Generator,
    a_values: Sequence[float] = UNIFORMITY_LEVELS,
) -> ConditionReport:
    """
    Both sides of the summability condition.

    The left side n sum_r Cov(f_1(X_1/B_n), f_1(X_(1+r)/B_n)) is estimated
    from windows of length q + 1, so n enters only through B_n. The verdict
    is pass iff the right side is finite, no divergence is detected, and at
    the largest n every truncation level in ``a_values`` lies inside the
    envelope sigma_envelope * se + limit_rel_tol * rhs.
    """
    lag_sum = lag_sum_divergence(spec)
    lags = list(range(1, spec.memory + 1))
    if lag_sum.diverging:
        return ConditionReport(rhs_limit=float("inf"), diverging=True, verdict=Verdict.FAIL)

    rhs = lag_sum.value
    if not lags:
        return ConditionReport(
            lhs_sequence=[
                ConditionRow(n=n, b_n=normalizing_constant(spec, n).value, lhs=0.0, se=0.0) for n in n_grid
            ],
            rhs_limit=0.0,
            uniformity=[UniformityRow(a=a, lhs=0.0, se=0.0, rhs=0.0, within_envelope=True) for a in a_values],
            verdict=Verdict.PASS,
        )

    window = sample_windows(spec, lags, reps, stream)

    def lag_covs(block: np.ndarray, b: float, a: float) -> np.ndarray:
        scaled = truncate(block / b, a)
        return _cov(scaled[:, [0]], scaled[:, 1:])

    def summed(b: float, a: float):
        return lambda block: np.sum(lag_covs(block, b, a))

    rows = []
    for n in n_grid:
        b_n = normalizing_constant(spec, n).value
        value, se = jackknife_se(summed(b_n, 1.0), window)
        rows.append(ConditionRow(n=n, b_n=b_n, lhs=n * float(value), se=n * float(se)))

    n_top, b_top = rows[-1].n, rows[-1].b_n
    covs, covs_se = jackknife_se(lambda block: lag_covs(block, b_top, 1.0), window)
    per_lag = [
        LagBreakdown(lag=r, lhs=n_top * float(v), se=n_top * float(s), rhs=lr)
        for r, v, s, lr in zip(lags, np.ravel(covs), np.ravel(covs_se), lag_sum.per_lag)
    ]

    uniformity = []
    for a in a_values:
        value, se = jackknife_se(summed(b_top, a), window)
        lhs, se = n_top * float(value), n_top * float(se)
        target = a ** (2 - spec.alpha) * rhs
        uniformity.append(UniformityRow(a=a, lhs=lhs, se=se, rhs=target, within_envelope=_within(lhs, se, target)))

    verdict = Verdict.PASS if all(u.within_envelope for u in uniformity) else Verdict.FAIL
    return ConditionReport(
        lhs_sequence=rows, rhs_limit=rhs, per_lag=per_lag, uniformity=uniformity, verdict=verdict
    )


# -----------------------------------------------------------------------------
# Regular variation of the truncated covariance curve
# -----------------------------------------------------------------------------


def default_a_grid(spec: MAProcessSpec) -> list[float]:
    """
    Truncation levels from 10 to 1000 marginal scales, log-spaced.

    Below about ten scales the curve still bends from a^2 towards
    a^(2-alpha) and a log-log fit overestimates the exponent.
    """
    return (marginal_params(spec).scale * np.logspace(1.0, 3.0, RV_GRID_POINTS)).tolist()


def closed_form_curve(spec: MAProcessSpec, a_grid: Sequence[float]) -> TruncCovCurve:
    """a -> sum_r L_r(a); exactly proportional to a^(2-alpha)."""
    unit = sum(_lag_limits(spec))
    values = [a ** (2 - spec.alpha) * unit for a in a_grid]
    return TruncCovCurve(
        a_grid=list(a_grid), values=values, lag_range=list(range(1, spec.memory + 1)), source="closed_form"
    )


def mc_trunc_cov_curve(
    spec: MAProcessSpec,
    a_grid: Sequence[float],
    reps: int,
    stream: np.random.Generator,
) -> TruncCovCurve:
    """a -> sum_r Cov(f_a(X_1), f_a(X_(1+r))) from one shared sample, unnormalized."""
    lags = list(range(1, spec.memory + 1))
    if not lags:
        return TruncCovCurve(
            a_grid=list(a_grid), values=[0.0] * len(a_grid), lag_range=[],
            standard_errors=[0.0] * len(a_grid), source="monte_carlo",
        )
    window = sample_windows(spec, lags, reps, stream)

    def curve(block: np.ndarray) -> np.ndarray:
        out = []
        for a in a_grid:
            t = truncate(block, a)
            out.append(np.sum(_cov(t[:, [0]], t[:, 1:])))
        return np.asarray(out)

    values, se = jackknife_se(curve, window)
    return TruncCovCurve(
        a_grid=list(a_grid),
        values=np.ravel(values).tolist(),
        lag_range=lags,
        standard_errors=np.ravel(se).tolist(),
        source="monte_carlo",
    )


def rv_exponent_check(curve: TruncCovCurve, alpha: float, tol: float | None = None) -> RVCheck:
    """Least-squares slope of log values on log a, compared with 2 - alpha."""
    a = np.asarray(curve.a_grid)
    values = np.asarray(curve.values)
    if a.size < MIN_RV_POINTS or np.log10(a[-1] / a[0]) < MIN_RV_DECADES:
        raise ParameterDomainError(
            f"the a-grid needs at least {MIN_RV_POINTS} points spanning {MIN_RV_DECADES:g} decades"
        )
    if np.any(values <= 0):
        raise ParameterDomainError("the curve has nonpositive values; log-log regression impossible")
    slope, intercept = np.polyfit(np.log(a), np.log(values), 1)
    expected = 2 - alpha
    ok = abs(slope - expected) <= (settings.rv_slope_tol if tol is None else tol)
    return RVCheck(
        slope=float(slope), intercept=float(intercept), expected=expected,
        verdict=Verdict.PASS if ok else Verdict.FAIL,
    )


# -----------------------------------------------------------------------------
# Hoeffding's H and the I^A functional
# -----------------------------------------------------------------------------


def _h_values(x: np.ndarray, y: np.ndarray, x_grid: np.ndarray, y_grid: np.ndarray) -> np.ndarray:
    """F(x, y) - F(x) F(y) of the empirical law of (x, y) on the grid."""
    ix = (x[:, None] <= x_grid[None, :]).astype(float)
    iy = (y[:, None] <= y_grid[None, :]).astype(float)
    count = len(x)
    return ix.T @ iy / count - np.outer(ix.mean(axis=0), iy.mean(axis=0))


def _pairs(spec: MAProcessSpec, lag: int, reps: int, stream: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    window = sample_windows(spec, [lag], reps, stream)
    return window[:, 0], window[:, 1]


def empirical_H(
    spec: MAProcessSpec,
    lag: int,
    x_grid: Sequence[float],
    y_grid: Sequence[float],
    reps: int,
    stream: np.random.Generator,
) -> HMatrix:
    """H(x, y) = P(X_1 <= x, X_(1+lag) <= y) - P(X_1 <= x) P(X_(1+lag) <= y)."""
    xg, yg = np.asarray(x_grid, dtype=float), np.asarray(y_grid, dtype=float)
    x, y = _pairs(spec, lag, reps, stream)
    values, se = jackknife_se(lambda u, v: _h_values(u, v, xg, yg), x, y)
    return HMatrix(x_grid=xg.tolist(), y_grid=yg.tolist(), values=values.tolist(), se=se.tolist())


def _integrated_h(x: np.ndarray, y: np.ndarray, a: float, points: int) -> float:
    grid = np.linspace(-a, a, points)
    h = _h_values(x, y, grid, grid)
    return float(integrate.trapezoid(integrate.trapezoid(h, grid, axis=1), grid))


def I_A_alpha(
    spec: MAProcessSpec,
    lag: int,
    A: float,
    alpha: float,
    a_grid: Sequence[float],
    reps: int,
    stream: np.random.Generator,
    exponent: float | None = None,
) -> float:
    """
    sup over a in a_grid (a >= A) of a^(p-2) int_[-a,a]^2 H(x, y) dx dy.

    p defaults to ``settings.ia_exponent``, then to ``alpha``. All a share one
    sample; H is integrated with the trapezoidal rule on an
    ``h_grid_points`` square grid.
    """
    levels = [a for a in a_grid if a >= A]
    if not A > 0 or not levels:
        raise ParameterDomainError("need A > 0 and at least one grid point a >= A")
    p = exponent if exponent is not None else settings.ia_exponent
    if p is None:
        p = alpha
    x, y = _pairs(spec, lag, reps, stream)
    return max(a ** (p - 2) * _integrated_h(x, y, a, settings.h_grid_points) for a in levels)


def hoeffding_identity_check(
    spec: MAProcessSpec,
    lag: int,
    a_grid: Sequence[float],
    reps: int,
    stream: np.random.Generator,
) -> list[HoeffdingRow]:
    """
    Compare int_[-a,a]^2 H with Cov(f_a(X_1), f_a(X_(1+lag))) on one sample.

    The envelope allows sigma_envelope standard errors of the covariance
    plus the quadrature error of the grid.
    """
    x, y = _pairs(spec, lag, reps, stream)
    rows = []
    for a in a_grid:
        integral = _integrated_h(x, y, a, settings.h_grid_points)
        cov, se = jackknife_se(_cov, truncate(x, a), truncate(y, a))
        cov, se = float(cov), float(se)
        slack = settings.sigma_envelope * se + HOEFFDING_ABS_TOL + settings.limit_rel_tol * abs(cov)
        rows.append(
            HoeffdingRow(a=a, integral=integral, covariance=cov, se=se, within_envelope=abs(integral - cov) <= slack)
        )
    return rows


# -----------------------------------------------------------------------------
# Spectral covariance condition (alpha in (1, 2))
# -----------------------------------------------------------------------------


def _spectral_lag_values(spec: MAProcessSpec) -> list[float]:
    return [spectral_covariance(pair_spectral(spec, r).model.gamma, 1, 2) for r in range(1, spec.memory + 1)]


def spectral_covariance_condition(spec: MAProcessSpec) -> LagSum:
    """
    sum_(k>=2) sum_s s_1 s_k Gamma_k(ds) over the pairs (X_1, X_k).

    Requires alpha in (1, 2); families are checked for divergence by doubling
    their length.
    """
    if not 1 < spec.alpha < 2:
        raise ParameterDomainError("the spectral covariance condition needs alpha in (1, 2)")
    per_lag = _spectral_lag_values(spec)
    value = float(sum(per_lag))
    diverging = False
    if spec.family is not None:
        doubled = spec_from_family(
            spec.family.model_copy(update={"length": 2 * spec.family.length}), spec.innovation
        )
        longer = float(sum(_spectral_lag_values(doubled)))
        diverging = value <= 0 or (longer - value) / value > settings.divergence_rel_tol
    return LagSum(value=value, per_lag=per_lag, diverging=diverging)
