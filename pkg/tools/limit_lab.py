"""
Numerical verification of the stable limit theorem for moving averages.

Each check simulates partial sums, normalizes them by B_n and measures how
far they are from the predicted limit law mu_inf, or checks one of the
inequalities the limit theorem rests on (the truncation split, Newman's
characteristic-function inequality, the stable tangent).
"""

import math
from functools import partial
from typing import Sequence

import numpy as np
from scipy import stats

from ..config import settings
from ..exceptions import ContractError, GridError, ParameterDomainError, UsageError
from ..state import (
    Alpha1Report,
    Alpha1Row,
    ConvergenceReport,
    ConvergenceRow,
    ConvPowerLaw,
    ExperimentConfig,
    MAProcessSpec,
    NewmanReport,
    SplitRow,
    SplitTable,
    StableParams,
    TangentRow,
    TangentTable,
    TruncatedSumDecomposition,
    Verdict,
)
from .process_gen import (
    limit_mu_inf,
    marginal_params,
    marginal_tail,
    normalizing_constant,
    pair_spectral,
    simulate_partial_sums,
    simulate_path_chunks,
    sum_spectral,
)
from .rng import replicate
from .spectral_vectors import truncated_levy_cov
from .stable_core import (
    cf_stable,
    conv_power,
    ecf,
    fit_stable_ecf,
    ks_distance,
    ks_noise_floor,
    log_cf_stable,
    sample_stable,
    tail_prob_stable,
)
from .tail_diagnostics import jackknife_se, lag_sum_divergence, truncate

ALPHA1_LEVEL = 1e-3
TANGENT_MONOTONE_SLACK = 1e-12

BATTERY_COEFFS: tuple[tuple[float, ...], ...] = (
    (1.0,),
    (1.0, 1.0),
    (1.0, 0.5, 0.25),
    (1.0, 0.8, 0.6, 0.4),
)
BATTERY_INNOVATIONS: tuple[tuple[float, float], ...] = (
    (0.7, 1.0),
    (1.0, 0.0),
    (1.2, 0.0),
    (1.5, 0.0),
    (1.8, 0.0),
)
BATTERY_M = 10
BATTERY_N = 10


def default_truncation(alpha: float) -> float:
    """a with a^-alpha just below ``split_eta``."""
    return 1.01 * settings.split_eta ** (-1 / alpha)


def default_lambda_grid() -> np.ndarray:
    return np.linspace(2 / settings.lambda_points, 2.0, settings.lambda_points)


def _lambda_grid(config: ExperimentConfig) -> np.ndarray:
    return np.asarray(config.lambda_grid) if config.lambda_grid else default_lambda_grid()


# -----------------------------------------------------------------------------
# Distributional convergence
# -----------------------------------------------------------------------------


def verify_main(config: ExperimentConfig, stream: np.random.Generator, config_hash: str | None = None) -> ConvergenceReport:
    """
    KS distance, ECF gap and fitted parameters of S_n / B_n against mu_inf for every n.

    Raises ContractError when the closed-form side of the summability
    condition diverges.
    """
    spec = config.spec
    if lag_sum_divergence(spec).diverging:
        raise ContractError("the summability condition diverges for this process")
    limit = limit_mu_inf(spec)
    grid = _lambda_grid(config)
    target = cf_stable(limit, grid)

    rows = []
    for n, child in zip(config.n_grid, stream.spawn(len(config.n_grid))):
        b_n = normalizing_constant(spec, n).value
        sums = simulate_partial_sums(spec, n, config.reps, child) / b_n
        gap, gap_se = jackknife_se(lambda s: np.max(np.abs(ecf(s, grid) - target)), sums)
        try:
            fitted = fit_stable_ecf(sums)
        except GridError:
            fitted = None
        rows.append(
            ConvergenceRow(
                n=n,
                b_n=b_n,
                bn_over_root=b_n / n ** (1 / spec.alpha),
                ks=ks_distance(sums, limit),
                ks_noise_floor=ks_noise_floor(sums.size),
                ecf_gap=float(gap),
                ecf_gap_se=float(gap_se),
                fitted=fitted,
            )
        )
    return ConvergenceReport(
        limit=limit, lambda_grid=grid.tolist(), rows=rows, master_seed=config.master_seed, config_hash=config_hash
    )


def verify_alpha1_identity(
    spec: MAProcessSpec,
    n_grid: Sequence[int],
    reps: int,
    stream: np.random.Generator,
    lambda_grid: np.ndarray | None = None,
) -> Alpha1Report:
    """
    For symmetric 1-stable innovations S_n / n has the law of X_1.

    Two-sample KS test and ECF gap per n; pass iff no p-value falls below
    the Bonferroni-corrected level ``ALPHA1_LEVEL``.
    """
    if spec.alpha != 1.0 or spec.innovation.beta != 0.0:
        raise UsageError("the alpha = 1 identity needs symmetric 1-stable innovations")
    grid = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid)
    marginal = marginal_params(spec)

    rows = []
    for n, child in zip(n_grid, stream.spawn(len(n_grid))):
        sums_stream, marginal_stream = child.spawn(2)
        averages = simulate_partial_sums(spec, n, reps, sums_stream) / n
        reference = replicate(lambda count, s: sample_stable(marginal, count, s), reps, marginal_stream)
        test = stats.ks_2samp(averages, reference)
        gap = float(np.max(np.abs(ecf(averages, grid) - ecf(reference, grid))))
        rows.append(Alpha1Row(n=n, ks=float(test.statistic), p_value=float(test.pvalue), ecf_gap=gap))

    level = ALPHA1_LEVEL / max(len(rows), 1)
    verdict = Verdict.PASS if all(row.p_value >= level for row in rows) else Verdict.FAIL
    return Alpha1Report(rows=rows, verdict=verdict)


def verify_tangent_convergence(
    spec: MAProcessSpec, N_grid: Sequence[int], lambda_grid: np.ndarray | None = None
) -> TangentTable:
    """
    sup over lambda of |cf(mu_N)(lambda)^(1/N) - cf(mu_inf)(lambda)|.

    mu_N is the law of (Y_1 + ... + Y_N) for the stable tangent Y, i.e. of
    S_N / c^(1/alpha) without drift. Strict stability makes
    cf(mu_N)(lambda)^(1/N) = cf(mu_N)(lambda N^(-1/alpha)); the
    ``stability_gap`` column reports that identity.

    The power is also taken from the characteristic function alone, by
    tracking its logarithm, at the rescaled points lambda N^(-1/alpha) where
    |cf(mu_N)| stays above ``settings.conv_power_min_modulus``;
    ``tracked_gap`` is its distance to exp(psi / N) there.
    """
    grid = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid)
    limit_cf = cf_stable(limit_mu_inf(spec), grid)
    c = marginal_tail(spec).tail_constant
    alpha = spec.alpha

    rows = []
    for big_n in N_grid:
        block = sum_spectral(spec, big_n)
        mu_n = StableParams(alpha=alpha, beta=block.beta, scale=block.scale / c ** (1 / alpha))
        base_cf = partial(cf_stable, mu_n)
        power = conv_power(
            ConvPowerLaw(
                base_cf=base_cf,
                exponent=1 / big_n,
                base_exponent=partial(log_cf_stable, mu_n),
            ),
            grid,
        )
        shrunk = grid * big_n ** (-1 / alpha)
        rescaled = base_cf(shrunk)

        trackable = np.abs(rescaled) >= settings.conv_power_min_modulus
        tracked_gap = None
        if trackable.any():
            points = shrunk[trackable]
            tracked = conv_power(ConvPowerLaw(base_cf=base_cf, exponent=1 / big_n), points)
            exact = np.exp(log_cf_stable(mu_n, points) / big_n)
            tracked_gap = float(np.max(np.abs(tracked - exact)))
        rows.append(
            TangentRow(
                N=big_n,
                gap=float(np.max(np.abs(power - limit_cf))),
                stability_gap=float(np.max(np.abs(power - rescaled))),
                tracked_points=int(trackable.sum()),
                tracked_gap=tracked_gap,
            )
        )
    gaps = [row.gap for row in rows]
    monotone = all(b <= a + TANGENT_MONOTONE_SLACK for a, b in zip(gaps, gaps[1:]))
    return TangentTable(rows=rows, monotone=monotone)


# -----------------------------------------------------------------------------
# Truncation split S_n = T + V
# -----------------------------------------------------------------------------


def decompose_truncated_sum(paths: np.ndarray, b_n: float, a: float) -> TruncatedSumDecomposition:
    """T = sum_j f_a(X_j / B_n), V = S_n / B_n - T, and whether V != 0, per path."""
    scaled = np.asarray(paths, dtype=float) / b_n
    t_part = truncate(scaled, a).sum(axis=1)
    v_part = scaled.sum(axis=1) - t_part
    nonzero = np.any(np.abs(scaled) > a, axis=1)
    return TruncatedSumDecomposition(t_part=t_part, v_part=v_part, nonzero_v=nonzero)


def truncation_split_check(
    config: ExperimentConfig, stream: np.random.Generator, a: float | None = None
) -> SplitTable:
    """
    P(V_n != 0) = P(max_j |X_j| > a B_n) against the union bound n P(|X_1| > a B_n).

    ``iid_exact`` is 1 - (1 - p)^n, the value for independent summands.
    """
    spec = config.spec
    level = a or config.a or default_truncation(spec.alpha)
    params = marginal_params(spec)

    rows = []
    for n, child in zip(config.n_grid, stream.spawn(len(config.n_grid))):
        b_n = normalizing_constant(spec, n).value
        flags = simulate_path_chunks(
            spec, n, config.reps, child, lambda paths: decompose_truncated_sum(paths, b_n, level).nonzero_v
        )
        empirical = float(flags.mean())
        se = math.sqrt(max(empirical * (1 - empirical), 1.0 / flags.size) / flags.size)
        p = tail_prob_stable(params, level * b_n)
        bound = n * p
        iid_exact = -math.expm1(n * math.log1p(-p))
        rows.append(
            SplitRow(
                n=n, b_n=b_n, empirical=empirical, se=se, bound=bound, iid_exact=iid_exact,
                within_bound=empirical <= bound + settings.sigma_envelope * se,
            )
        )
    return SplitTable(a=level, limit_bound=level ** (-spec.alpha), rows=rows)


# -----------------------------------------------------------------------------
# Newman's inequality
# -----------------------------------------------------------------------------


def newman_majorant(spec: MAProcessSpec, big_n: int, a: float, lam: float) -> float:
    """lambda^2 a^(2-alpha) N^-1 sum_r min(r, N) L_r."""
    total = sum(
        min(r, big_n) * truncated_levy_cov(pair_spectral(spec, r), 1.0) for r in range(1, spec.memory + 1)
    )
    return lam**2 * a ** (2 - spec.alpha) * total / big_n


def newman_gap_check(
    spec: MAProcessSpec,
    m: int,
    N: int,
    a: float,
    lam: float,
    reps: int,
    stream: np.random.Generator,
) -> NewmanReport:
    """
    |E e^(i lam T) - prod_k E e^(i lam T_k)| <= lam^2 / 2 (Var T - sum_k Var T_k)
    for T the sum of U_j = f_a(X_j / B_n) over n = mN terms split into m
    blocks T_k of length N.

    Stationarity lets the block characteristic function and variance be
    pooled over the m blocks.
    """
    if m < 1 or N < 1 or not a > 0:
        raise ParameterDomainError("need m >= 1, N >= 1 and a > 0")
    n = m * N
    b_n = normalizing_constant(spec, n).value

    def blocks_of(paths: np.ndarray) -> np.ndarray:
        return truncate(paths / b_n, a).reshape(len(paths), m, N).sum(axis=2)

    blocks = simulate_path_chunks(spec, n, reps, stream, blocks_of)

    def lhs_of(b: np.ndarray) -> float:
        joint = np.mean(np.exp(1j * lam * b.sum(axis=1)))
        pooled = np.mean(np.exp(1j * lam * b))
        return float(np.abs(joint - pooled**m))

    def rhs_of(b: np.ndarray) -> float:
        return float(lam**2 / 2 * (np.var(b.sum(axis=1)) - m * np.var(b)))

    lhs, lhs_se = jackknife_se(lhs_of, blocks)
    rhs, rhs_se = jackknife_se(rhs_of, blocks)
    slack = rhs - lhs
    envelope = settings.sigma_envelope * math.hypot(lhs_se, rhs_se)
    return NewmanReport(
        m=m, N=N, a=a, lam=lam,
        lhs=lhs, lhs_se=float(lhs_se), rhs=rhs, rhs_se=float(rhs_se),
        slack=slack, holds=lhs <= rhs + envelope,
        majorant=newman_majorant(spec, N, a, lam),
    )


def battery_specs() -> list[MAProcessSpec]:
    """The twenty associated processes of the Newman battery."""
    return [
        MAProcessSpec(coeffs=list(coeffs), innovation=StableParams(alpha=alpha, beta=beta))
        for coeffs in BATTERY_COEFFS
        for alpha, beta in BATTERY_INNOVATIONS
    ]


def newman_battery(reps: int, stream: np.random.Generator, a: float = 1.0, lam: float = 1.0) -> list[NewmanReport]:
    """Newman's inequality with m = N = 10 over :func:`battery_specs`."""
    specs = battery_specs()
    return [
        newman_gap_check(spec, BATTERY_M, BATTERY_N, a, lam, reps, child)
        for spec, child in zip(specs, stream.spawn(len(specs)))
    ]
