"""
Univariate alpha-stable laws.

Parameterization: S_alpha(sigma, beta, mu) with characteristic function

    alpha != 1:  exp(-sigma^a |t|^a (1 - i beta sign(t) tan(pi a / 2)) + i mu t)
    alpha == 1:  exp(-sigma |t| + i mu t)          (beta = 0 only)

Sampling uses the Chambers-Mallows-Stuck construction; the CDF and the tail
probabilities come from Fourier inversion with adaptive quadrature.
"""

import math
import warnings

import numpy as np
from scipy import integrate, interpolate, optimize, stats

from ..config import settings
from ..exceptions import BranchTrackingError, ContractError, GridError, NumericError, ParameterDomainError
from ..state import ConvPowerLaw, MarginalTail, NormalizingConstant, StableParams

MIN_FIT_SAMPLES = 1000
SKEW_FIT_BAND = 0.02  # |alpha - 1| below which skewness is not identifiable from the phase
ALPHA_FIT_RANGE = (0.05, 1.999)
CONV_POWER_REFINE = 64


# -----------------------------------------------------------------------------
# Constants of the radial integrals
# -----------------------------------------------------------------------------


def k_alpha(alpha: float) -> float:
    """K_alpha > 0 with int_0^inf g(u r) r^(-1-alpha) dr = -K_alpha |u|^alpha (1 - i sign(u) tan(pi alpha / 2))."""
    if alpha == 1.0:
        return math.pi / 2
    return -math.gamma(-alpha) * math.cos(math.pi * alpha / 2)


def tail_coefficient(alpha: float) -> float:
    """C_alpha with P(|X| > x) ~ C_alpha sigma^alpha x^-alpha; C_alpha K_alpha = 1 / alpha."""
    if alpha == 1.0:
        return 2 / math.pi
    return (1 - alpha) / (math.gamma(2 - alpha) * math.cos(math.pi * alpha / 2))


def radial_integral(alpha: float, u: np.ndarray | float) -> np.ndarray:
    """
    Closed form of int_0^inf g(u, r) dr / r^(1+alpha) for real u.

    g is e^(iur) - 1 for alpha < 1, e^(iur) - 1 - iur for alpha in (1, 2) and
    e^(iur) - 1 - iur 1{r < 1} for alpha = 1.
    """
    u = np.asarray(u, dtype=float)
    absu = np.abs(u)
    if alpha == 1.0:
        safe = np.where(absu > 0, absu, 1.0)
        return -(math.pi / 2) * absu + 1j * u * (1 - np.euler_gamma - np.log(safe))
    tan = math.tan(math.pi * alpha / 2)
    return -k_alpha(alpha) * absu**alpha * (1 - 1j * np.sign(u) * tan)


# -----------------------------------------------------------------------------
# Characteristic function and sampling
# -----------------------------------------------------------------------------


def _exponent_parts(params: StableParams, t: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
    """(u, v) with cf(t) = exp(-u + i v)."""
    t = np.asarray(t, dtype=float)
    a, s = params.alpha, params.scale
    if a == 1.0:
        return s * np.abs(t), params.location * t
    u = s**a * np.abs(t) ** a
    v = u * params.beta * np.sign(t) * math.tan(math.pi * a / 2) + params.location * t
    return u, v


def log_cf_stable(params: StableParams, t: np.ndarray | float) -> np.ndarray:
    """Characteristic exponent psi(t) = log cf_stable(t) (continuous, psi(0) = 0)."""
    u, v = _exponent_parts(params, t)
    return -u + 1j * v


def cf_stable(params: StableParams, t: np.ndarray | float) -> np.ndarray:
    """E exp(i t X) for X ~ params; vectorized over t."""
    return np.exp(log_cf_stable(params, t))


def reflect(params: StableParams) -> StableParams:
    """Law of -X."""
    return params.model_copy(update={"beta": -params.beta, "location": -params.location})


def sample_stable(params: StableParams, count: int, stream: np.random.Generator) -> np.ndarray:
    """
    Draw ``count`` i.i.d. variables from ``params``.

    Chambers-Mallows-Stuck in Weron's form; exact for every admissible
    parameter. The draws are a deterministic function of the stream state.
    """
    if count < 1:
        raise ParameterDomainError("count must be at least 1")
    a, b = params.alpha, params.beta
    v = stream.uniform(-math.pi / 2, math.pi / 2, size=count)
    w = stream.standard_exponential(size=count)

    if a == 1.0:
        x = np.tan(v)
    else:
        zeta = b * math.tan(math.pi * a / 2)
        shift = math.atan(zeta) / a
        factor = (1 + zeta**2) ** (1 / (2 * a))
        x = (
            factor
            * np.sin(a * (v + shift))
            / np.cos(v) ** (1 / a)
            * (np.cos(v - a * (v + shift)) / w) ** ((1 - a) / a)
        )
    return params.scale * x + params.location


# -----------------------------------------------------------------------------
# Tails, CDF and normalizing constants
# -----------------------------------------------------------------------------


def tail_constant_of(params: StableParams) -> MarginalTail:
    """Limit c = lim x^alpha P(|X| > x) = C_alpha sigma^alpha."""
    c = tail_coefficient(params.alpha) * params.scale**params.alpha
    return MarginalTail(
        alpha=params.alpha,
        tail_constant=c,
        slowly_varying_limit=c,
        right_fraction=(1 + params.beta) / 2,
    )


def _oscillatory(g, weight: str, epsabs: float) -> tuple[float, float]:
    """int_0^inf g(s) w(s) ds with w = sin or cos, split at s = pi."""
    w = math.sin if weight == "sin" else math.cos
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        head, head_err = integrate.quad(
            lambda s: g(s) * w(s), 0.0, math.pi, epsabs=epsabs, epsrel=1e-10, limit=200
        )
        tail, tail_err = integrate.quad(
            g, math.pi, np.inf, weight=weight, wvar=1.0, epsabs=epsabs, limlst=200
        )
    return head + tail, head_err + tail_err


def _integrands(params: StableParams, x: float):
    """g1(s) = (1 - Re cf(s/x)) / s and g2(s) = Im cf(s/x) / s, free of cancellation."""
    a, sigma, mu = params.alpha, params.scale, params.location
    skew = 0.0 if a == 1.0 else params.beta * math.tan(math.pi * a / 2)

    def parts(s: float) -> tuple[float, float]:
        t = s / x
        u = sigma * t if a == 1.0 else (sigma * t) ** a
        return u, u * skew + mu * t

    def g1(s: float) -> float:
        u, v = parts(s)
        return (-math.expm1(-u) * math.cos(v) + 2 * math.sin(v / 2) ** 2) / s

    def g2(s: float) -> float:
        u, v = parts(s)
        return math.exp(-u) * math.sin(v) / s

    return g1, g2


def _epsabs(params: StableParams, x: float, tol: float) -> float:
    """Absolute quadrature target: relative to the expected size of the tail."""
    approx = min(1.0, tail_coefficient(params.alpha) * params.scale**params.alpha * x ** -params.alpha)
    return max(1e-15, 1e-4 * min(tol, approx))


def _survival(params: StableParams, x: float, tol: float) -> tuple[float, float]:
    """P(X > x) for x > 0 with its error estimate."""
    g1, g2 = _integrands(params, x)
    eps = _epsabs(params, x, tol)
    i1, e1 = _oscillatory(g1, "sin", eps)
    i2, e2 = _oscillatory(g2, "cos", eps)
    return (i1 + i2) / math.pi, (e1 + e2) / math.pi


def cdf_stable_with_error(params: StableParams, x: float, tol: float | None = None) -> tuple[float, float]:
    """P(X <= x) together with the achieved absolute error estimate."""
    tol = settings.cdf_abs_tol if tol is None else tol
    if x > 0:
        sf, err = _survival(params, x, tol)
        value = 1.0 - sf
    elif x < 0:
        value, err = _survival(reflect(params), -x, tol)
    else:
        def g(t: float) -> float:
            u, v = _exponent_parts(params, t)
            return float(np.exp(-u) * np.sin(v) / t)

        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            integral, err = integrate.quad(g, 0.0, np.inf, epsabs=tol / 10, limit=400)
        value = 0.5 - integral / math.pi
        err = err / math.pi
    return min(1.0, max(0.0, value)), err


def cdf_stable(params: StableParams, x: float, tol: float | None = None) -> float:
    """P(X <= x) by Fourier inversion; raises NumericError above the absolute tolerance."""
    tol = settings.cdf_abs_tol if tol is None else tol
    value, err = cdf_stable_with_error(params, x, tol)
    if not err <= tol:
        raise NumericError(f"cdf_stable({x!r}) reached only {err:.3g}", achieved=err, best=value)
    return value


def tail_prob_stable(params: StableParams, x: float, tol: float | None = None) -> float:
    """P(|X| > x) = (2/pi) int_0^inf (1 - Re cf(t)) sin(xt) / t dt."""
    if x <= 0:
        return 1.0
    tol = settings.cdf_abs_tol if tol is None else tol
    g1, _ = _integrands(params, x)
    value, err = _oscillatory(g1, "sin", _epsabs(params, x, tol))
    value, err = 2 * value / math.pi, 2 * err / math.pi
    if not err <= tol:
        raise NumericError(f"tail_prob_stable({x!r}) reached only {err:.3g}", achieved=err, best=value)
    return min(1.0, max(0.0, value))


def solve_Bn(tail: MarginalTail, params: StableParams, n: int) -> NormalizingConstant:
    """
    B_n solving n P(|X_1| > B_n) = 1.

    For n = 1 there is no finite solution for a continuous law; the
    asymptotic value (n c)^(1/alpha) is returned with ``fallback=True``.
    """
    if n < 1:
        raise ParameterDomainError("n must be at least 1")
    asymptotic = (n * tail.tail_constant) ** (1 / tail.alpha)
    if n == 1:
        return NormalizingConstant(n=n, value=asymptotic, asymptotic=asymptotic, fallback=True)

    target = -math.log(n)

    def gap(b: float) -> float:
        return math.log(max(tail_prob_stable(params, b), 1e-300)) - target

    lo, hi = asymptotic / 2, asymptotic * 2
    for _ in range(60):
        if gap(lo) > 0:
            break
        lo /= 2
    else:
        raise NumericError("solve_Bn: lower bracket not found", best=asymptotic)
    for _ in range(60):
        if gap(hi) < 0:
            break
        hi *= 2
    else:
        raise NumericError("solve_Bn: upper bracket not found", best=asymptotic)

    value = optimize.brentq(gap, lo, hi, xtol=1e-14 * asymptotic, rtol=1e-12)
    return NormalizingConstant(n=n, value=value, asymptotic=asymptotic)


# -----------------------------------------------------------------------------
# Empirical characteristic function, fitting and distances
# -----------------------------------------------------------------------------


def ecf(samples: np.ndarray, t_grid: np.ndarray) -> np.ndarray:
    """Empirical characteristic function of ``samples`` on ``t_grid``."""
    x = np.asarray(samples, dtype=float).ravel()
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    return np.array([np.mean(np.cos(tk * x)) + 1j * np.mean(np.sin(tk * x)) for tk in t])


def ecf_gap(samples: np.ndarray, cf_values: np.ndarray, t_grid: np.ndarray) -> float:
    """sup over the grid of |ECF - cf|."""
    return float(np.max(np.abs(ecf(samples, t_grid) - np.asarray(cf_values))))


def fit_stable_ecf(samples: np.ndarray, t_grid: np.ndarray | None = None) -> StableParams:
    """
    Regression estimator on the empirical characteristic function.

    The sample is standardized by its median and half interquartile range,
    then log(-log|ecf(t)|) = alpha log sigma + alpha log t gives alpha and
    sigma (weighted least squares), and the unwrapped phase
    mu t + beta tan(pi alpha / 2) sigma^alpha t^alpha gives mu and beta.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < MIN_FIT_SAMPLES:
        raise ParameterDomainError(f"fit_stable_ecf needs at least {MIN_FIT_SAMPLES} samples")
    t = np.asarray(settings.ecf_grid if t_grid is None else t_grid, dtype=float)
    if t.size < 2 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise GridError("t_grid must be positive and strictly increasing")

    center = float(np.median(x))
    q25, q75 = np.percentile(x, [25, 75])
    spread = (q75 - q25) / 2
    if not spread > 0:
        raise GridError("degenerate samples: zero interquartile range")

    phi = ecf((x - center) / spread, t)
    modulus = np.abs(phi)
    if np.any(modulus < settings.ecf_min_modulus):
        raise GridError("|ecf| below the modulus floor; CF too small to take logs")
    neglog = -np.log(modulus)
    if np.any(neglog <= 0):
        raise GridError("|ecf| = 1 on the grid; samples look degenerate")

    slope, intercept = np.polyfit(np.log(t), np.log(neglog), 1, w=modulus * neglog)
    alpha = float(np.clip(slope, *ALPHA_FIT_RANGE))
    sigma = float(np.exp(intercept / alpha))

    phase = np.unwrap(np.angle(phi))
    if abs(alpha - 1.0) < SKEW_FIT_BAND:
        design = t[:, None]
        beta = 0.0
    else:
        design = np.column_stack([t, math.tan(math.pi * alpha / 2) * sigma**alpha * t**alpha])
    coef, *_ = np.linalg.lstsq(design * modulus[:, None], phase * modulus, rcond=None)
    mu = float(coef[0])
    if design.shape[1] == 2:
        beta = float(np.clip(coef[1], -1.0, 1.0))

    return StableParams(
        alpha=alpha,
        beta=beta,
        scale=sigma * spread,
        location=mu * spread + center,
    )


def ks_noise_floor(count: int) -> float:
    """Expected one-sample KS distance under the null: E[K] / sqrt(count)."""
    return float(stats.kstwobign.mean() / math.sqrt(count))


def ks_distance(samples: np.ndarray, params: StableParams, knots: int | None = None) -> float:
    """
    One-sample KS distance between ``samples`` and the law ``params``.

    cdf_stable is evaluated on empirical quantile knots and interpolated
    monotonically in between.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n_knots = min(knots or settings.ks_quantile_knots, x.size)
    grid = np.unique(np.quantile(x, np.linspace(0.0, 1.0, n_knots)))
    values = np.array([cdf_stable(params, float(g)) for g in grid])
    values = np.maximum.accumulate(values)
    if grid.size == 1:
        return float(stats.kstest(x, lambda s: np.full_like(s, values[0])).statistic)
    cdf = interpolate.PchipInterpolator(grid, values, extrapolate=True)
    return float(stats.kstest(x, lambda s: np.clip(cdf(s), 0.0, 1.0)).statistic)


# -----------------------------------------------------------------------------
# Convolution powers
# -----------------------------------------------------------------------------


def conv_power(law: ConvPowerLaw, t_grid: np.ndarray) -> np.ndarray:
    """
    base_cf(t)^theta on ``t_grid``.

    With a characteristic exponent the result is exp(theta psi(t)). Otherwise
    the logarithm is tracked continuously from t = 0 along a refined path
    (principal branch at 0, unwrapped phase).
    """
    t = np.asarray(t_grid, dtype=float)
    flat = t.ravel()
    theta = law.exponent

    if law.base_exponent is not None:
        return np.exp(theta * np.asarray(law.base_exponent(flat))).reshape(t.shape)

    origin = complex(np.asarray(law.base_cf(np.zeros(1)))[0])
    if abs(origin - 1.0) > 1e-12:
        raise ContractError("base_cf(0) must be 1")

    result = np.ones(flat.size, dtype=complex)
    for sign in (1.0, -1.0):
        mask = sign * flat > 0
        if not mask.any():
            continue
        points = np.unique(sign * flat[mask])
        knots = np.concatenate([[0.0], points])
        path = np.concatenate(
            [[0.0]]
            + [np.linspace(lo, hi, CONV_POWER_REFINE + 1)[1:] for lo, hi in zip(knots[:-1], knots[1:])]
        )
        values = np.asarray(law.base_cf(sign * path), dtype=complex)
        modulus = np.abs(values)
        if modulus.min() < settings.conv_power_min_modulus:
            raise BranchTrackingError(
                "characteristic function too close to zero to track its logarithm",
                achieved=float(modulus.min()),
            )
        log_path = np.log(modulus) + 1j * np.unwrap(np.angle(values))
        log_points = log_path[CONV_POWER_REFINE * np.arange(1, points.size + 1)]
        index = np.searchsorted(points, sign * flat[mask])
        result[mask] = np.exp(theta * log_points[index])
    return result.reshape(t.shape)
