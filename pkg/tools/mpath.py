"""
Partial-sum step paths and Skorokhod distances between them.

A :class:`StepPath` is the cadlag path t -> S_(floor(nt)) / b_n. The M1 and
J1 distances are approximated by the discrete Frechet distance between
samples of the two completed graphs taken on a common time grid: J1 samples
each jump by its two end points, M1 also samples the vertical segment in
between. Grids are refined until successive estimates agree.
"""

import csv
import math
from pathlib import Path
from typing import Sequence, TextIO

import numpy as np
from scipy import stats

from ..config import settings
from ..exceptions import ContractError, NumericError, ParameterDomainError
from ..state import DistanceReport, FunctionalReport, FunctionalRow, MAProcessSpec, ParamRep, StableParams, StepPath
from .process_gen import limit_mu_inf, normalizing_constant, pair_spectral, simulate_path_chunks
from .rng import path_chunk_size, replicate
from .spectral_vectors import truncated_levy_cov
from .stable_core import ks_distance, sample_stable
from .tail_diagnostics import jackknife_se

INITIAL_SPACING = 1 / 8
BRUTEFORCE_SPACING = 1 / 200
BRUTEFORCE_MAX_SEGMENTS = 4
FACTORIZATION_GRID = (0.5, 1.0, 2.0)


# -----------------------------------------------------------------------------
# Paths
# -----------------------------------------------------------------------------


def build_partial_sum_path(samples: Sequence[float], b_n: float) -> StepPath:
    """Path with value S_k / b_n on [k/n, (k+1)/n) and S_n / b_n at t = 1."""
    x = np.asarray(samples, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ParameterDomainError("samples must be a non-empty 1-d sequence")
    if not b_n > 0:
        raise ParameterDomainError("b_n must be positive")
    n = x.size
    times = np.append(np.arange(n) / n, 1.0)
    values = np.concatenate([[0.0], np.cumsum(x)]) / b_n
    return StepPath(jump_times=times, values=values)


def path_value(x: StepPath, t: float | np.ndarray) -> np.ndarray:
    """Right-continuous evaluation."""
    index = np.searchsorted(x.jump_times, t, side="right") - 1
    return x.values[np.clip(index, 0, x.segments - 1)]


def left_limit(x: StepPath, t: float | np.ndarray) -> np.ndarray:
    """x(t-), with x(0-) = x(0)."""
    index = np.searchsorted(x.jump_times, t, side="left") - 1
    return x.values[np.clip(index, 0, x.segments - 1)]


def uniform_distance(x: StepPath, y: StepPath) -> float:
    """sup_t |x(t) - y(t)|, attained at a jump time or a left limit."""
    times = np.union1d(x.jump_times, y.jump_times)
    right = np.abs(path_value(x, times) - path_value(y, times))
    left = np.abs(left_limit(x, times) - left_limit(y, times))
    return float(max(right.max(), left.max()))


def sup_functional(x: StepPath) -> float:
    return float(np.max(x.values))


def path_to_csv(path: StepPath, handle: TextIO, header: dict[str, str] | None = None) -> None:
    """Write ``time,value`` rows with full float precision after ``# key: value`` comments."""
    for key, value in (header or {}).items():
        handle.write(f"# {key}: {value}\n")
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["time", "value"])
    for t, v in zip(path.jump_times, path.values):
        writer.writerow([repr(float(t)), repr(float(v))])


def path_from_csv(file_path: Path) -> StepPath:
    """Inverse of :func:`path_to_csv`."""
    with open(file_path) as handle:
        rows = [line for line in handle if not line.startswith("#")]
    reader = csv.DictReader(rows)
    times, values = [], []
    for row in reader:
        times.append(float(row["time"]))
        values.append(float(row["value"]))
    return StepPath(jump_times=times, values=values)


# -----------------------------------------------------------------------------
# Graph samples and the discrete Frechet distance
# -----------------------------------------------------------------------------


def graph_samples(x: StepPath, y: StepPath, spacing: float, complete: bool) -> tuple[ParamRep, ParamRep]:
    """
    Samples of the completed graphs of ``x`` and ``y`` on a common time grid.

    The grid holds multiples of ``spacing`` and every jump time of either
    path. At a grid time where a path may jump, both paths get the same
    number of points running from the left limit to the value: two for J1,
    enough for steps of at most ``spacing`` for M1.
    """
    grid = np.union1d(np.append(np.arange(0.0, 1.0, spacing), 1.0), np.union1d(x.jump_times, y.jump_times))
    x_left, x_right = left_limit(x, grid), path_value(x, grid)
    y_left, y_right = left_limit(y, grid), path_value(y, grid)
    jump = np.maximum(np.abs(x_right - x_left), np.abs(y_right - y_left))
    if complete:
        steps = np.where(jump > 0, np.ceil(jump / spacing), 0).astype(int)
    else:
        steps = (jump > 0).astype(int)

    counts = steps + 1
    owner = np.repeat(np.arange(grid.size), counts)
    starts = np.cumsum(counts) - counts
    offset = np.arange(owner.size) - starts[owner]
    fraction = offset / np.maximum(steps, 1)[owner]
    # grid times without a jump keep a single point at the value
    fraction = np.where(steps[owner] == 0, 1.0, fraction)

    times = grid[owner]
    xs = x_left[owner] + fraction * (x_right - x_left)[owner]
    ys = y_left[owner] + fraction * (y_right - y_left)[owner]
    return ParamRep(points=np.column_stack([times, xs])), ParamRep(points=np.column_stack([times, ys]))


def discrete_frechet(p: np.ndarray, q: np.ndarray) -> float:
    """
    Discrete Frechet distance between point sequences under the sup-norm on R^2.

    Anti-diagonal dynamic programme; index 0 of each diagonal buffer is a
    sentinel for out-of-range cells.
    """
    n, m = len(p), len(q)
    before = np.full(n + 1, np.inf)
    last = np.full(n + 1, np.inf)
    for s in range(n + m - 1):
        lo, hi = max(0, s - m + 1), min(n - 1, s)
        i = np.arange(lo, hi + 1)
        j = s - i
        cost = np.maximum(np.abs(p[i, 0] - q[j, 0]), np.abs(p[i, 1] - q[j, 1]))
        current = np.full(n + 1, np.inf)
        if s == 0:
            current[1] = cost[0]
        else:
            reach = np.minimum(np.minimum(last[i], last[i + 1]), before[i])
            current[i + 1] = np.maximum(cost, reach)
        before, last = last, current
    return float(last[n])


def _refine(x: StepPath, y: StepPath, complete: bool, tol: float | None) -> float:
    tolerance = tol or settings.m1_tol
    spacing = INITIAL_SPACING
    previous: float | None = None
    estimate = math.inf
    for _ in range(settings.m1_max_depth + 1):
        px, py = graph_samples(x, y, spacing, complete)
        if len(px.points) > settings.m1_max_points:
            raise NumericError(
                f"graph samples exceed {settings.m1_max_points} points at spacing {spacing:.3g}",
                achieved=spacing,
                best=None if math.isinf(estimate) else estimate,
            )
        estimate = discrete_frechet(px.points, py.points)
        if spacing <= tolerance and previous is not None and abs(estimate - previous) < tolerance:
            return estimate
        previous = estimate
        spacing /= 2
    raise NumericError("grid refinement did not converge", achieved=spacing, best=estimate)


def j1_distance(x: StepPath, y: StepPath, tol: float | None = None) -> float:
    """J1 distance up to ``tol``."""
    return _refine(x, y, complete=False, tol=tol)


def m1_distance(x: StepPath, y: StepPath, tol: float | None = None) -> float:
    """M1 distance up to ``tol``; every J1 coupling is an M1 coupling, so J1 caps it."""
    return min(_refine(x, y, complete=True, tol=tol), j1_distance(x, y, tol))


def distances(x: StepPath, y: StepPath, tol: float | None = None) -> DistanceReport:
    """M1, J1 and uniform distances of two paths."""
    j1 = j1_distance(x, y, tol)
    m1 = min(_refine(x, y, complete=True, tol=tol), j1)
    return DistanceReport(m1=m1, j1=j1, uniform=uniform_distance(x, y))


def _bruteforce(x: StepPath, y: StepPath, complete: bool) -> float:
    if x.segments > BRUTEFORCE_MAX_SEGMENTS or y.segments > BRUTEFORCE_MAX_SEGMENTS:
        raise ContractError(f"the brute-force oracle accepts at most {BRUTEFORCE_MAX_SEGMENTS} segments")
    px, py = graph_samples(x, y, BRUTEFORCE_SPACING, complete)
    p, q = px.points.tolist(), py.points.tolist()
    table = [[math.inf] * len(q) for _ in p]
    for i, (ti, vi) in enumerate(p):
        for j, (tj, vj) in enumerate(q):
            cost = max(abs(ti - tj), abs(vi - vj))
            if i == 0 and j == 0:
                table[i][j] = cost
                continue
            reach = min(
                table[i - 1][j] if i else math.inf,
                table[i][j - 1] if j else math.inf,
                table[i - 1][j - 1] if i and j else math.inf,
            )
            table[i][j] = max(cost, reach)
    return table[-1][-1]


def m1_distance_bruteforce(x: StepPath, y: StepPath) -> float:
    """Plain double-loop Frechet programme on a fixed grid, for paths of at most four segments."""
    return _bruteforce(x, y, complete=True)


def j1_distance_bruteforce(x: StepPath, y: StepPath) -> float:
    return _bruteforce(x, y, complete=False)


# -----------------------------------------------------------------------------
# Functional convergence
# -----------------------------------------------------------------------------


def _increment_params(limit: StableParams, steps: int) -> StableParams:
    """Law of the increment of the limiting Levy process over a time step 1 / steps."""
    if limit.alpha == 1.0:
        return limit.model_copy(update={"scale": limit.scale / steps, "location": limit.location / steps})
    return limit.model_copy(
        update={"scale": limit.scale * steps ** (-1 / limit.alpha), "location": limit.location / steps}
    )


def limit_sup_oracle(
    limit: StableParams, reps: int, steps: int, stream: np.random.Generator
) -> tuple[np.ndarray, float]:
    """
    sup over [0, 1] of the stable Levy path with marginal ``limit`` at time 1,
    sampled on a grid of ``steps`` steps.

    Returns the samples and the KS distance between the fine-grid and
    half-grid suprema of the same paths as an estimate of the grid bias.
    """
    increment = _increment_params(limit, steps)

    def chunk(count: int, child: np.random.Generator) -> np.ndarray:
        walk = np.cumsum(sample_stable(increment, count * steps, child).reshape(count, steps), axis=1)
        fine = np.maximum(walk.max(axis=1), 0.0)
        coarse = np.maximum(walk[:, 1::2].max(axis=1), 0.0)
        return np.column_stack([fine, coarse])

    both = replicate(chunk, reps, stream, chunk_size=path_chunk_size(steps))
    bias = float(stats.ks_2samp(both[:, 0], both[:, 1]).statistic)
    return both[:, 0], bias


def _sup_is_terminal(spec: MAProcessSpec) -> bool:
    """Increments are a.s. nonnegative, so the supremum is the terminal value."""
    z = spec.innovation
    return z.alpha < 1 and z.beta == 1.0 and z.location >= 0


def verify_functional(
    spec: MAProcessSpec,
    n_grid: Sequence[int],
    reps: int,
    t_points: Sequence[float],
    stream: np.random.Generator,
    oracle_steps: int | None = None,
    a: float = 1.0,
) -> FunctionalReport:
    """
    Functional checks of the partial-sum process S_(floor(nt)) / B_n.

    Per n: KS distance of sup_t against the limit's supremum (exact when
    the increments are nonnegative, otherwise a fine-grid oracle), KS of
    the terminal value, and the factorization gap of the joint CF of two
    increments over [t0, t1] and [t1, t2] with its covariance majorant.
    """
    t0, t1, t2 = t_points
    limit = limit_mu_inf(spec)
    exact = _sup_is_terminal(spec)
    oracle_stream, *n_streams = stream.spawn(len(n_grid) + 1)
    if exact:
        oracle, bias = None, 0.0
    else:
        oracle, bias = limit_sup_oracle(limit, reps, oracle_steps or settings.limit_oracle_steps, oracle_stream)

    lag_total = sum(r * truncated_levy_cov(pair_spectral(spec, r), 1.0) for r in range(1, spec.memory + 1))
    grid = np.asarray(FACTORIZATION_GRID)
    lam, theta = np.meshgrid(grid, grid, indexing="ij")

    rows = []
    for n, child in zip(n_grid, n_streams):
        b_n = normalizing_constant(spec, n).value
        k0, k1, k2 = (int(math.floor(n * t)) for t in (t0, t1, t2))

        def reduce(paths: np.ndarray) -> np.ndarray:
            walk = np.concatenate([np.zeros((len(paths), 1)), np.cumsum(paths, axis=1)], axis=1) / b_n
            return np.column_stack([walk.max(axis=1), walk[:, -1], walk[:, k1] - walk[:, k0], walk[:, k2] - walk[:, k1]])

        summary = simulate_path_chunks(spec, n, reps, child, reduce)
        sups, terminal = summary[:, 0], summary[:, 1]
        terminal_ks = ks_distance(terminal, limit)
        sup_ks = ks_distance(sups, limit) if exact else float(stats.ks_2samp(sups, oracle).statistic)

        def gap_of(first: np.ndarray, second: np.ndarray) -> float:
            joint = np.mean(np.exp(1j * (lam[..., None] * first + theta[..., None] * second)), axis=-1)
            left = np.mean(np.exp(1j * grid[:, None] * first), axis=-1)
            right = np.mean(np.exp(1j * grid[:, None] * second), axis=-1)
            return float(np.max(np.abs(joint - np.outer(left, right))))

        gap, gap_se = jackknife_se(gap_of, summary[:, 2], summary[:, 3])
        majorant = float(np.max(np.abs(lam * theta))) * a ** (2 - spec.alpha) * lag_total / n
        rows.append(
            FunctionalRow(
                n=n,
                sup_ks=sup_ks,
                terminal_ks=terminal_ks,
                oracle="exact" if exact else "fine_grid",
                factorization_gap=gap,
                factorization_se=float(gap_se),
                cov_majorant=majorant,
            )
        )
    return FunctionalReport(rows=rows, t_points=list(t_points), oracle_grid_bias=bias)
