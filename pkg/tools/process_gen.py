"""
Moving-average processes X_j = sum_(i=0..q) c_i Z_(j-i) with stable innovations.

Provides simulation of paths and partial sums and the exact stable laws the
process induces: the marginal, the block sums, the lag pairs (X_1, X_(1+r))
and the finite-dimensional slices of the stable tangent.
"""

import math
from typing import Any, Literal

import numpy as np

from ..config import settings
from ..exceptions import ParameterDomainError
from ..state import (
    CoefficientFamily,
    MAProcessSpec,
    MarginalTail,
    NormalizingConstant,
    PairLevyMeasure,
    StableParams,
    StableVectorModel,
    TangentModel,
)
from .rng import path_chunk_size, replicate
from .schema_validator import ensure_valid
from .spectral_vectors import model_from_vectors, scalar_weights
from .stable_core import sample_stable, solve_Bn, tail_coefficient, tail_constant_of

PartialSumMethod = Literal["aggregate", "path"]


# -----------------------------------------------------------------------------
# Coefficient families
# -----------------------------------------------------------------------------


def family_coefficients(family: CoefficientFamily) -> list[float]:
    """c_0 .. c_(length-1) of a geometric (rho^i) or power ((1+i)^-theta) family."""
    i = np.arange(family.length, dtype=float)
    if family.kind == "geometric":
        return (family.rho**i).tolist()
    return ((1.0 + i) ** -family.theta).tolist()


def truncation_error_bound(family: CoefficientFamily, alpha: float) -> float:
    """
    Relative error of the marginal scale caused by truncating the family.

    Returns (sum_(i>=0) c_i^alpha / sum_(i<L) c_i^alpha)^(1/alpha) - 1, with
    the omitted tail bounded by a geometric series or an integral; inf when
    the full series diverges.
    """
    length = family.length
    kept = float(np.sum(np.asarray(family_coefficients(family)) ** alpha))
    if family.kind == "geometric":
        ratio = family.rho**alpha
        tail = ratio**length / (1 - ratio)
    else:
        power = family.theta * alpha
        if power <= 1:
            return math.inf
        tail = length ** (1 - power) / (power - 1)
    return (1 + tail / kept) ** (1 / alpha) - 1


def spec_from_family(family: CoefficientFamily, innovation: StableParams) -> MAProcessSpec:
    return MAProcessSpec(coeffs=family_coefficients(family), innovation=innovation, family=family)


# -----------------------------------------------------------------------------
# Exact laws
# -----------------------------------------------------------------------------


def marginal_params(spec: MAProcessSpec) -> StableParams:
    """Law of X_1: scale sigma ||c||_alpha, same beta, location mu sum(c)."""
    z = spec.innovation
    c = spec.coeffs_array
    return StableParams(
        alpha=z.alpha,
        beta=z.beta,
        scale=z.scale * float(np.sum(c**z.alpha)) ** (1 / z.alpha),
        location=z.location * float(np.sum(c)),
    )


def marginal_tail(spec: MAProcessSpec) -> MarginalTail:
    return tail_constant_of(marginal_params(spec))


def normalizing_constant(spec: MAProcessSpec, n: int) -> NormalizingConstant:
    """B_n of the marginal law."""
    params = marginal_params(spec)
    return solve_Bn(tail_constant_of(params), params, n)


def block_coefficients(spec: MAProcessSpec, n: int) -> np.ndarray:
    """a_(n,k) = sum_(j=1..n) c_(j-k): weight of each innovation in S_n, oldest first."""
    if n < 1:
        raise ParameterDomainError("n must be at least 1")
    return np.convolve(np.ones(n), spec.coeffs_array)


def sum_spectral(spec: MAProcessSpec, n: int) -> StableParams:
    """Exact law of S_n = X_1 + ... + X_n."""
    z = spec.innovation
    a = block_coefficients(spec, n)
    return StableParams(
        alpha=z.alpha,
        beta=z.beta,
        scale=z.scale * float(np.sum(a**z.alpha)) ** (1 / z.alpha),
        location=z.location * n * float(np.sum(spec.coeffs_array)),
    )


def limit_mu_inf(spec: MAProcessSpec) -> StableParams:
    """
    Limit law of S_n / B_n.

    Scale sum(c) / (C_alpha sum(c^alpha))^(1/alpha), the innovation's
    skewness and location zero; independent of the innovation scale.
    """
    alpha = spec.alpha
    c = spec.coeffs_array
    scale = float(np.sum(c)) / (tail_coefficient(alpha) * float(np.sum(c**alpha))) ** (1 / alpha)
    return StableParams(alpha=alpha, beta=spec.innovation.beta, scale=scale)


def _innovation_vectors_model(spec: MAProcessSpec, vectors: np.ndarray, shift: list[float]) -> StableVectorModel:
    """Model of sum_k v_k Z_k from the innovation weights on +v_k and -v_k."""
    w_plus, w_minus = scalar_weights(spec.innovation)
    both = np.concatenate([vectors, -vectors])
    weights = np.concatenate([np.full(len(vectors), w_plus), np.full(len(vectors), w_minus)])
    return model_from_vectors(spec.alpha, both, weights, shift)


def pair_spectral(spec: MAProcessSpec, r: int) -> PairLevyMeasure:
    """
    Exact spectral measure of (X_1, X_(1+r)) normalized by the marginal tail constant.

    Innovation Z_(1-m) enters with the coefficient vector (c_m, c_(m+r)),
    m = -r .. q, coefficients outside 0..q being zero.
    """
    if r < 0:
        raise ParameterDomainError("lag must be nonnegative")
    c = spec.coeffs_array
    q = spec.memory
    padded = np.concatenate([np.zeros(r), c, np.zeros(r)])
    m = np.arange(-r, q + 1)
    vectors = np.column_stack([padded[m + r], padded[m + 2 * r]])
    location = marginal_params(spec).location
    model = _innovation_vectors_model(spec, vectors, [location, location])
    return PairLevyMeasure(model=model, tail_normalization=marginal_tail(spec).tail_constant)


def tangent_model(spec: MAProcessSpec, n: int) -> StableVectorModel:
    """
    Slice (Y_1, ..., Y_n) of the stable tangent: the law of (X_1, ..., X_n)
    with the drift removed, scaled by the marginal tail constant.

    Innovation Z_k, k = 1-q .. n, enters with (c_(1-k), ..., c_(n-k)).
    """
    if n < 1:
        raise ParameterDomainError("N must be at least 1")
    c = spec.coeffs_array
    q = spec.memory
    k = np.arange(1 - q, n + 1)
    j = np.arange(1, n + 1)
    lag = j[None, :] - k[:, None]
    inside = (lag >= 0) & (lag <= q)
    vectors = np.where(inside, c[np.clip(lag, 0, q)], 0.0)
    vectors = vectors / marginal_tail(spec).tail_constant ** (1 / spec.alpha)
    return _innovation_vectors_model(spec, vectors, [0.0] * n)


def tangent_family(spec: MAProcessSpec, n_max: int) -> TangentModel:
    """Slices 1..n_max of the stable tangent."""
    return TangentModel(spec=spec, slices={n: tangent_model(spec, n) for n in range(1, n_max + 1)})


# -----------------------------------------------------------------------------
# Simulation
# -----------------------------------------------------------------------------


def _filter(spec: MAProcessSpec, innovations: np.ndarray, n: int) -> np.ndarray:
    """X[:, j] = sum_i c_i Z[:, q + j - i] for innovations of shape (reps, n + q)."""
    c = spec.coeffs_array
    q = spec.memory
    out = np.zeros((innovations.shape[0], n))
    for i, ci in enumerate(c):
        if ci:
            out += ci * innovations[:, q - i : q - i + n]
    return out


def simulate_path(spec: MAProcessSpec, n: int, stream: np.random.Generator) -> np.ndarray:
    """One path X_1 .. X_n (burn-in of q innovations)."""
    if n < 1:
        raise ParameterDomainError("n must be at least 1")
    z = sample_stable(spec.innovation, n + spec.memory, stream)
    return np.convolve(z, spec.coeffs_array, mode="valid")


def simulate_paths(spec: MAProcessSpec, n: int, reps: int, stream: np.random.Generator) -> np.ndarray:
    """``reps`` independent paths, shape (reps, n), from a single stream."""
    if n < 1 or reps < 1:
        raise ParameterDomainError("n and reps must be at least 1")
    z = sample_stable(spec.innovation, reps * (n + spec.memory), stream).reshape(reps, n + spec.memory)
    return _filter(spec, z, n)


def simulate_path_chunks(
    spec: MAProcessSpec,
    n: int,
    reps: int,
    stream: np.random.Generator,
    reduce,
    workers: int | None = None,
) -> np.ndarray:
    """
    Simulate paths chunk by chunk and keep only ``reduce(paths)`` per chunk.

    ``reduce`` maps a (count, n) block of paths to an array whose first axis
    is the replicate; results are concatenated in chunk order.
    """

    def chunk(count: int, child: np.random.Generator) -> np.ndarray:
        return reduce(simulate_paths(spec, n, count, child))

    return replicate(chunk, reps, stream, workers, chunk_size=path_chunk_size(n + spec.memory))


def _aggregate_sums(spec: MAProcessSpec, n: int, count: int, stream: np.random.Generator) -> np.ndarray:
    """
    Exact S_n without building paths.

    The n - q innovations that enter every X_j of the block with the full
    weight sum(c) are summed as one stable variable; the 2q boundary
    innovations are drawn individually.
    """
    z = spec.innovation
    q = spec.memory
    weights = block_coefficients(spec, n)
    interior = max(n - q, 0)
    total = float(np.sum(spec.coeffs_array))

    if interior:
        boundary = np.r_[0:q, q + interior : n + q]
        bulk = sample_stable(z.model_copy(update={"location": 0.0}), count, stream)
        sums = total * (interior ** (1 / z.alpha) * bulk + interior * z.location)
    else:
        boundary = np.arange(n + q)
        sums = np.zeros(count)

    if boundary.size:
        draws = sample_stable(z, count * boundary.size, stream).reshape(count, boundary.size)
        sums = sums + draws @ weights[boundary]
    return sums


def simulate_partial_sums(
    spec: MAProcessSpec,
    n: int,
    reps: int,
    stream: np.random.Generator,
    method: PartialSumMethod | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """
    ``reps`` i.i.d. draws of S_n.

    ``aggregate`` draws the interior innovations as one stable variable and
    costs O(q) per replicate; ``path`` builds every path.
    """
    if n < 1:
        raise ParameterDomainError("n must be at least 1")
    how = method or settings.partial_sum_method
    if how == "aggregate":
        return replicate(lambda count, child: _aggregate_sums(spec, n, count, child), reps, stream, workers)
    if how == "path":
        return simulate_path_chunks(spec, n, reps, stream, lambda paths: paths.sum(axis=1), workers)
    raise ParameterDomainError(f"unknown partial-sum method {how!r}")


# -----------------------------------------------------------------------------
# JSON
# -----------------------------------------------------------------------------


def spec_to_json(spec: MAProcessSpec) -> dict[str, Any]:
    """Process section of an experiment config."""
    data: dict[str, Any] = {"innovation": spec.innovation.model_dump()}
    if spec.family is not None:
        data["family"] = spec.family.model_dump(exclude_none=True)
    else:
        data["coeffs"] = list(spec.coeffs)
    return data


def spec_from_json(data: dict[str, Any]) -> MAProcessSpec:
    """Inverse of :func:`spec_to_json`; a family is expanded to its coefficients."""
    from ..schemas import EXPERIMENT_SCHEMA

    ensure_valid({"process": data, "master_seed": 0}, EXPERIMENT_SCHEMA)
    innovation = StableParams(**data["innovation"])
    if "family" in data:
        family = CoefficientFamily(**{"length": settings.family_length, **data["family"]})
        return spec_from_family(family, innovation)
    return MAProcessSpec(coeffs=data["coeffs"], innovation=innovation)
