"""
Jointly alpha-stable vectors with discrete spectral measures.

A vector X in R^N with spectral measure Gamma = sum_k w_k delta_(s_k) and
shift b has

    log E exp(i<t, X>) = sum_k w_k int_0^inf g(<t, s_k>, r) dr / r^(1+alpha) + i<b, t>

with the radial integrals of :func:`stable_core.radial_integral`.
"""

from typing import Any, Sequence

import numpy as np

from ..config import settings
from ..exceptions import ContractError, ParameterDomainError
from ..state import DiscreteSpectralMeasure, PairLevyMeasure, StableParams, StableVectorModel
from .schema_validator import ensure_valid
from .stable_core import k_alpha, radial_integral, sample_stable

STRICT_SHIFT_TOL = 1e-12
STRICT_BALANCE_TOL = 1e-10
MERGE_DECIMALS = 12


# -----------------------------------------------------------------------------
# Construction
# -----------------------------------------------------------------------------


def merge_atoms(
    atoms: np.ndarray, weights: np.ndarray, decimals: int = MERGE_DECIMALS
) -> tuple[np.ndarray, np.ndarray]:
    """Merge atoms equal to ``decimals`` places (weights add) and drop zero weights."""
    atoms = np.asarray(atoms, dtype=float)
    weights = np.asarray(weights, dtype=float)
    keep = weights > 0
    atoms, weights = atoms[keep], weights[keep]
    if atoms.size == 0:
        return atoms.reshape(0, atoms.shape[-1] if atoms.ndim == 2 else 0), weights
    keys = np.round(atoms, decimals) + 0.0  # +0.0 folds -0.0 into 0.0
    unique, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    merged = np.bincount(inverse.ravel(), weights=weights, minlength=len(unique))
    return atoms[first], merged


def model_from_vectors(
    alpha: float,
    vectors: np.ndarray,
    weights: np.ndarray,
    shift: Sequence[float] | None = None,
) -> StableVectorModel:
    """
    Model of sum_k v_k Y_k for independent scalars Y_k with Levy weight ``weights[k]`` on +1.

    The direction v_k / |v_k| receives weight w_k |v_k|^alpha; zero vectors
    are dropped and duplicate directions merged.
    """
    vectors = np.asarray(vectors, dtype=float)
    norms = np.linalg.norm(vectors, axis=1)
    nonzero = norms > 0
    atoms = vectors[nonzero] / norms[nonzero, None]
    atom_weights = np.asarray(weights, dtype=float)[nonzero] * norms[nonzero] ** alpha
    atoms, atom_weights = merge_atoms(atoms, atom_weights)
    dimension = vectors.shape[1]
    return StableVectorModel(
        alpha=alpha,
        gamma=DiscreteSpectralMeasure(
            dimension=dimension,
            atoms=atoms.tolist(),
            weights=atom_weights.tolist(),
            shift=list(shift) if shift is not None else [0.0] * dimension,
        ),
    )


def scalar_weights(params: StableParams) -> tuple[float, float]:
    """Spectral weights (w+, w-) on {+1, -1} of a univariate stable law."""
    total = params.scale**params.alpha / k_alpha(params.alpha)
    return total * (1 + params.beta) / 2, total * (1 - params.beta) / 2


def project_measure(model: StableVectorModel, coords: Sequence[int]) -> StableVectorModel:
    """
    Law of the sub-vector (X_c for c in ``coords``), coords 0-based.

    For alpha = 1 the change of radial compensator adds the drift
    -sum_k w_k log|p_k| p_k, which vanishes for symmetric measures.
    """
    coords = list(coords)
    if not coords or min(coords) < 0 or max(coords) >= model.dimension:
        raise ParameterDomainError(f"coordinates {coords} out of range for dimension {model.dimension}")
    atoms = model.gamma.atoms_array[:, coords]
    weights = model.gamma.weights_array
    shift = model.gamma.shift_array[coords]
    if model.alpha == 1.0:
        norms = np.linalg.norm(atoms, axis=1)
        logs = np.log(np.where(norms > 0, norms, 1.0))
        shift = shift - (weights * logs) @ atoms
    return model_from_vectors(model.alpha, atoms, weights, shift.tolist())


# -----------------------------------------------------------------------------
# Predicates
# -----------------------------------------------------------------------------


def is_associated(gamma: DiscreteSpectralMeasure, tol: float = 0.0) -> bool:
    """True iff every atom lies in [-tol, inf)^N or (-inf, tol]^N."""
    atoms = gamma.atoms_array
    upper = np.all(atoms >= -tol, axis=1)
    lower = np.all(atoms <= tol, axis=1)
    return bool(np.all(upper | lower))


def is_strictly_stable(model: StableVectorModel) -> bool:
    """alpha != 1: zero shift; alpha = 1: sum_k w_k s_k = 0."""
    if model.alpha != 1.0:
        return bool(np.max(np.abs(model.gamma.shift_array)) <= STRICT_SHIFT_TOL)
    balance = model.gamma.weights_array @ model.gamma.atoms_array
    return bool(np.max(np.abs(balance)) <= STRICT_BALANCE_TOL)


# -----------------------------------------------------------------------------
# Characteristic function and sampling
# -----------------------------------------------------------------------------


def log_cf_vector(model: StableVectorModel, t: np.ndarray) -> np.ndarray:
    """log E exp(i<t, X>); ``t`` is one vector of shape (N,) or a batch (m, N)."""
    t = np.asarray(t, dtype=float)
    single = t.ndim == 1
    batch = np.atleast_2d(t)
    if batch.shape[1] != model.dimension:
        raise ParameterDomainError(f"t has dimension {batch.shape[1]}, expected {model.dimension}")
    projections = batch @ model.gamma.atoms_array.T
    value = radial_integral(model.alpha, projections) @ model.gamma.weights_array
    value = value + 1j * (batch @ model.gamma.shift_array)
    return value[0] if single else value


def cf_vector(model: StableVectorModel, t: np.ndarray) -> np.ndarray:
    """Exact characteristic function; cf(0) = 1."""
    return np.exp(log_cf_vector(model, t))


def sample_vector(model: StableVectorModel, count: int, stream: np.random.Generator) -> np.ndarray:
    """
    ``count`` draws of the vector, shape (count, N).

    Ray decomposition: each atom contributes an independent totally skewed
    stable scalar (centered for alpha > 1) along its direction; at alpha = 1
    each pair of opposite atoms contributes one Cauchy scalar.
    """
    if not is_strictly_stable(model):
        raise ContractError("sample_vector requires a strictly stable model")
    atoms = model.gamma.atoms_array
    weights = model.gamma.weights_array
    alpha = model.alpha
    out = np.zeros((count, model.dimension))

    if alpha != 1.0:
        kappa = k_alpha(alpha)
        for atom, w in zip(atoms, weights):
            ray = StableParams(alpha=alpha, beta=1.0, scale=(kappa * w) ** (1 / alpha))
            out += np.outer(sample_stable(ray, count, stream), atom)
    else:
        used = np.zeros(len(atoms), dtype=bool)
        for k, (atom, w) in enumerate(zip(atoms, weights)):
            if used[k]:
                continue
            mirror = np.flatnonzero(np.all(np.abs(atoms + atom) <= 1e-12, axis=1) & ~used)
            used[k] = True
            used[mirror] = True
            cauchy = StableParams(alpha=1.0, scale=np.pi * w)
            out += np.outer(sample_stable(cauchy, count, stream), atom)

    return out + model.gamma.shift_array


# -----------------------------------------------------------------------------
# Covariance-like functionals
# -----------------------------------------------------------------------------


def spectral_covariance(gamma: DiscreteSpectralMeasure, i: int, j: int) -> float:
    """sum_k w_k s_k[i] s_k[j] with 1-based coordinates i, j."""
    for index in (i, j):
        if not 1 <= index <= gamma.dimension:
            raise ParameterDomainError(f"coordinate {index} out of range 1..{gamma.dimension}")
    atoms = gamma.atoms_array
    return float(gamma.weights_array @ (atoms[:, i - 1] * atoms[:, j - 1]))


def truncated_levy_cov(pair: PairLevyMeasure, a: float) -> float:
    """
    int f_a(x1) f_a(x2) nu(dx1, dx2) for nu = Gamma(ds) dr / r^(1+alpha) / tail_normalization.

    Per atom (s1, s2) with M = max(|s1|, |s2|) and m = min, the radial
    integral splits at r = a / M and r = a / m; the result is
    a^(2-alpha) times the value at a = 1.
    """
    if not a > 0:
        raise ParameterDomainError("truncation level must be positive")
    alpha = pair.model.alpha
    atoms = pair.model.gamma.atoms_array
    weights = pair.model.gamma.weights_array
    s1, s2 = atoms[:, 0], atoms[:, 1]
    product = s1 * s2
    if np.any(product < -settings.orthant_tol):
        raise ContractError("truncated_levy_cov requires an associated pair measure")

    big = np.maximum(np.abs(s1), np.abs(s2))
    small = np.minimum(np.abs(s1), np.abs(s2))
    live = (product > 0) & (small > 0)
    big, small, product, w = big[live], small[live], product[live], weights[live]
    if w.size == 0:
        return 0.0

    inner = product * big ** (alpha - 2) / (2 - alpha)
    if alpha == 1.0:
        middle = small * np.log(big / small)
    else:
        middle = small * (small ** (alpha - 1) - big ** (alpha - 1)) / (1 - alpha)
    outer = small**alpha / alpha
    unit = float(w @ (inner + middle + outer))
    return a ** (2 - alpha) * unit / pair.tail_normalization


# -----------------------------------------------------------------------------
# JSON
# -----------------------------------------------------------------------------


def measure_to_json(model: StableVectorModel) -> dict[str, Any]:
    """{alpha, atoms, weights, shift}."""
    return {
        "alpha": model.alpha,
        "atoms": model.gamma.atoms,
        "weights": model.gamma.weights,
        "shift": model.gamma.shift,
    }


def measure_from_json(data: dict[str, Any]) -> StableVectorModel:
    """Inverse of :func:`measure_to_json`; validates against the spectral measure schema."""
    from ..schemas import SPECTRAL_MEASURE_SCHEMA

    ensure_valid(data, SPECTRAL_MEASURE_SCHEMA)
    atoms = data["atoms"]
    return StableVectorModel(
        alpha=data["alpha"],
        gamma=DiscreteSpectralMeasure(
            dimension=len(atoms[0]),
            atoms=atoms,
            weights=data["weights"],
            shift=data.get("shift") or [],
        ),
    )
