"""pytest configuration for stable_limit_lab tests."""

import json
import math
import sys
import types
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

# Set up module aliasing so 'stable_limit_lab' imports work
# regardless of what the repo directory is named locally
repo_dir = Path(__file__).parent.parent.resolve()
actual_name = repo_dir.name

if actual_name != "stable_limit_lab":
    sys.path.insert(0, str(repo_dir.parent))

    stable_limit_lab = types.ModuleType("stable_limit_lab")
    stable_limit_lab.__path__ = [str(repo_dir)]
    stable_limit_lab.__file__ = str(repo_dir / "__init__.py")
    sys.modules["stable_limit_lab"] = stable_limit_lab


@pytest.fixture
def stream():
    """A fresh seeded generator per test."""
    return np.random.default_rng(20240517)


@pytest.fixture
def write_config(tmp_path):
    """Factory writing a pretty-printed experiment config; returns its path."""

    def write(process: dict, name: str = "config.json", **fields) -> str:
        path = tmp_path / name
        path.write_text(json.dumps({"process": process, "master_seed": 1, **fields}, indent=2))
        return str(path)

    return write


def _radial_by_quadrature(alpha: float, u: float) -> complex:
    """
    int_0^inf g(u, r) dr / r^(1+alpha) by adaptive quadrature.

    g is e^(iur) - 1, compensated by -iur on (0, inf) for alpha > 1 and on
    (0, 1) for alpha = 1. (0, 1) uses algebraic weights so the integrands
    stay bounded; (1, inf) uses Fourier weights.
    """
    if u == 0:
        return 0j
    if u < 0:
        return _radial_by_quadrature(alpha, -u).conjugate()
    opts = {"epsabs": 1e-13, "epsrel": 1e-12, "limit": 500}

    def one_minus_cos(r):
        return 2 * math.sin(u * r / 2) ** 2 / r**2 if r > 0 else u * u / 2

    def sin_over_r(r):
        return math.sin(u * r) / r if r > 0 else u

    def sin_minus_linear(r):
        if u * r < 1e-2:
            return -(u**3) / 6 + u**5 * r**2 / 120
        return (math.sin(u * r) - u * r) / r**3

    real_head, _ = integrate.quad(one_minus_cos, 0, 1, weight="alg", wvar=(1 - alpha, 0.0), **opts)
    real_tail, _ = integrate.quad(lambda r: r ** (-1 - alpha), 1, np.inf, weight="cos", wvar=u, epsabs=1e-13)
    if alpha < 1:
        imag_head, _ = integrate.quad(sin_over_r, 0, 1, weight="alg", wvar=(-alpha, 0.0), **opts)
    else:
        imag_head, _ = integrate.quad(sin_minus_linear, 0, 1, weight="alg", wvar=(2 - alpha, 0.0), **opts)
    imag_tail, _ = integrate.quad(lambda r: r ** (-1 - alpha), 1, np.inf, weight="sin", wvar=u, epsabs=1e-13)
    if alpha > 1:
        imag_tail -= u / (alpha - 1)
    return complex(-real_head + real_tail - 1 / alpha, imag_head + imag_tail)


@pytest.fixture
def radial_quadrature():
    """Quadrature value of the compensated radial integral, for scalar u."""
    return _radial_by_quadrature
