"""
Stable Limit Lab

Numerical verification of stable limit theorems for associated, heavy-tailed
moving-average sequences: simulation, summability diagnostics, convergence
checks and Skorokhod M1 path distances, wired into a LangGraph pipeline.

Usage:
    stable-lab verify --config experiment.json --which main
"""

from .config import __version__
from .state import (
    DiscreteSpectralMeasure,
    ExperimentConfig,
    LabState,
    MAProcessSpec,
    StableParams,
    StableVectorModel,
    StepPath,
)

__all__ = [
    "__version__",
    "LabState",
    "ExperimentConfig",
    "StableParams",
    "DiscreteSpectralMeasure",
    "StableVectorModel",
    "MAProcessSpec",
    "StepPath",
]
