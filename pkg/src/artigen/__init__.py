"""Articulated-object generation toolkit."""

from .estimators import (
    DiffusionGenerator,
    PatchFeatureExtractor,
    RetrievalAssembler,
)

__version__ = "0.1.0"

__all__ = [
    "DiffusionGenerator",
    "PatchFeatureExtractor",
    "RetrievalAssembler",
    "__version__",
]
