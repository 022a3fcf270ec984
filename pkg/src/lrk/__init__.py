"""Exact (co)homology, duality and modular classes of Lie-Rinehart algebras over Q."""

from .core import (
    LRPresentation,
    ModulePresentation,
    validate,
    validate_module,
)
from .complexes import Chain, Cochain, cohomology, homology
from .poly import Derivation, Poly, WeightGrading, parse_poly

__all__ = [
    "LRPresentation",
    "ModulePresentation",
    "validate",
    "validate_module",
    "Chain",
    "Cochain",
    "cohomology",
    "homology",
    "Derivation",
    "Poly",
    "WeightGrading",
    "parse_poly",
]
