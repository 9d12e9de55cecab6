"""Differential operators, principal parts and local cohomology of graded rings."""

from __future__ import annotations

__version__ = "0.1.0"

from .algebra import PresentedAlgebra, PrincipalParts, canonical_module, enveloping
from .exactalg import GF, QQ, CoefficientField, parse_polynomial
from .graded import GradedModule, Resolution, free_resolution

__all__ = [
    "CoefficientField",
    "GF",
    "GradedModule",
    "PresentedAlgebra",
    "PrincipalParts",
    "QQ",
    "Resolution",
    "__version__",
    "canonical_module",
    "enveloping",
    "free_resolution",
    "parse_polynomial",
]
