"""Vertex algebras and their geometric multiplications, with exact and numeric checks."""

from .grading import DegreeWindow, GradedBasis, GradedVector, WindowedCompletion
from .models import MODELS, build_model
from .va_core import VertexAlgebra

__all__ = [
    "DegreeWindow",
    "GradedBasis",
    "GradedVector",
    "WindowedCompletion",
    "MODELS",
    "build_model",
    "VertexAlgebra",
]
