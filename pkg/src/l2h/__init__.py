"""Exact-arithmetic tools for l2-homology of presented groups."""

from .presentation import Presentation, load_presentation, parse_presentation
from .groups import infer_descriptor
from .complexes import presentation_complex, laplacian
from .spectral import Budget, certify_gap, homology_vanishing_report

__version__ = "0.1.0"

__all__ = [
    "Presentation",
    "load_presentation",
    "parse_presentation",
    "infer_descriptor",
    "presentation_complex",
    "laplacian",
    "Budget",
    "certify_gap",
    "homology_vanishing_report",
]
