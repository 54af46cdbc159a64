"""Higman-Thompson groups, simplicial homology and Stein-Farley local
geometry at desk scale."""

from .forests import (
    DAryForest,
    DiagramError,
    PairedForestDiagram,
    VElement,
    common_expansion,
    equals,
    expand,
    invert,
    is_identity,
    multiply,
    reduce,
)
from .complexes import SimplicialComplex, reduced_homology, homological_connectivity, is_wcm

__version__ = "0.1.0"
