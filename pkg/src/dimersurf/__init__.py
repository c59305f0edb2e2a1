"""Dimers on graphs embedded in surfaces with boundary.

Exact-arithmetic toolkit: rotation-system surface graphs, dimer
enumeration, Kasteleyn operators and their Pfaffians, curve surgery
(cutting and gluing), boundary state vectors, and height functions on
the bipartite subclass.
"""

from .errors import (
    CrossCheckError,
    DimersurfError,
    GraphFormatError,
    NotACycleError,
    ObstructionError,
    SurgeryError,
)
from .surface_graph import HomologyClass, OrientedCurve, SurfaceGraph, disjoint_union

__all__ = [
    "CrossCheckError",
    "DimersurfError",
    "GraphFormatError",
    "HomologyClass",
    "NotACycleError",
    "ObstructionError",
    "OrientedCurve",
    "SurfaceGraph",
    "SurgeryError",
    "disjoint_union",
]
