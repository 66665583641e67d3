"""Toolkit for triple-point-free diagrams of linked surfaces in 4-space.

Movies of link-diagram stills are parsed and replayed, the swept surface is
rebuilt as an oriented cell complex with its double decker curves traced in
the 1-skeleton, and the inter-component decker circles yield a first-homology
invariant that is stable under the four local moves that never create triple
points.
"""

__version__ = "0.1.0"

from .movie import Movie, MovieError, is_p_movie, parse_movie, replay
from .surface import SurfaceComplex, build_surface, component_summary
from .decker import AfSet, DeckerComponent, assemble_decker, compute_Af
from .homology import (
    HomologyClass,
    build_chain_complex,
    class_of_cycle,
    smith_normal_form,
)
from .invariant import (
    Coloring,
    InvariantResult,
    checkerboard,
    compare,
    compute_X,
    compute_invariant,
    invariant_result,
    orient_decker_circles,
)
from .moves import DiagramState, MoveInstance, applicable_moves, apply_move, verify_invariance

__all__ = [
    "Movie",
    "MovieError",
    "parse_movie",
    "is_p_movie",
    "replay",
    "SurfaceComplex",
    "build_surface",
    "component_summary",
    "DeckerComponent",
    "AfSet",
    "assemble_decker",
    "compute_Af",
    "HomologyClass",
    "build_chain_complex",
    "class_of_cycle",
    "smith_normal_form",
    "Coloring",
    "InvariantResult",
    "checkerboard",
    "orient_decker_circles",
    "compute_X",
    "compute_invariant",
    "invariant_result",
    "compare",
    "DiagramState",
    "MoveInstance",
    "applicable_moves",
    "apply_move",
    "verify_invariance",
    "__version__",
]
