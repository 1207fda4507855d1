"""Billiards in ideal polyhedra of hyperbolic 3-space and their symbolic codes."""

from hypbilliard.hypgeom import (
    BoundaryPoint,
    DirectedGeodesic,
    HyperbolicPlane,
    InteriorPoint,
    Isometry,
    Side,
)
from hypbilliard.polytope import (
    IdealPolyhedron,
    from_spec,
    ideal_regular_octahedron,
    ideal_regular_tetrahedron,
)
from hypbilliard.billiard import PointedTrajectory, extract_code, tau, trace
from hypbilliard.symcode import EventuallyPeriodicCode, RuleViolation, Word
from hypbilliard.unfold import reconstruct, unfold_along

__version__ = "0.1.0"

__all__ = [
    "BoundaryPoint",
    "DirectedGeodesic",
    "EventuallyPeriodicCode",
    "HyperbolicPlane",
    "IdealPolyhedron",
    "InteriorPoint",
    "Isometry",
    "PointedTrajectory",
    "RuleViolation",
    "Side",
    "Word",
    "extract_code",
    "from_spec",
    "ideal_regular_octahedron",
    "ideal_regular_tetrahedron",
    "reconstruct",
    "tau",
    "trace",
    "unfold_along",
]
