"""Ideal polyhedra in the ball model.

An ideal polyhedron is described by its ideal vertices and by the vertex
cycle of each face.  In the Klein model it is simply the Euclidean convex hull
of the vertices, which gives a cheap interior witness.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from hypbilliard.errors import (
    EmptyInterior,
    GeometryError,
    LambdaNotIntegral,
    NonConcircularFace,
    NonIdealVertex,
    NonIntersectingPlanes,
    PolytopeError,
)
from hypbilliard.hypgeom import (
    BoundaryPoint,
    HyperbolicPlane,
    InteriorPoint,
    as_point,
    dihedral_angle,
    klein_to_ball,
    mdot,
    plane_distance,
)
from hypbilliard.tolerances import TOL


@dataclass(frozen=True, eq=False)
class Face:
    label: int
    plane: HyperbolicPlane  # oriented with +e into the polyhedron
    vertex_cycle: tuple
    points: np.ndarray = field(default=None, repr=False)  # ideal vertices in cycle order


@dataclass(frozen=True, eq=False)
class Vertex:
    point: BoundaryPoint
    incident_labels: frozenset

    @property
    def label(self):
        labels = sorted(self.incident_labels)
        sep = "" if max(labels) < 10 else "-"
        return sep.join(str(i) for i in labels)


@dataclass(frozen=True, eq=False)
class Adjacency:
    omega: float
    lam: int
    residual: float


class Containment(enum.Enum):
    INSIDE = "inside"
    ON_BOUNDARY = "on_boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True, eq=False)
class IdealPolyhedron:
    faces: tuple
    vertices: tuple
    adjacency: dict  # frozenset({i, j}) -> Adjacency
    interior_ref: InteriorPoint
    name: str = ""
    coding_ready: bool = True
    _normals: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        normals = np.array([f.plane.e for f in self.faces])
        normals.setflags(write=False)
        object.__setattr__(self, "_normals", normals)
        object.__setattr__(self, "_by_label", {f.label: f for f in self.faces})

    @property
    def k(self):
        return len(self.faces)

    @property
    def labels(self):
        return tuple(f.label for f in self.faces)

    @property
    def normals(self):
        """Inward face normals, one row per face, in ``faces`` order."""
        return self._normals

    def face(self, label):
        try:
            return self._by_label[label]
        except KeyError:
            raise PolytopeError(f"no face labelled {label}") from None

    def plane(self, label):
        return self.face(label).plane

    def adjacent(self, i, j):
        return frozenset((i, j)) in self.adjacency

    def omega(self, i, j):
        return self.adjacency[frozenset((i, j))].omega

    def lam(self, i, j):
        return self.adjacency[frozenset((i, j))].lam

    @property
    def max_lambda(self):
        return max(a.lam for a in self.adjacency.values())

    def vertex_label_sets(self):
        return [v.incident_labels for v in self.vertices]

    def require_coding(self):
        if not self.coding_ready:
            raise LambdaNotIntegral(f"{self.name or 'polyhedron'} has non-integral pi/omega")

    def min_nonadjacent_distance(self):
        """Least distance between face planes of non-adjacent faces (``None`` if all adjacent)."""
        ds = [
            plane_distance(a.plane, b.plane)
            for a, b in combinations(self.faces, 2)
            if not self.adjacent(a.label, b.label)
        ]
        return min(ds) if ds else None


def contains(poly, p):
    """Classify ``p`` as inside, on the boundary (with face labels) or outside."""
    vals = poly.normals @ (as_point(p).hyp * np.array([1.0, 1.0, 1.0, -1.0]))
    on = tuple(lab for lab, v in zip(poly.labels, vals) if abs(v) <= TOL["on"])
    if np.any(vals < -TOL["on"]):
        return Containment.OUTSIDE, ()
    if on:
        return Containment.ON_BOUNDARY, on
    return Containment.INSIDE, ()


def face_area(poly, label):
    """Gauss-Bonnet area of an ideal polygon with n vertices: (n - 2) pi."""
    return (len(poly.face(label).vertex_cycle) - 2) * math.pi


def surface_area(poly):
    return sum(face_area(poly, f.label) for f in poly.faces)


def _cycle_edges(cycle):
    n = len(cycle)
    return {frozenset((cycle[i], cycle[(i + 1) % n])) for i in range(n)}


def _interior_witness(us, planes):
    # centroid scaled into the ball first, then the Klein-model centroid
    candidates = [0.5 * us.mean(axis=0), klein_to_ball(us.mean(axis=0))]
    for c in candidates:
        if np.linalg.norm(c) >= 1.0 - 1e-9:
            continue
        x = InteriorPoint(c).hyp
        if all(abs(mdot(x, pl.e)) > TOL["on"] for pl in planes):
            return InteriorPoint(c)
    return InteriorPoint(candidates[-1])


def from_spec(vertices, faces, name=""):
    """Build an ideal polyhedron from vertex coordinates and face cycles.

    Parameters
    ----------
    vertices : sequence of 3-vectors (or ``BoundaryPoint``) on the unit sphere
    faces : sequence of ``(label, [vertex indices...])`` in cyclic order
    """
    us = []
    for v in vertices:
        u = v.u if isinstance(v, BoundaryPoint) else np.asarray(v, dtype=float)
        if abs(np.linalg.norm(u) - 1.0) > TOL["ideal"]:
            raise NonIdealVertex(f"vertex {list(u)} is not on the unit sphere")
        us.append(u / np.linalg.norm(u))
    us = np.array(us)
    if len(faces) < 4:
        raise EmptyInterior("an ideal polyhedron needs at least four faces")
    # Klein-model hull must be solid
    centered = us - us.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-9) < 3:
        raise EmptyInterior("vertices are coplanar")

    raw = []
    for label, cycle in faces:
        cycle = tuple(int(i) for i in cycle)
        if len(cycle) < 3 or len(set(cycle)) != len(cycle):
            raise NonConcircularFace(f"face {label} needs at least three distinct vertices")
        try:
            plane, residual = HyperbolicPlane.through_boundary_points(us[list(cycle)])
        except GeometryError as exc:
            raise NonConcircularFace(f"face {label}: {exc}") from None
        if residual > TOL["concircular"]:
            raise NonConcircularFace(f"face {label}: vertices off their circle by {residual:.3g}")
        raw.append((int(label), plane, cycle))
    labels = [r[0] for r in raw]
    if len(set(labels)) != len(labels):
        raise PolytopeError("duplicate face labels")

    ref = _interior_witness(us, [r[1] for r in raw])
    x = ref.hyp
    oriented = []
    for label, plane, cycle in raw:
        if mdot(x, plane.e) < 0:
            plane = plane.flipped()
        oriented.append(Face(label, plane, cycle, us[list(cycle)]))
    # every vertex must lie in the closed positive side of every face
    for f in oriented:
        side = us @ f.plane.e[:3] - f.plane.e[3]
        if np.any(side < -1e-9) or abs(mdot(x, f.plane.e)) <= TOL["on"]:
            raise EmptyInterior(f"face {f.label} does not bound a convex body")

    incident = [set() for _ in us]
    for f in oriented:
        for i in f.vertex_cycle:
            incident[i].add(f.label)
    used = [i for i, s in enumerate(incident) if s]
    if any(len(incident[i]) < 3 for i in used):
        raise EmptyInterior("every vertex needs at least three faces")
    verts = tuple(Vertex(BoundaryPoint(us[i]), frozenset(incident[i])) for i in used)

    adjacency = {}
    lambda_ok = True
    for a, b in combinations(oriented, 2):
        if not (_cycle_edges(a.vertex_cycle) & _cycle_edges(b.vertex_cycle)):
            continue
        try:
            omega = dihedral_angle(a.plane, b.plane, ref)
        except NonIntersectingPlanes:
            continue
        ratio = math.pi / omega
        lam = max(1, round(ratio))
        residual = abs(ratio - lam)
        if residual > TOL["lambda"]:
            lambda_ok = False
        adjacency[frozenset((a.label, b.label))] = Adjacency(omega, lam, residual)

    poly = IdealPolyhedron(tuple(oriented), verts, adjacency, ref, name=name, coding_ready=lambda_ok)
    if not lambda_ok:
        warnings.warn(LambdaNotIntegral(f"{name or 'polyhedron'}: some pi/omega is not an integer"))
    return poly


def ideal_regular_tetrahedron():
    """Regular ideal tetrahedron on alternate cube corners; all dihedral angles pi/3."""
    s = 1.0 / math.sqrt(3.0)
    verts = [(s, s, s), (s, -s, -s), (-s, s, -s), (-s, -s, s)]
    # face i is opposite vertex i - 1
    faces = [(i + 1, [j for j in range(4) if j != i]) for i in range(4)]
    return from_spec(verts, faces, name="tetrahedron")


def ideal_regular_octahedron():
    """Regular ideal octahedron on the coordinate axes; all dihedral angles pi/2."""
    verts = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]
    faces = []
    label = 1
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                ix = 0 if sx > 0 else 1
                iy = 2 if sy > 0 else 3
                iz = 4 if sz > 0 else 5
                faces.append((label, [ix, iy, iz]))
                label += 1
    return from_spec(verts, faces, name="octahedron")


BUILTINS = {
    "tetrahedron": ideal_regular_tetrahedron,
    "octahedron": ideal_regular_octahedron,
}
