"""Unfolding along a code, limit points and code-to-trajectory reconstruction.

For a pointed code ``... a_-1 . a_0 a_1 ...`` the forward chain reflects the
polyhedron successively in the faces ``a_0, a_1, ...``: step ``j >= 1`` uses
label ``a_{j-1}``, its plane is the image of that face under the cumulative
isometry ``M_{j-1}``, and ``M_j = M_{j-1} o sigma(a_{j-1})`` maps the
original polyhedron onto the ``j``-th copy.  The backward chain does the same
with ``a_-1, a_-2, ...``.  Each step plane is oriented with its positive side
away from the base point ``A``; for ``A`` inside the polyhedron that is also
the side of the new copy, so the unfolded trajectory ends inside every
positive cap at infinity.

Consecutive walls of adjacent faces meet along an edge, so the caps are not
nested one inside the next; ``verify_nesting`` reports this as found rather
than assuming it.  Limits are still pinned down because every cap contains
the limit, and reconstruction picks endpoints from the exact cylinder set of
the window (see ``hypbilliard.cylinder``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from hypbilliard.polytope import Containment, contains
from hypbilliard.billiard import BaseArc, PointedTrajectory, d_G, extract_code, first_hit, tau
from hypbilliard.cylinder import chain_walls, joint_center
from hypbilliard.errors import (
    CodeMismatch,
    EdgeOrVertexHit,
    InvalidCode,
    NoForwardHit,
    NotConverged,
    NotNested,
    UnfoldError,
)
from hypbilliard.hypgeom import (
    BoundaryPoint,
    DirectedGeodesic,
    HyperbolicPlane,
    InteriorPoint,
    Isometry,
    as_point,
    ball_to_klein,
    klein_to_ball,
    mdot,
    point_plane_distance,
)
from hypbilliard.symcode import EventuallyPeriodicCode, Word, validate_code, validate_word
from hypbilliard.tolerances import TOL

MIN_RADIUS = 1e-14


@dataclass(frozen=True, eq=False)
class UnfoldStep:
    index: int
    label: int
    plane: HyperbolicPlane  # positive side away from the base point
    isometry: Isometry  # original polyhedron -> copy number ``index``
    center: np.ndarray  # Euclidean centre of the boundary circle
    radius: float  # Euclidean radius of the boundary circle
    axis: np.ndarray  # centre of the positive cap on the sphere
    cap_angle: float  # angular radius of the positive cap
    toward_copy: bool = True  # H+ (away from the base) holds the new copy


@dataclass(frozen=True, eq=False)
class UnfoldChain:
    base: object  # InteriorPoint
    forward: tuple
    backward: tuple  # backward[j - 1] is step -j
    word: Word
    poly: object = field(repr=False, default=None)

    def steps(self, direction):
        return self.forward if direction == "forward" else self.backward


def _step(poly, index, label, prev, base):
    face = poly.plane(label)
    # prev maps face ``label`` of the original onto the wall of copy index-1;
    # its inward normal points back into that copy
    e = -(prev.matrix @ face.e)
    side = float(mdot(base.hyp, e))
    if abs(side) <= TOL["on"]:
        raise UnfoldError(f"base point lies on the plane of step {index}")
    toward = side < 0
    if not toward:
        e = -e  # H+ is the side away from the base point
    plane = HyperbolicPlane.trusted(e)
    cum = prev @ Isometry.reflection(face)
    center, radius, axis, cap = plane.boundary_circle()
    if radius < MIN_RADIUS:
        raise UnfoldError(f"boundary circle at step {index} below double precision")
    return UnfoldStep(index, label, plane, cum, center, radius, axis, cap, toward)


def unfold_along(poly, w, base=None):
    """Unfold ``poly`` along the pointed word ``w`` from base point ``base``."""
    v = validate_word(w, poly)
    if v is not None:
        raise InvalidCode(v)
    base = poly.interior_ref if base is None else as_point(base)
    if contains(poly, base)[0] is not Containment.INSIDE:
        raise UnfoldError("base point must lie inside the polyhedron")
    chains = {}
    for direction, labels in (
        ("forward", [w.at(n) for n in range(0, len(w) - w.point)]),
        ("backward", [w.at(-n) for n in range(1, w.point + 1)]),
    ):
        steps, cum = [], Isometry.identity()
        sign = 1 if direction == "forward" else -1
        for j, label in enumerate(labels, start=1):
            step = _step(poly, sign * j, label, cum, base)
            cum = step.isometry
            steps.append(step)
        chains[direction] = tuple(steps)
    return UnfoldChain(base, chains["forward"], chains["backward"], w, poly)


# ---------------------------------------------------------------------------
# nesting


@dataclass(frozen=True)
class NestingReport:
    nested: bool
    radii: list
    distances: list
    pair_nested: list  # one flag per consecutive forward pair
    base_separated: bool  # every wall separates the base point from its new copy
    backward_nested: bool
    backward_radii: list
    backward_distances: list

    @property
    def radii_decreasing(self):
        return all(b < a for a, b in zip(self.radii, self.radii[1:]))

    @property
    def distances_increasing(self):
        return all(b > a for a, b in zip(self.distances, self.distances[1:]))


def _cap_inside(outer, inner):
    # strict containment of spherical caps: centre offset + inner radius < outer radius
    sep = math.atan2(np.linalg.norm(np.cross(outer.axis, inner.axis)), float(outer.axis @ inner.axis))
    return sep + inner.cap_angle < outer.cap_angle


def _pairs(steps):
    return [_cap_inside(a, b) for a, b in zip(steps, steps[1:])]


def verify_nesting(chain):
    """Check ``p_{j+1}`` lies in the positive half-space of ``p_j`` for consecutive steps.

    Containment is decided on the sphere at infinity: the positive cap of
    the later plane must sit strictly inside the positive cap of the earlier
    one (disjoint boundary circles).
    """
    fwd, bwd = chain.forward, chain.backward
    pairs = _pairs(fwd)
    separated = all(s.toward_copy for s in fwd + bwd)
    return NestingReport(
        nested=all(pairs) and separated,
        radii=[s.radius for s in fwd],
        distances=[point_plane_distance(chain.base, s.plane) for s in fwd],
        pair_nested=pairs,
        base_separated=separated,
        backward_nested=all(_pairs(bwd)) and separated,
        backward_radii=[s.radius for s in bwd],
        backward_distances=[point_plane_distance(chain.base, s.plane) for s in bwd],
    )


def limit_point(chain, direction="forward"):
    """Ideal limit of the chain and an angular radius containing it.

    The limit lies in the positive cap of every step.  The smallest cap seen
    so far is returned as ``(centre, angular radius)``; every later cap must
    meet it, otherwise the chain is inconsistent and ``NotNested`` is raised.
    """
    steps = chain.steps(direction)
    if not steps:
        raise UnfoldError(f"chain has no {direction} steps")
    best = steps[0]
    for s in steps[1:]:
        sep = math.atan2(np.linalg.norm(np.cross(best.axis, s.axis)), float(best.axis @ s.axis))
        if sep > best.cap_angle + s.cap_angle + 1e-12:
            raise NotNested(f"cap of step {s.index} is disjoint from an earlier cap")
        if s.cap_angle < best.cap_angle:
            best = s
    return BoundaryPoint(best.axis), best.cap_angle


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class ReconstructionReport:
    depth: int
    residual_forward: float
    residual_backward: float
    guard: int
    base_check: dict | None = None


def window_word(code, depth):
    """Positions ``-depth .. depth - 1`` of a code or long enough word, pointed at 0."""
    if isinstance(code, EventuallyPeriodicCode):
        return code.window(-depth, depth)
    if -code.point > -depth or len(code) - code.point < depth:
        raise UnfoldError(f"word too short for depth {depth}")
    return Word(tuple(code.at(n) for n in range(-depth, depth)), depth)


def shadow_limits(chain):
    """Ideal endpoints of the geodesic through the base point's images in the two outermost copies.

    A first estimate of ``(alpha, beta)``.  Unlike cap centres it uses both
    ends of the window at once; ``refine_limits`` then moves it into the
    middle of the window's cylinder set.
    """
    ends = []
    for direction in ("backward", "forward"):
        steps = chain.steps(direction)
        if not steps:
            raise UnfoldError(f"chain has no {direction} steps")
        ends.append(steps[-1].isometry.matrix @ chain.base.hyp)
    x, y = ends
    c = float(mdot(x, y))
    root = math.sqrt(max(c * c - 1.0, 0.0))
    if root == 0.0:
        raise UnfoldError("outermost copies coincide")
    far = c - root  # light vector x + far * y points beyond y
    near = 1.0 / far  # = c + root without the cancellation
    alpha = x + near * y
    beta = x + far * y
    return BoundaryPoint(alpha[:3] / alpha[3]), BoundaryPoint(beta[:3] / beta[3])


def refine_limits(poly, chain, alpha, beta, ra, rb):
    """Move both endpoints into the middle of the window's cylinder set.

    Starts from ``(alpha, beta)`` and maximises the worst crossing margin of
    all walls jointly in both endpoints (``cylinder.joint_center``), with
    steps measured against the cap radii ``ra`` and ``rb``.
    """
    edges = chain_walls(poly, chain)
    a, b, _ = joint_center(alpha.u, beta.u, edges, ra, rb)
    return BoundaryPoint(a), BoundaryPoint(b)


def _limits(poly, word, base, refine=True):
    chain = unfold_along(poly, word, base)
    _, rb = limit_point(chain, "forward")
    _, ra = limit_point(chain, "backward")
    alpha, beta = shadow_limits(chain)
    if refine:
        alpha, beta = refine_limits(poly, chain, alpha, beta, ra, rb)
    return alpha, beta, ra, rb


def reconstruct(poly, code, depth, base=None, guard=2, verify=False):
    """Billiard trajectory with the given code, pointed at position 0.

    Returns ``(trajectory, report)``.  The trajectory covers positions
    ``-depth + 1 .. depth - 1`` (truncated where outer arcs fail to fold) and
    its code equals ``code`` on ``[-depth + guard, depth - guard]``.

    The base arc is the geodesic between the backward and forward limits of
    the window.  Arc ``n`` is ``M_n^{-1}`` of that geodesic, which is the
    geodesic between the limits of the shifted window ``sigma^n``; it is
    computed that way so every arc gets the full precision of its own chain.
    """
    poly.require_coding()
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if isinstance(code, EventuallyPeriodicCode):
        v = validate_code(code, poly)
        if v is not None:
            raise InvalidCode(v)
    word = window_word(code, depth)
    base = poly.interior_ref if base is None else as_point(base)
    alpha, beta, ra, rb = _limits(poly, word, base)
    residual = max(ra, rb)
    if residual > TOL["conv"]:
        raise NotConverged(f"limit residual {residual:.3g} exceeds {TOL['conv']:g} at depth {depth}", residual)
    pt = _fold(poly, word, depth, guard, base, DirectedGeodesic(alpha, beta))
    check = None
    if verify:
        other = _second_base(poly, base)
        pt2, _ = reconstruct(poly, code, depth, base=other, guard=guard)
        dist = d_G(pt, pt2)
        check = {"base": [float(x) for x in other.ball], "d_G": dist, "agrees": dist <= 1e-6}
    return pt, ReconstructionReport(depth, rb, ra, guard, check)


def _second_base(poly, base):
    # halfway towards the first vertex in the Klein model
    k = ball_to_klein(base.ball)
    v = poly.vertices[0].point.u
    return InteriorPoint(klein_to_ball(0.75 * k + 0.25 * v))


def _arc(poly, g):
    hit = first_hit(poly, g)
    entry = first_hit(poly, g.reversed())
    return BaseArc(g, entry.reparametrized(g), hit)


def _shifted(word, n, depth):
    # sigma^n of the window, clipped to ``depth`` symbols on each side
    lo = max(-depth, n - depth)
    hi = min(depth, n + depth)
    return Word(tuple(word.at(m) for m in range(lo, hi)), n - lo)


def _fold(poly, word, depth, guard, base, g0):
    lo, hi = -depth + guard, depth - guard
    arcs = {}
    for ns in (range(0, depth), range(-1, -depth, -1)):
        for n in ns:
            try:
                g = g0 if n == 0 else DirectedGeodesic(*_limits(poly, _shifted(word, n, depth), base)[:2])
                arc = _arc(poly, g)
            except (EdgeOrVertexHit, NoForwardHit, NotNested) as exc:
                if lo <= n <= hi:
                    raise CodeMismatch(f"folded arc {n} fails: {exc}") from exc
                break
            if arc.label != word.at(n):
                if lo <= n <= hi:
                    raise CodeMismatch(f"position {n}: folded label {arc.label} != code {word.at(n)}")
                break
            arcs[n] = arc
    return PointedTrajectory(poly, arcs)


# ---------------------------------------------------------------------------
# conjugacy


@dataclass(frozen=True)
class ConjugacyReport:
    window: int
    mismatches: list
    d_G_tau: float
    shift_fixed: bool

    @property
    def ok(self):
        return not self.mismatches and (self.d_G_tau > 0 or self.shift_fixed)


def conjugacy_check(poly, pt, m):
    """Compare ``h(tau(pt))`` with ``sigma(h(pt))`` on positions ``-m .. m``."""
    moved = tau(pt)
    c0, c1 = extract_code(pt), extract_code(moved)
    mismatches = []
    for n in range(-m, m + 1):
        a, b = c1.at(n), c0.at(n + 1)
        if a != b:
            mismatches.append((n, a, b))
    fixed = all(c0.at(n) == c0.at(n + 1) for n in c0.positions if n + 1 in c0.positions)
    return ConjugacyReport(m, mismatches, d_G(pt, moved), fixed)
