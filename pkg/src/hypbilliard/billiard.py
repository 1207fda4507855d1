"""Billiard dynamics inside an ideal polyhedron.

A trajectory is a bi-indexed run of geodesic arcs.  Arc ``n`` leaves the
polyhedron through face ``a_n`` (the exit label), and arc ``n + 1`` is the
reflection of arc ``n`` in that face.  Index 0 is the base arc of the pointed
trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from hypbilliard.errors import EdgeOrVertexHit, NoForwardHit
from hypbilliard.hypgeom import (
    DirectedGeodesic,
    InteriorPoint,
    _ETA_DIAG,
    _hyperboloid_tangent_to_ball,
    as_point,
    geodesic_from_direction,
    great_circle_distance,
    hyperbolic_distance,
    klein_to_ball,
    mdot,
    reflect,
    tangent_angle,
)
from hypbilliard.symcode import Word
from hypbilliard.tolerances import TOL


@dataclass(frozen=True, eq=False)
class HitEvent:
    face_label: int
    point: InteriorPoint
    t: float
    inward_normal: np.ndarray  # unit vector in the ball chart

    def reparametrized(self, geodesic):
        return HitEvent(self.face_label, self.point, geodesic.param_of(self.point), self.inward_normal)


@dataclass(frozen=True, eq=False)
class BaseArc:
    geodesic: DirectedGeodesic
    entry: HitEvent | None
    exit: HitEvent

    @property
    def label(self):
        return self.exit.face_label

    def segment(self):
        """Parameter interval ``(t_entry, t_exit)`` of the arc."""
        if self.entry is None:
            raise ValueError("arc has no entry point")
        return self.entry.t, self.exit.t

    def reversed(self):
        g = self.geodesic.reversed()
        if self.entry is None:
            raise ValueError("cannot reverse an arc without an entry point")
        return BaseArc(g, self.exit.reparametrized(g), self.entry.reparametrized(g))


@dataclass(frozen=True, eq=False)
class PointedTrajectory:
    poly: object
    arcs: dict = field(repr=False)  # index -> BaseArc, contiguous range containing 0

    @property
    def indices(self):
        return range(min(self.arcs), max(self.arcs) + 1)

    @property
    def n_back(self):
        return -min(self.arcs)

    @property
    def n_fwd(self):
        return max(self.arcs)

    @property
    def base(self):
        return self.arcs[0]

    @property
    def symbols(self):
        return {n: arc.label for n, arc in self.arcs.items()}

    def __len__(self):
        return len(self.arcs)


# ---------------------------------------------------------------------------
# single bounce


def _inside_interval(poly, g):
    """Parameter interval on which ``g`` is inside ``poly``, and the exit face index."""
    lo, hi, exit_idx = -math.inf, math.inf, None
    A = g.start.light * _ETA_DIAG
    B = g.end.light * _ETA_DIAG
    alphas = poly.normals @ A
    betas = poly.normals @ B
    for i, (a, b) in enumerate(zip(alphas, betas)):
        if a >= 0 and b >= 0:
            continue
        if a <= 0 and b <= 0:
            return None
        t = 0.5 * math.log(-a / b)
        if a > 0:
            if t < hi:
                hi, exit_idx = t, i
        elif t > lo:
            lo = t
    if lo >= hi:
        return None
    return lo, hi, exit_idx


def first_hit(poly, g, t_min=-math.inf):
    """First face hit by ``g`` after parameter ``t_min``.

    Raises
    ------
    NoForwardHit
        ``g`` misses the polyhedron or runs into an ideal vertex.
    EdgeOrVertexHit
        the hit point is within ``TOL['edge']`` of a second face plane.
    """
    span = _inside_interval(poly, g)
    if span is None:
        raise NoForwardHit("geodesic does not pass through the polyhedron")
    lo, hi, idx = span
    if math.isinf(hi):
        raise NoForwardHit("geodesic runs into an ideal vertex")
    if hi <= t_min:
        raise NoForwardHit("no face hit after the given parameter")
    x = g.point_at(hi)
    x = np.append(x[:3], math.sqrt(1.0 + x[:3] @ x[:3]))
    resid = poly.normals @ (x * _ETA_DIAG)
    others = np.delete(np.abs(resid), idx)
    if np.min(others) <= TOL["edge"]:
        near = [poly.labels[j] for j in range(poly.k) if abs(resid[j]) <= TOL["edge"]]
        raise EdgeOrVertexHit(f"hit within {TOL['edge']:g} of faces {sorted(near)}")
    e = poly.normals[idx]
    w = e + mdot(e, x) * x
    nb = _hyperboloid_tangent_to_ball(x, w)
    return HitEvent(poly.labels[idx], InteriorPoint.from_hyperboloid(x), hi, nb / np.linalg.norm(nb))


def bounce(poly, g, hit):
    """Specular reflection of ``g`` in the face it hit."""
    return reflect(poly.plane(hit.face_label), g)


def specular_residual(poly, g, hit):
    """|angle(-incoming, normal) - angle(outgoing, normal)| at the hit point."""
    g2 = bounce(poly, g, hit)
    x = hit.point.hyp
    e = poly.plane(hit.face_label).e
    v_in = g.tangent_at(g.param_of(x))
    v_out = g2.tangent_at(g2.param_of(x))
    return abs(tangent_angle(x, -v_in, e) - tangent_angle(x, v_out, e))


# ---------------------------------------------------------------------------
# tracing


def _march(poly, g, t, count):
    """Follow ``g`` from parameter ``t`` through ``count`` exits.

    Returns ``(arcs, error)`` where arcs are ``(geodesic, entry_t, hit)``.
    """
    out = []
    for _ in range(count):
        try:
            hit = first_hit(poly, g, t)
        except (EdgeOrVertexHit, NoForwardHit) as exc:
            return out, exc
        out.append((g, t, hit))
        g = bounce(poly, g, hit)
        t = g.param_of(hit.point)
    return out, None


def _assemble(poly, fwd, rev):
    arcs = {}
    # forward arc n: entry is the previous exit (or the backward march for n = 0)
    for n, (g, _, hit) in enumerate(fwd):
        entry = fwd[n - 1][2].reparametrized(g) if n > 0 else None
        arcs[n] = BaseArc(g, entry, hit)
    if rev and 0 in arcs:
        arcs[0] = BaseArc(arcs[0].geodesic, rev[0][2].reparametrized(arcs[0].geodesic), arcs[0].exit)
    # reversed arc j (j >= 1) is arc -j run backwards
    for j in range(1, len(rev)):
        g = rev[j][0].reversed()
        arcs[-j] = BaseArc(g, rev[j][2].reparametrized(g), rev[j - 1][2].reparametrized(g))
    return PointedTrajectory(poly, arcs)


def trace(poly, point, direction, n_back=0, n_fwd=0):
    """Trace the pointed trajectory through ``point`` with ball velocity ``direction``.

    Arcs ``-n_back .. n_fwd`` are produced; arc 0 contains the seed point.
    Errors carry the partial trajectory built so far in ``exc.partial``.
    """
    point = as_point(point)
    g0 = geodesic_from_direction(point, direction)
    t0 = g0.param_of(point)
    fwd, err_f = _march(poly, g0, t0, n_fwd + 1)
    rev, err_b = _march(poly, g0.reversed(), -t0, n_back + 1)
    err = err_f or err_b
    if err is not None:
        err.partial = _assemble(poly, fwd, rev) if fwd else None
        raise err
    return _assemble(poly, fwd, rev)


def sample_seed(poly, rng):
    """Random seed point and unit direction for ``trace``.

    The point has Dirichlet barycentric weights on the Klein-model hull of
    the vertices, pulled 10% towards their centroid to stay off the cusps.
    """
    verts = np.array([v.point.u for v in poly.vertices])
    w = rng.dirichlet(np.ones(len(verts)))
    k = 0.9 * (w @ verts) + 0.1 * verts.mean(axis=0)
    d = rng.normal(size=3)
    return klein_to_ball(k), d / np.linalg.norm(d)


def from_base_geodesic(poly, g, n_back, n_fwd):
    """Trajectory whose base arc lies on the full geodesic ``g``."""
    fwd, err = _march(poly, g, -math.inf, n_fwd + 1)
    if err is None:
        rev, err = _march(poly, g.reversed(), -math.inf, n_back + 1)
    if err is not None:
        raise err
    return _assemble(poly, fwd, rev)


def _extend_forward(pt):
    last = max(pt.arcs)
    arc = pt.arcs[last]
    g = bounce(pt.poly, arc.geodesic, arc.exit)
    t = g.param_of(arc.exit.point)
    hit = first_hit(pt.poly, g, t)
    arcs = dict(pt.arcs)
    arcs[last + 1] = BaseArc(g, arc.exit.reparametrized(g), hit)
    return PointedTrajectory(pt.poly, arcs)


def _extend_backward(pt):
    first = min(pt.arcs)
    arc = pt.arcs[first]
    rev = arc.reversed()
    g_rev = bounce(pt.poly, rev.geodesic, rev.exit)
    hit = first_hit(pt.poly, g_rev, g_rev.param_of(rev.exit.point))
    g = g_rev.reversed()
    arcs = dict(pt.arcs)
    arcs[first - 1] = BaseArc(g, hit.reparametrized(g), rev.exit.reparametrized(g))
    return PointedTrajectory(pt.poly, arcs)


def tau(pt, steps=1):
    """Move the base arc ``steps`` bounces forward (negative: backward)."""
    for _ in range(abs(steps)):
        if steps > 0:
            if max(pt.arcs) < 1:
                pt = _extend_forward(pt)
            pt = PointedTrajectory(pt.poly, {n - 1: a for n, a in pt.arcs.items()})
        else:
            if min(pt.arcs) > -1:
                pt = _extend_backward(pt)
            pt = PointedTrajectory(pt.poly, {n + 1: a for n, a in pt.arcs.items()})
    return pt


def extract_code(pt):
    """Pointed word ``a_{-n_back} ... a_{-1} . a_0 ... a_{n_fwd}``."""
    lo = min(pt.arcs)
    return Word(tuple(pt.arcs[n].label for n in pt.indices), -lo)


def reverse(pt):
    """Time reversal: arc ``n`` becomes arc ``-n`` run backwards."""
    return PointedTrajectory(pt.poly, {-n: arc.reversed() for n, arc in pt.arcs.items()})


# ---------------------------------------------------------------------------
# metrics on pointed geodesics


def _base_geodesic(pg):
    if isinstance(pg, PointedTrajectory):
        return pg.base.geodesic
    if isinstance(pg, BaseArc):
        return pg.geodesic
    return pg


def d_G(pg1, pg2):
    """Max of the great-circle distances between matching ideal endpoints of the base arcs."""
    g1, g2 = _base_geodesic(pg1), _base_geodesic(pg2)
    return max(great_circle_distance(g1.start, g2.start), great_circle_distance(g1.end, g2.end))


def point_segment_distance(x, g, t0, t1):
    """Hyperbolic distance from hyperboloid point ``x`` to the arc ``g([t0, t1])``."""
    # along a geodesic -<x, g(t)> = a cosh(t - tc) - b sinh(t - tc) is convex in t
    tc = 0.5 * (t0 + t1)
    P = g.point_at(tc)
    W = g.tangent_at(tc)
    a = -mdot(x, P)
    b = mdot(x, W)
    t_star = tc + math.atanh(max(-1.0, min(1.0, b / a)) * (1 - 1e-16))
    t_star = min(max(t_star, t0), t1)
    return hyperbolic_distance(InteriorPoint.from_hyperboloid(x), InteriorPoint.from_hyperboloid(g.point_at(t_star)))


def _directed_hausdorff(arc1, arc2, tol, max_level=14):
    g1, (s0, s1) = arc1.geodesic, arc1.segment()
    g2, (t0, t1) = arc2.geodesic, arc2.segment()
    prev = None
    n = 8
    for _ in range(max_level):
        ts = np.linspace(s0, s1, n + 1)
        est = max(point_segment_distance(g1.point_at(s), g2, t0, t1) for s in ts)
        if prev is not None and abs(est - prev) < tol:
            return est
        prev = est
        n *= 2
    return prev


def d_H(pg1, pg2, tol=None):
    """Hausdorff distance between the base arcs in the hyperbolic metric.

    Each directed sup is estimated on uniform arclength samples, doubled
    until successive estimates differ by less than ``tol``.
    """
    tol = TOL["hausdorff"] if tol is None else tol
    a1 = pg1.base if isinstance(pg1, PointedTrajectory) else pg1
    a2 = pg2.base if isinstance(pg2, PointedTrajectory) else pg2
    return max(_directed_hausdorff(a1, a2, tol), _directed_hausdorff(a2, a1, tol))


def hausdorff_endpoint_bound(pg1, pg2):
    """Hausdorff distance from the four endpoint-to-arc distances.

    Distance to a geodesic segment is convex along geodesics, so each
    directed sup is attained at an endpoint; used as an independent check.
    """
    a1 = pg1.base if isinstance(pg1, PointedTrajectory) else pg1
    a2 = pg2.base if isinstance(pg2, PointedTrajectory) else pg2
    vals = []
    for src, dst in ((a1, a2), (a2, a1)):
        t0, t1 = dst.segment()
        for hit in (src.entry, src.exit):
            vals.append(point_segment_distance(hit.point.hyp, dst.geodesic, t0, t1))
    return max(vals)


def hit_gap(pt):
    """Largest hyperbolic gap between consecutive exit/entry points."""
    gaps = [0.0]
    for n in pt.indices:
        if n + 1 in pt.arcs and pt.arcs[n + 1].entry is not None:
            gaps.append(hyperbolic_distance(pt.arcs[n].exit.point, pt.arcs[n + 1].entry.point))
    return max(gaps)
