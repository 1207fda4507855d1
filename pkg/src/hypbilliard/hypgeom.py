"""Points, planes, geodesics and isometries of hyperbolic 3-space.

The public chart is the Poincare ball; every computation goes through the
hyperboloid model ``{x in R^4 : <x, x> = -1, x_3 > 0}`` with the Minkowski form
``<x, y> = x0*y0 + x1*y1 + x2*y2 - x3*y3``.  In that chart

* an ideal point ``u`` (unit 3-vector) is the light-like vector ``(u, 1)``,
* a hyperbolic plane is ``{x : <x, e> = 0}`` for a unit space-like ``e``,
* the reflection in that plane is the linear map ``x -> x - 2 <x, e> e``.

Geodesics are stored by their ideal endpoints ``a -> b`` and parametrised by
hyperbolic arclength as ``x(t) = (exp(-t) A + exp(t) B) / s`` with
``A = (a, 1)``, ``B = (b, 1)`` and ``s = sqrt(-2 <A, B>)``; ``t = 0`` is the
point of the geodesic closest to the origin of the ball.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from hypbilliard.errors import (
    BoundaryTooClose,
    CoincidentPoints,
    GeometryError,
    NonIntersectingPlanes,
    TangentialContact,
)
from hypbilliard.tolerances import TOL

ETA = np.diag([1.0, 1.0, 1.0, -1.0])
_ETA_DIAG = np.array([1.0, 1.0, 1.0, -1.0])
ORIGIN = np.array([0.0, 0.0, 0.0, 1.0])


def mdot(x, y):
    """Minkowski product along the last axis."""
    return np.sum(np.asarray(x) * np.asarray(y) * _ETA_DIAG, axis=-1)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# chart changes


def ball_to_hyperboloid(p):
    """Map a ball point to the hyperboloid.

    >>> ball_to_hyperboloid([0.5, 0, 0])
    array([1.33333333, 0.        , 0.        , 1.66666667])
    """
    p = np.asarray(p, dtype=float)
    r2 = float(p @ p)
    if r2 >= (1.0 - TOL["boundary"]) ** 2:
        raise BoundaryTooClose(f"|p| = {math.sqrt(r2)!r} is not inside the ball")
    d = 1.0 - r2
    return np.append(2.0 * p, 1.0 + r2) / d


def hyperboloid_to_ball(x):
    x = np.asarray(x, dtype=float)
    return x[..., :3] / (1.0 + x[..., 3:4])


def _ball_tangent_to_hyperboloid(p, v):
    # differential of ball_to_hyperboloid at p applied to v
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    s = 1.0 - p @ p
    pv = p @ v
    return np.append(2.0 * v / s + 4.0 * p * pv / s**2, 4.0 * pv / s**2)


def _hyperboloid_tangent_to_ball(x, w):
    return w[:3] / (1.0 + x[3]) - x[:3] * w[3] / (1.0 + x[3]) ** 2


def _light_to_unit(v):
    u = np.asarray(v[:3], dtype=float) / v[3]
    return u / np.linalg.norm(u)


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class BoundaryPoint:
    """An ideal point, stored as a unit vector of R^3.

    ``theta`` is the azimuth in ``[0, 2 pi)`` and ``phi`` the polar angle from
    the +z axis; both are derived views.
    """

    u: np.ndarray

    def __post_init__(self):
        u = np.array(self.u, dtype=float).reshape(3)
        n = np.linalg.norm(u)
        if n == 0.0:
            raise GeometryError("zero vector is not a boundary point")
        if abs(n - 1.0) > TOL["unit"]:
            u = u / n
        object.__setattr__(self, "u", _frozen(u))

    @classmethod
    def from_angles(cls, theta, phi):
        return cls([math.cos(theta) * math.sin(phi), math.sin(theta) * math.sin(phi), math.cos(phi)])

    @property
    def theta(self):
        return math.atan2(self.u[1], self.u[0]) % (2.0 * math.pi)

    @property
    def phi(self):
        return math.acos(max(-1.0, min(1.0, self.u[2])))

    @property
    def light(self):
        return np.append(self.u, 1.0)

    def __eq__(self, other):
        return isinstance(other, BoundaryPoint) and np.array_equal(self.u, other.u)

    def __hash__(self):
        return hash(self.u.tobytes())


@dataclass(frozen=True, eq=False)
class InteriorPoint:
    """A point of the open ball.

    The hyperboloid coordinates are kept alongside the ball coordinates so
    that points far out in a cusp do not lose precision through the chart
    change.
    """

    ball: np.ndarray
    hyp: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.hyp is None:
            p = np.array(self.ball, dtype=float).reshape(3)
            x = ball_to_hyperboloid(p)
        else:
            x = np.array(self.hyp, dtype=float).reshape(4)
            p = hyperboloid_to_ball(x)
        object.__setattr__(self, "ball", _frozen(p))
        object.__setattr__(self, "hyp", _frozen(x))

    @classmethod
    def from_hyperboloid(cls, x):
        x = np.asarray(x, dtype=float)
        # project back onto the sheet to remove drift
        x = np.append(x[:3], math.sqrt(1.0 + x[:3] @ x[:3]))
        return cls(ball=None, hyp=x)

    def __eq__(self, other):
        return isinstance(other, InteriorPoint) and np.array_equal(self.ball, other.ball)

    def __hash__(self):
        return hash(self.ball.tobytes())


def as_point(p):
    if isinstance(p, InteriorPoint):
        return p
    return InteriorPoint(np.asarray(p, dtype=float))


class Side(enum.Enum):
    NEGATIVE = -1
    ON = 0
    POSITIVE = 1


@dataclass(frozen=True, eq=False)
class HyperbolicPlane:
    """A totally geodesic plane with a fixed orientation.

    ``e`` is a Minkowski-unit space-like normal; the open half-space
    ``<x, e> > 0`` is the positive side.
    """

    e: np.ndarray

    def __post_init__(self):
        e = np.array(self.e, dtype=float).reshape(4)
        n2 = mdot(e, e)
        # far planes (images under deep isometries) have |e| ~ e^d and their
        # Minkowski norm drowns in rounding; keep them as they come
        noise = 8.0 * np.finfo(float).eps * float(e @ e)
        if abs(n2 - 1.0) <= noise:
            object.__setattr__(self, "e", _frozen(e))
            return
        if n2 <= noise:
            raise GeometryError("plane normal must be space-like")
        object.__setattr__(self, "e", _frozen(e / math.sqrt(n2)))

    @classmethod
    def trusted(cls, e):
        """Wrap a normal known to be unit, e.g. the Lorentz image of a unit normal."""
        plane = object.__new__(cls)
        object.__setattr__(plane, "e", _frozen(np.asarray(e, dtype=float).reshape(4)))
        return plane

    @classmethod
    def through_origin(cls, normal):
        """Euclidean plane through the centre with unit normal ``normal``."""
        n = np.asarray(normal, dtype=float)
        return cls(np.append(n / np.linalg.norm(n), 0.0))

    @classmethod
    def from_sphere(cls, center, radius):
        """Sphere orthogonal to the boundary; the positive side is its inside."""
        c = np.asarray(center, dtype=float)
        if abs(c @ c - radius**2 - 1.0) > 1e-10:
            raise GeometryError("sphere is not orthogonal to the boundary")
        return cls(np.append(c, 1.0) / radius)

    @classmethod
    def through_boundary_points(cls, points):
        """Least-squares plane through three or more ideal points.

        Returns the plane and the largest Euclidean distance of the points
        from the fitted circle's plane in R^3.
        """
        us = np.array([BoundaryPoint(p).u if not isinstance(p, BoundaryPoint) else p.u for p in points])
        if len(us) < 3:
            raise GeometryError("need at least three ideal points")
        m = np.hstack([us, -np.ones((len(us), 1))])
        _, sv, vt = np.linalg.svd(m)
        sol = vt[-1]
        if len(us) == 3 and sv[-1] < 1e-14 * sv[0]:
            raise GeometryError("degenerate ideal triangle")
        n, c = sol[:3], sol[3]
        scale = np.linalg.norm(n)
        residual = float(np.max(np.abs(us @ n - c)) / scale)
        if abs(c / scale) >= 1.0:
            raise GeometryError("ideal points do not span a circle")
        return cls(sol), residual

    def flipped(self):
        return HyperbolicPlane(-self.e)

    @property
    def is_flat(self):
        """True when the plane is a Euclidean disc through the ball centre."""
        return abs(self.e[3]) < 1e-15

    @property
    def sphere_center(self):
        return self.e[:3] / self.e[3]

    @property
    def sphere_radius(self):
        return 1.0 / abs(self.e[3])

    def boundary_circle(self):
        """Circle at infinity as ``(center, radius, axis, cap_angle)``.

        ``center`` and ``radius`` describe the Euclidean circle in R^3;
        ``axis`` is the unit vector at the middle of the positive-side cap
        and ``cap_angle`` the angular radius of that cap.
        """
        n, c = self.e[:3], self.e[3]
        nn = np.linalg.norm(n)
        axis = n / nn
        # |n|^2 - c^2 = 1, so sin(psi) = 1/|n| exactly; avoids acos near 1
        radius = min(1.0, 1.0 / nn)
        psi = math.asin(radius)
        if c < 0:
            psi = math.pi - psi
        center = (c / nn) * axis
        return center, radius, axis, psi

    def contains_boundary(self, b):
        return abs(mdot(as_boundary(b).light, self.e)) <= TOL["on"]


def as_boundary(b):
    return b if isinstance(b, BoundaryPoint) else BoundaryPoint(b)


@dataclass(frozen=True)
class DirectedGeodesic:
    start: BoundaryPoint
    end: BoundaryPoint

    def __post_init__(self):
        object.__setattr__(self, "start", as_boundary(self.start))
        object.__setattr__(self, "end", as_boundary(self.end))
        if great_circle_distance(self.start, self.end) < TOL["sep"]:
            raise GeometryError("geodesic endpoints coincide")

    @property
    def _scale(self):
        return math.sqrt(-2.0 * mdot(self.start.light, self.end.light))

    def point_at(self, t):
        """Point at signed arclength ``t`` (hyperboloid chart)."""
        return (math.exp(-t) * self.start.light + math.exp(t) * self.end.light) / self._scale

    def tangent_at(self, t):
        return (-math.exp(-t) * self.start.light + math.exp(t) * self.end.light) / self._scale

    def param_of(self, x):
        """Arclength parameter of a hyperboloid point lying on the geodesic."""
        x = x.hyp if isinstance(x, InteriorPoint) else np.asarray(x, dtype=float)
        return 0.5 * math.log(mdot(x, self.start.light) / mdot(x, self.end.light))

    def reversed(self):
        """Same curve, opposite direction; parameters change sign."""
        return DirectedGeodesic(self.end, self.start)

    def ball_points(self, t0, t1, n):
        ts = np.linspace(t0, t1, n)
        return np.array([hyperboloid_to_ball(self.point_at(t)) for t in ts])


RENORM_LIMIT = 1e4


@dataclass(frozen=True, eq=False)
class Isometry:
    """A Lorentz matrix preserving the upper sheet of the hyperboloid."""

    matrix: np.ndarray
    compositions: int = 0

    def __post_init__(self):
        object.__setattr__(self, "matrix", _frozen(np.array(self.matrix, dtype=float).reshape(4, 4)))

    @classmethod
    def identity(cls):
        return cls(np.eye(4))

    @classmethod
    def reflection(cls, plane):
        e = plane.e
        return cls(np.eye(4) - 2.0 * np.outer(e, e * _ETA_DIAG))

    @property
    def orientation_preserving(self):
        return bool(np.linalg.det(self.matrix) > 0)

    def lorentz_residual(self):
        L = self.matrix
        return float(np.max(np.abs(L.T @ ETA @ L - ETA)))

    def inverse(self):
        return Isometry(ETA @ self.matrix.T @ ETA, self.compositions)

    def __matmul__(self, other):
        count = self.compositions + other.compositions + 1
        out = Isometry(self.matrix @ other.matrix, count)
        if count >= 16:
            out = out.renormalized()
        return out

    def renormalized(self):
        """Lorentz Gram-Schmidt on the columns, time column first.

        Skipped once entries pass ``RENORM_LIMIT``: beyond that the Minkowski
        inner products needed for the correction cancel below rounding and
        the correction would add error instead of removing it.
        """
        if np.max(np.abs(self.matrix)) > RENORM_LIMIT:
            return Isometry(self.matrix, 0)
        cols = [c.copy() for c in np.array(self.matrix).T]
        t = cols[3]
        t /= math.sqrt(-mdot(t, t))
        done = [t]
        for i in range(3):
            c = cols[i]
            for d in done:
                c = c - mdot(c, d) / mdot(d, d) * d
            c /= math.sqrt(mdot(c, c))
            cols[i] = c
            done.append(c)
        cols[3] = t
        return Isometry(np.array(cols).T, 0)

    def apply(self, obj):
        L = self.matrix
        if isinstance(obj, InteriorPoint):
            return InteriorPoint.from_hyperboloid(L @ obj.hyp)
        if isinstance(obj, BoundaryPoint):
            return BoundaryPoint(_light_to_unit(L @ obj.light))
        if isinstance(obj, DirectedGeodesic):
            return DirectedGeodesic(self.apply(obj.start), self.apply(obj.end))
        if isinstance(obj, HyperbolicPlane):
            return HyperbolicPlane.trusted(L @ obj.e)
        if isinstance(obj, Isometry):
            return self @ obj
        x = np.asarray(obj, dtype=float)
        if x.shape == (4,):
            return L @ x
        raise TypeError(f"cannot apply an isometry to {type(obj).__name__}")

    __call__ = apply


# ---------------------------------------------------------------------------
# operations


def hyperbolic_distance(p, q):
    """Hyperbolic distance between two interior points.

    Uses ``d = 2 asinh(|x - y|_M / 2)``, which equals
    ``arccosh(-<x, y>)`` but keeps full precision for nearby points.
    """
    x, y = as_point(p).hyp, as_point(q).hyp
    diff = x - y
    q2 = max(0.0, mdot(diff, diff))
    return 2.0 * math.asinh(math.sqrt(q2) / 2.0)


def great_circle_distance(b1, b2):
    u1, u2 = as_boundary(b1).u, as_boundary(b2).u
    # atan2 form is accurate at both small and near-antipodal separations
    return math.atan2(np.linalg.norm(np.cross(u1, u2)), float(u1 @ u2))


def geodesic_through(p, q):
    """Directed geodesic through ``p`` then ``q``."""
    p, q = as_point(p), as_point(q)
    if hyperbolic_distance(p, q) <= 1e-12:
        raise CoincidentPoints("points coincide")
    xp, xq = p.hyp, q.hyp
    w = xq + mdot(xp, xq) * xp
    w = w / math.sqrt(mdot(w, w))
    return DirectedGeodesic(_light_to_unit(xp - w), _light_to_unit(xp + w))


def geodesic_from_direction(p, v):
    """Directed geodesic leaving ``p`` with ball-chart velocity ``v``."""
    p = as_point(p)
    w = _ball_tangent_to_hyperboloid(p.ball, v)
    n2 = mdot(w, w)
    if n2 <= 0.0:
        raise GeometryError("direction must be nonzero")
    w = w / math.sqrt(n2)
    x = p.hyp
    return DirectedGeodesic(_light_to_unit(x - w), _light_to_unit(x + w))


def reflect(plane, entity):
    """Reflect a point, ideal point, geodesic or plane in ``plane``."""
    e = plane.e
    if isinstance(entity, InteriorPoint):
        x = entity.hyp
        return InteriorPoint.from_hyperboloid(x - 2.0 * mdot(x, e) * e)
    if isinstance(entity, BoundaryPoint):
        v = entity.light
        return BoundaryPoint(_light_to_unit(v - 2.0 * mdot(v, e) * e))
    if isinstance(entity, DirectedGeodesic):
        return DirectedGeodesic(reflect(plane, entity.start), reflect(plane, entity.end))
    if isinstance(entity, HyperbolicPlane):
        f = entity.e
        return HyperbolicPlane(f - 2.0 * mdot(f, e) * e)
    return reflect(plane, as_point(entity))


def plane_side(plane, p):
    v = mdot(as_point(p).hyp, plane.e)
    if abs(v) <= TOL["on"]:
        return Side.ON
    return Side.POSITIVE if v > 0 else Side.NEGATIVE


def _crossing(g, e):
    """Signed endpoint products and crossing parameter of ``g`` with plane ``e``."""
    a = mdot(g.start.light, e)
    b = mdot(g.end.light, e)
    if a * b < 0:
        return a, b, 0.5 * math.log(-a / b)
    return a, b, None


def geodesic_plane_intersection(g, plane):
    """Intersection point of ``g`` with ``plane`` and its arclength parameter.

    Returns ``None`` when the ideal endpoints lie on the same closed side.
    Raises ``TangentialContact`` when the geodesic comes within ``TOL['on']``
    of the plane without crossing it.
    """
    a, b, t = _crossing(g, plane.e)
    if t is None:
        closest = 2.0 * math.sqrt(max(0.0, a * b)) / g._scale
        if closest < TOL["on"]:
            raise TangentialContact(f"geodesic grazes the plane (min |<x,e>| = {closest:.3g})")
        return None
    return InteriorPoint.from_hyperboloid(g.point_at(t)), t


def dihedral_angle(p1, p2, interior_ref):
    """Angle between two planes measured in the wedge containing ``interior_ref``."""
    x = as_point(interior_ref).hyp
    e1 = p1.e if mdot(x, p1.e) >= 0 else -p1.e
    e2 = p2.e if mdot(x, p2.e) >= 0 else -p2.e
    c = mdot(e1, e2)
    if abs(c) >= 1.0 - 1e-12:
        raise NonIntersectingPlanes(f"<e1, e2> = {c!r}")
    return math.acos(-c)


def plane_distance(p1, p2):
    """Distance between disjoint planes (zero if they meet, even at infinity)."""
    c = abs(mdot(p1.e, p2.e))
    # planes tangent at infinity give c = 1 up to rounding
    return math.acosh(c) if c > 1.0 + 1e-12 else 0.0


def point_plane_distance(p, plane):
    return math.asinh(abs(mdot(as_point(p).hyp, plane.e)))


def tangent_angle(x, v, w):
    """Angle between tangent vectors ``v`` and ``w`` at hyperboloid point ``x``."""
    v = v + mdot(v, x) * x
    w = w + mdot(w, x) * x
    v = v / math.sqrt(mdot(v, v))
    w = w / math.sqrt(mdot(w, w))
    d, s = v - w, v + w
    return 2.0 * math.atan2(math.sqrt(max(0.0, mdot(d, d))), math.sqrt(max(0.0, mdot(s, s))))


def klein_to_ball(k):
    k = np.asarray(k, dtype=float)
    r2 = np.sum(k * k, axis=-1, keepdims=True)
    return k / (1.0 + np.sqrt(np.clip(1.0 - r2, 0.0, None)))


def ball_to_klein(p):
    p = np.asarray(p, dtype=float)
    r2 = np.sum(p * p, axis=-1, keepdims=True)
    return 2.0 * p / (1.0 + r2)
