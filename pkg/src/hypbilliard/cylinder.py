"""Cylinder sets of an unfolding chain as linear constraints on the ideal endpoints.

In the Klein model geodesics are straight lines and an ideal face is a
convex Euclidean polygon, so a line crosses the face inside the polygon iff
its Pluecker products with all polygon edges share one sign.  With light
vectors ``A = (a, 1)``, ``B = (b, 1)`` and face vertices ``V_i`` that product
is ``det[A, B, V_i, V_{i+1}]``, which is linear in ``B`` for fixed ``A`` and
vice versa.  The geodesics whose code agrees with a window are exactly those
crossing every wall of the chain inside its polygon, in the right direction,
so for a fixed backward endpoint the admissible forward endpoints form an
intersection of half-spaces (and symmetrically).

``chebyshev_center`` picks the point of such a region with the largest
worst-case margin, by a short trust-region loop of linear programs in
tangent coordinates.  ``joint_center`` does the same for both endpoints at
once, treating the bilinear products to first order.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linprog

from hypbilliard.hypgeom import ball_to_hyperboloid, klein_to_ball

SENSITIVITY = 30.0
_ETA_DIAG = np.array([1.0, 1.0, 1.0, -1.0])


def _light(u):
    u = np.atleast_2d(np.asarray(u, dtype=float))
    return np.hstack([u, np.ones((len(u), 1))])


def _unit_light(x):
    # homogeneous light vectors with huge entries -> (u, 1)
    x = np.atleast_2d(x)
    u = x[:, :3] / x[:, 3:4]
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return _light(u)


def face_sign(face):
    """Sign of ``det[A, B, V_i, V_i+1]`` for a line leaving the polyhedron through ``face``."""
    pts = face.points
    # the Klein centroid of the vertices lies on the face
    x = ball_to_hyperboloid(klein_to_ball(pts.mean(axis=0)))
    e = face.plane.e
    x = x - float(x @ (e * _ETA_DIAG)) * e
    x /= math.sqrt(-float(x @ (x * _ETA_DIAG)))
    a, b = x + e, x - e  # inside end, outside end
    V = _light(pts)
    dets = [np.linalg.det(np.array([a, b, V[i], V[(i + 1) % len(V)]])) for i in range(len(V))]
    signs = set(np.sign(dets))
    if len(signs) != 1 or 0 in signs:
        raise ValueError(f"face {face.label}: inconsistent crossing orientation")
    return float(signs.pop())


class Edges:
    """Oriented polygon edges ``P -> Q`` (unit light vectors) of every wall, with crossing signs."""

    __slots__ = ("P", "Q", "sign")

    def __init__(self, P, Q, sign):
        self.P, self.Q, self.sign = P, Q, sign


def chain_walls(poly, chain):
    """Edges of all walls crossed by ``chain``, backward and forward."""
    signs = {f.label: face_sign(f) for f in poly.faces}
    P, Q, S = [], [], []
    for direction, orient in (("backward", -1.0), ("forward", 1.0)):
        prev = None
        for j, step in enumerate(chain.steps(direction)):
            V = _light(poly.face(step.label).points)
            if prev is not None:
                V = _unit_light(V @ prev.matrix.T)
            P.append(V)
            Q.append(np.roll(V, -1, axis=0))
            # det(M_{j-1}) = (-1)^j after j reflections
            S.append(np.full(len(V), orient * signs[step.label] * (-1.0) ** j))
            prev = step.isometry
    return Edges(np.vstack(P), np.vstack(Q), np.concatenate(S))


def constraints(edges, fixed, slot, fixed_radius=0.0, free_radius=1.0):
    """Half-spaces ``n_k . (u - p_k) >= 0`` (unit ``n_k``) on the free endpoint ``u``.

    ``slot`` is 0 when the backward endpoint is free and 1 for the forward
    one; ``fixed`` is the other endpoint as a unit 3-vector, known to within
    ``fixed_radius``, and ``free_radius`` is the size of the region the free
    endpoint lives in.  An edge at distance ``D`` from ``fixed`` tilts its
    constraint by about ``fixed_radius / D``; edges where that is not small
    against ``free_radius`` are dropped.
    """
    F = _light(fixed)[0]
    near = np.minimum(
        np.linalg.norm(edges.P[:, :3] - F[:3], axis=1),
        np.linalg.norm(edges.Q[:, :3] - F[:3], axis=1),
    )
    far = near > SENSITIVITY * fixed_radius / max(free_radius, fixed_radius, 1e-300)
    P, D = edges.P[far], edges.Q[far] - edges.P[far]
    n = len(P)
    if n == 0:
        return np.empty((0, 3)), np.empty((0, 3))
    M = np.empty((4, n, 4, 4))
    M[:, :, 1 - slot] = F
    M[:, :, slot] = np.eye(4)[:, None, :]
    M[:, :, 2] = P
    M[:, :, 3] = D  # det[.., P, Q] = det[.., P, Q - P]
    g = np.linalg.det(M).T
    # g . (U - P) = g . U since g . P = 0, and U - P has no time part
    normal = g[:, :3] * edges.sign[far][:, None]
    norm = np.linalg.norm(normal, axis=1)
    keep = norm > 0
    return normal[keep] / norm[keep, None], P[keep, :3]


def margins(u, normals, points):
    return np.einsum("ij,ij->i", normals, u - points)


def worst_margin(u, normals, points):
    return float(np.min(margins(u, normals, points))) if len(normals) else math.inf


def _tangent_basis(z):
    a = np.array([1.0, 0, 0]) if abs(z[0]) < 0.9 else np.array([0, 1.0, 0])
    t1 = np.cross(z, a)
    t1 /= np.linalg.norm(t1)
    return np.array([t1, np.cross(z, t1)]).T


def _on_sphere(z, T, q):
    # normalize(z + T q) - z without cancellation
    v = T @ q
    vv = float(v @ v)
    s = math.sqrt(1.0 + vv)
    return (v - z * (vv / (1.0 + s))) / s


def chebyshev_center(z, normals, points, scale, iters=12):
    """Point of ``{u : n_k . (u - p_k) >= 0}`` on the sphere near ``z`` with the best margin.

    The margins are linearised in tangent coordinates at ``z`` and the
    linear program is solved in a box of half-width ``scale``; a step is kept
    only if the true worst margin improves, otherwise the box shrinks.
    Returns ``(u, margin)``.  A negative margin means no admissible point was
    found and ``u`` is the least-violating one.
    """
    z = np.asarray(z, dtype=float)
    best = worst_margin(z, normals, points)
    if not len(normals):
        return z, best
    scale = min(scale, 0.5)
    for _ in range(iters):
        T = _tangent_basis(z)
        # everything in units of ``scale`` so the solver tolerances bite
        b0 = margins(z, normals, points) / scale
        A = normals @ T
        # maximise t  s.t.  b0 + A q >= t, |q|_inf <= 1
        res = linprog(
            np.array([0.0, 0.0, -1.0]),
            A_ub=np.hstack([-A, np.ones((len(A), 1))]),
            b_ub=b0,
            bounds=[(-1, 1), (-1, 1), (None, None)],
            method="highs",
        )
        if res.status != 0:
            break
        u = z + _on_sphere(z, T, res.x[:2] * scale)
        u /= np.linalg.norm(u)
        m = worst_margin(u, normals, points)
        predicted = res.x[2] * scale
        if m > best:
            z, best = u, m
            if abs(m - predicted) <= 0.05 * abs(predicted):
                break  # linear model matches: optimum reached
        else:
            scale *= 0.25
        if scale < 1e-15:
            break
    return z, best


def _cofactors(edges, A, B):
    # g_k = det[A, B, P_k, Q_k] with its gradients in A and in B
    n = len(edges.P)
    D = edges.Q - edges.P
    M = np.empty((4, n, 4, 4))
    M[:, :, 1] = B
    M[:, :, 0] = np.eye(4)[:, None, :]
    M[:, :, 2] = edges.P
    M[:, :, 3] = D
    cA = np.linalg.det(M).T
    M[:, :, 0] = A
    M[:, :, 1] = np.eye(4)[:, None, :]
    cB = np.linalg.det(M).T
    g = cB @ B
    return g * edges.sign, cA * edges.sign[:, None], cB * edges.sign[:, None]


def _joint_margins(edges, a, b, Ta, Tb, sa, sb):
    """Normalised margins and their scaled tangent gradients at ``(a, b)``."""
    A, B = _light(a)[0], _light(b)[0]
    g, cA, cB = _cofactors(edges, A, B)
    G = np.hstack([sa * (cA[:, :3] @ Ta), sb * (cB[:, :3] @ Tb)])
    norm = np.linalg.norm(G, axis=1)
    norm[norm == 0] = 1.0
    return g / norm, G / norm[:, None]


def joint_center(a, b, edges, sa, sb, iters=40):
    """Endpoints ``(a, b)`` with the largest worst normalised crossing margin.

    Tangent steps are measured in units of ``sa`` and ``sb`` (the sizes of
    the regions the endpoints are known to lie in) and every constraint is
    divided by its gradient, so the margin approximates the distance to the
    nearest constraint surface in those units.  Returns ``(a, b, margin)``;
    a positive margin means both endpoints lie in the cylinder set.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if not len(edges.P):
        return a, b, math.inf
    Ta, Tb = _tangent_basis(a), _tangent_basis(b)
    m, G = _joint_margins(edges, a, b, Ta, Tb, sa, sb)
    best = float(np.min(m))
    rho = 0.5 / max(sa, sb) if max(sa, sb) > 0.5 else 1.0
    for _ in range(iters):
        # maximise t  s.t.  m + G q >= t, |q|_inf <= rho
        res = linprog(
            np.array([0.0, 0.0, 0.0, 0.0, -1.0]),
            A_ub=np.hstack([-G, np.ones((len(G), 1))]),
            b_ub=m,
            bounds=[(-rho, rho)] * 4 + [(None, None)],
            method="highs",
        )
        if res.status != 0:
            break
        q = res.x[:4]
        a2 = a + _on_sphere(a, Ta, sa * q[:2])
        b2 = b + _on_sphere(b, Tb, sb * q[2:])
        a2 /= np.linalg.norm(a2)
        b2 /= np.linalg.norm(b2)
        Ta2, Tb2 = _tangent_basis(a2), _tangent_basis(b2)
        m2, G2 = _joint_margins(edges, a2, b2, Ta2, Tb2, sa, sb)
        new = float(np.min(m2))
        predicted = float(res.x[4])
        if new > best:
            a, b, Ta, Tb, m, G, best = a2, b2, Ta2, Tb2, m2, G2, new
            if abs(new - predicted) <= 0.05 * abs(predicted):
                break
        else:
            rho *= 0.25
            if rho < 1e-12:
                break
    return a, b, best
