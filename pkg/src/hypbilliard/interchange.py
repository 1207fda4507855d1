"""JSON interchange for polyhedra, trajectories and chains; OBJ export for viewers.

JSON is the source of truth: floats are written with ``repr`` precision so a
dump/load cycle is exact.  OBJ output is for rendering only.
"""

from __future__ import annotations

import json

import numpy as np

from hypbilliard.billiard import BaseArc, HitEvent, PointedTrajectory, extract_code
from hypbilliard.hypgeom import DirectedGeodesic, InteriorPoint, klein_to_ball
from hypbilliard.errors import PolytopeError
from hypbilliard.polytope import BUILTINS, face_area, from_spec, surface_area
from hypbilliard.unfold import verify_nesting

FORMAT_VERSION = 1


def _vec(a):
    return [float(x) for x in a]


# ---------------------------------------------------------------------------
# polyhedra


def polyhedron_spec(poly):
    """Minimal description from which ``from_spec`` rebuilds ``poly``."""
    # vertices in the order the face cycles refer to
    n = 1 + max(max(f.vertex_cycle) for f in poly.faces)
    coords = [None] * n
    for f in poly.faces:
        for i, u in zip(f.vertex_cycle, f.points):
            coords[i] = _vec(u)
    return {
        "name": poly.name,
        "k": poly.k,
        "vertices": coords,
        "faces": [{"label": f.label, "vertices": list(f.vertex_cycle)} for f in poly.faces],
    }


def polyhedron_from_dict(d):
    faces = [(f["label"], f["vertices"]) for f in d["faces"]]
    if "k" in d and d["k"] != len(faces):
        raise PolytopeError(f"k = {d['k']} but {len(faces)} faces are listed")
    return from_spec(d["vertices"], faces, name=d.get("name", ""))


def load_polyhedron(spec):
    """Built-in name or path of a polyhedron JSON file."""
    if spec in BUILTINS:
        return BUILTINS[spec]()
    with open(spec) as fh:
        d = json.load(fh)
    return polyhedron_from_dict(d.get("polyhedron", d))


def polyhedron_report(poly):
    """Spec plus derived data: dihedral angles, lambda table, areas."""
    d = polyhedron_spec(poly)
    d["k"] = poly.k
    d["vertex_count"] = len(poly.vertices)
    d["vertex_labels"] = [v.label for v in poly.vertices]
    d["adjacency"] = [
        {"faces": sorted(pair), "omega": a.omega, "lambda": a.lam, "lambda_residual": a.residual}
        for pair, a in sorted(poly.adjacency.items(), key=lambda kv: sorted(kv[0]))
    ]
    d["face_areas"] = {str(f.label): face_area(poly, f.label) for f in poly.faces}
    d["surface_area"] = surface_area(poly)
    d["coding_ready"] = poly.coding_ready
    d["interior_ref"] = _vec(poly.interior_ref.ball)
    return d


# ---------------------------------------------------------------------------
# trajectories


def _hit_dict(h):
    return {"face": h.face_label, "point": _vec(h.point.hyp), "t": h.t, "normal": _vec(h.inward_normal)}


def _hit_from(d):
    x = np.array(d["point"])
    return HitEvent(int(d["face"]), InteriorPoint(ball=None, hyp=x), float(d["t"]), np.array(d["normal"]))


def trajectory_dict(pt, complete=True):
    arcs = []
    for n in pt.indices:
        arc = pt.arcs[n]
        arcs.append(
            {
                "index": n,
                "label": arc.label,
                "start": _vec(arc.geodesic.start.u),
                "end": _vec(arc.geodesic.end.u),
                "entry": None if arc.entry is None else _hit_dict(arc.entry),
                "exit": _hit_dict(arc.exit),
            }
        )
    return {
        "format": FORMAT_VERSION,
        "polyhedron": polyhedron_spec(pt.poly),
        "complete": complete,
        "code": str(extract_code(pt)),
        "arcs": arcs,
    }


def trajectory_from_dict(d, poly=None):
    poly = polyhedron_from_dict(d["polyhedron"]) if poly is None else poly
    arcs = {}
    for a in d["arcs"]:
        g = DirectedGeodesic(np.array(a["start"]), np.array(a["end"]))
        entry = None if a["entry"] is None else _hit_from(a["entry"])
        arcs[int(a["index"])] = BaseArc(g, entry, _hit_from(a["exit"]))
    return PointedTrajectory(poly, arcs)


def load_trajectory(path, poly=None):
    with open(path) as fh:
        return trajectory_from_dict(json.load(fh), poly)


# ---------------------------------------------------------------------------
# unfolding chains


def chain_dict(chain):
    rep = verify_nesting(chain)

    def steps(seq, dist):
        return [
            {
                "index": s.index,
                "label": s.label,
                "center": _vec(s.center),
                "radius": s.radius,
                "cap_axis": _vec(s.axis),
                "cap_angle": s.cap_angle,
                "distance_to_base": d,
            }
            for s, d in zip(seq, dist)
        ]

    fwd = steps(chain.forward, rep.distances)
    bwd = steps(chain.backward, rep.backward_distances)
    return {
        "word": str(chain.word),
        "base": _vec(chain.base.ball),
        "forward": fwd,
        "backward": bwd,
        "nesting": {
            "nested": rep.nested,
            "backward_nested": rep.backward_nested,
            "pair_nested": rep.pair_nested,
            "base_separated": rep.base_separated,
            "radii_decreasing": rep.radii_decreasing,
            "distances_increasing": rep.distances_increasing,
        },
    }


def dumps(obj):
    """Deterministic JSON text (shortest round-trip float repr)."""
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


# ---------------------------------------------------------------------------
# OBJ


def face_mesh(face, resolution=8):
    """Triangulated face as ``(points, triangles)`` on its sphere in the ball.

    The ideal polygon is fan-triangulated from its first vertex in the Klein
    model, each triangle subdivided ``resolution`` times along every edge,
    and the grid mapped to the ball; Klein-flat triangles land on the face's
    spherical cap.  Grid points on shared fan edges are welded.
    """
    P = face.points
    r = resolution
    pts, tris, index = [], [], {}

    def vid(key, k):
        if key not in index:
            index[key] = len(pts)
            nk = np.linalg.norm(k)
            pts.append(k / nk if nk >= 1.0 - 1e-15 else klein_to_ball(k))
        return index[key]

    for t in range(1, len(P) - 1):
        grid = {}
        for i in range(r + 1):
            for j in range(r + 1 - i):
                k = ((r - i - j) * P[0] + i * P[t] + j * P[t + 1]) / r
                # points on the fan edges P0-Pt / P0-Pt+1 are keyed by that edge
                if i == 0 and j == 0:
                    key = ("apex",)
                elif j == 0:
                    key = ("edge", t, i)
                elif i == 0:
                    key = ("edge", t + 1, j)
                else:
                    key = ("in", t, i, j)
                grid[i, j] = vid(key, k)
        for i in range(r):
            for j in range(r - i):
                tris.append((grid[i, j], grid[i + 1, j], grid[i, j + 1]))
                if i + j < r - 1:
                    tris.append((grid[i + 1, j], grid[i + 1, j + 1], grid[i, j + 1]))
    return np.array(pts), tris


def arc_polyline(arc, samples=64):
    t0, t1 = arc.segment()
    return arc.geodesic.ball_points(t0, t1, samples)


def _obj_vertex(p):
    return "v " + " ".join(f"{float(x):.17g}" for x in p)


def to_obj(poly, pt=None, resolution=8, samples=64):
    """OBJ text: one object per face (triangles) and one per arc (polyline)."""
    lines = [f"# {poly.name or 'polyhedron'}: {poly.k} faces"]
    base = 1
    for f in poly.faces:
        pts, tris = face_mesh(f, resolution)
        lines.append(f"o face_{f.label}")
        lines += [_obj_vertex(p) for p in pts]
        lines += [f"f {a + base} {b + base} {c + base}" for a, b, c in tris]
        base += len(pts)
    if pt is not None:
        for n in pt.indices:
            arc = pt.arcs[n]
            if arc.entry is None:
                continue
            pts = arc_polyline(arc, samples)
            lines.append(f"o arc_{n}")
            lines += [_obj_vertex(p) for p in pts]
            lines.append("l " + " ".join(str(base + i) for i in range(len(pts))))
            base += len(pts)
    return "\n".join(lines) + "\n"

