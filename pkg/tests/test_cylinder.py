import numpy as np
import pytest

from hypbilliard.billiard import extract_code, trace
from hypbilliard.cylinder import (
    chain_walls,
    chebyshev_center,
    constraints,
    face_sign,
    joint_center,
    margins,
    worst_margin,
)
from hypbilliard.unfold import unfold_along

from conftest import random_unit


@pytest.fixture(scope="module")
def traced(tetra):
    rng = np.random.default_rng(20)
    return [trace(tetra, tetra.interior_ref, random_unit(rng), 12, 12) for _ in range(6)]


def test_face_signs_consistent(tetra, octa):
    for poly in (tetra, octa):
        assert {abs(face_sign(f)) for f in poly.faces} == {1.0}


def test_traced_geodesic_satisfies_its_cylinder(tetra, traced):
    # the true endpoints satisfy every crossing constraint of their own code
    for pt in traced:
        chain = unfold_along(tetra, extract_code(pt))
        edges = chain_walls(tetra, chain)
        g = pt.base.geodesic
        n, p = constraints(edges, g.start.u, 1)
        assert len(n) == len(edges.P)
        assert worst_margin(g.end.u, n, p) > 0
        n, p = constraints(edges, g.end.u, 0)
        assert worst_margin(g.start.u, n, p) > 0


def test_other_code_violates_cylinder(tetra, traced):
    a, b = traced[0], traced[1]
    chain = unfold_along(tetra, extract_code(a))
    edges = chain_walls(tetra, chain)
    g = b.base.geodesic
    n, p = constraints(edges, g.start.u, 1)
    assert worst_margin(g.end.u, n, p) < 0


def test_sensitivity_filter_drops_near_edges(tetra, traced):
    pt = traced[0]
    chain = unfold_along(tetra, extract_code(pt))
    edges = chain_walls(tetra, chain)
    g = pt.base.geodesic
    full, _ = constraints(edges, g.start.u, 1)
    filtered, _ = constraints(edges, g.start.u, 1, fixed_radius=1e-3, free_radius=0.5)
    assert 0 < len(filtered) < len(full)


def test_chebyshev_center_of_a_spherical_square():
    # four great-circle half-spaces around the north pole
    z = np.array([0.0, 0.0, 1.0])
    normals, points = [], []
    for ang in np.arange(4) * np.pi / 2:
        d = np.array([np.cos(ang), np.sin(ang), 0.0])
        p = np.array([0.0, 0.0, 1.0]) + 0.1 * d  # boundary point at offset 0.1
        normals.append(-d)
        points.append(p)
    normals, points = np.array(normals), np.array(points)
    start = np.array([0.05, -0.03, 1.0])
    start /= np.linalg.norm(start)
    u, m = chebyshev_center(start, normals, points, scale=0.2)
    assert np.allclose(u, z, atol=1e-6)
    assert m == pytest.approx(0.1, abs=1e-6)
    assert np.all(margins(u, normals, points) >= m - 1e-12)


def test_empty_constraints():
    z = np.array([1.0, 0.0, 0.0])
    u, m = chebyshev_center(z, np.empty((0, 3)), np.empty((0, 3)), 0.1)
    assert m == np.inf and np.array_equal(u, z)


def test_joint_center_recovers_a_feasible_pair(tetra, traced):
    from hypbilliard.billiard import from_base_geodesic
    from hypbilliard.hypgeom import DirectedGeodesic

    rng = np.random.default_rng(21)
    for pt in traced[:3]:
        code = extract_code(pt)
        edges = chain_walls(tetra, unfold_along(tetra, code))
        g = pt.base.geodesic
        # start well off the true pair
        a0 = g.start.u + 0.02 * random_unit(rng)
        b0 = g.end.u + 0.02 * random_unit(rng)
        a, b, m = joint_center(a0 / np.linalg.norm(a0), b0 / np.linalg.norm(b0), edges, 0.05, 0.05)
        assert m > 0
        other = from_base_geodesic(tetra, DirectedGeodesic(a, b), 12, 12)
        assert extract_code(other) == code
