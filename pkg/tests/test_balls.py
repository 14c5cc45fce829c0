import math

import numpy as np
import pytest

from slitplane.balls import ball_complex, injectivity_radius
from slitplane.flatcomplex import LocatedPoint
from slitplane.origami import Perm, build_sts, parse_cycles, random_sts, rescale


def torus_ball_topology(p: complex, r: float, width: float, height: float,
                        n: int = 480):
    """Pixel-complex oracle for chi and boundary-circle count of a ball on a
    rectangular torus, independent of the covering-space machinery."""
    nx = n
    ny = max(8, int(n * height / width))
    xs = (np.arange(nx) + 0.5) * width / nx
    ys = (np.arange(ny) + 0.5) * height / ny
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    dist2 = np.full((nx, ny), np.inf)
    for a in range(-2, 3):
        for b in range(-2, 3):
            dx = gx - p.real + a * width
            dy = gy - p.imag + b * height
            dist2 = np.minimum(dist2, dx * dx + dy * dy)
    inside = dist2 <= r * r

    faces = 0
    vertices = set()
    edges = set()
    edge_count: dict = {}
    for i in range(nx):
        for j in range(ny):
            if not inside[i, j]:
                continue
            faces += 1
            i1 = (i + 1) % nx
            j1 = (j + 1) % ny
            for v in ((i, j), (i1, j), (i, j1), (i1, j1)):
                vertices.add(v)
            for e in (("h", i, j), ("h", i, j1), ("v", i, j), ("v", i1, j)):
                edges.add(e)
                edge_count[e] = edge_count.get(e, 0) + 1
    chi = len(vertices) - len(edges) + faces

    boundary = [e for e, c in edge_count.items() if c == 1]
    parent = {e: e for e in boundary}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    by_vertex: dict = {}
    for e in boundary:
        kind, i, j = e
        if kind == "h":
            ends = [(i, j), ((i + 1) % nx, j)]
        else:
            ends = [(i, j), (i, (j + 1) % ny)]
        for v in ends:
            by_vertex.setdefault(v, []).append(e)
    for group in by_vertex.values():
        for e in group[1:]:
            union(group[0], e)
    circles = len({find(e) for e in boundary})
    return chi, circles


def test_torus_injrad_half():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    for pos in (0.23 + 0.37j, 0.5 + 0.1j, 0.8 + 0.8j):
        assert injectivity_radius(torus, LocatedPoint(0, pos), 2.0) == pytest.approx(0.5)


def test_torus_injrad_lattice_oracle():
    # shortest essential loop through any point is the lattice systole
    systole = min(abs(complex(a, b)) for a in range(-3, 4) for b in range(-3, 4)
                  if (a, b) != (0, 0))
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    got = injectivity_radius(torus, LocatedPoint(0, 0.31 + 0.62j), 2.0)
    assert got == pytest.approx(systole / 2.0)


def test_three_square_cone_injrad():
    sts = build_sts(parse_cycles("(1 2)", 3), parse_cycles("(1 3)", 3))
    assert injectivity_radius(sts, sts.locate_cone(0), 2.0) == pytest.approx(0.5)


def test_three_square_shortest_loop_is_unit_saddle_connection():
    # the displacement realizing the first event is a length-one lattice vector
    from slitplane.balls import _lift_displacements
    sts = build_sts(parse_cycles("(1 2)", 3), parse_cycles("(1 3)", 3))
    disp = _lift_displacements(sts, sts.locate_cone(0), 1.0)
    shortest = min(d for _, d in disp)
    assert shortest == pytest.approx(1.0, abs=1e-9)
    assert all(d > 1.0 - 1e-9 for _, d in disp)


def test_injrad_scales_with_rescale():
    sts = build_sts(parse_cycles("(1 2)", 3), parse_cycles("(1 3)", 3))
    base = injectivity_radius(sts, sts.locate_cone(0), 2.0)
    for s in (math.sqrt(2.0), 2.0, 0.5):
        scaled = rescale(sts, s)
        got = injectivity_radius(scaled, scaled.locate_cone(0), 2.0 * s)
        assert got == pytest.approx(s * base, rel=1e-12)


def test_torus_rescaled_by_sqrt2():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    big = rescale(torus, math.sqrt(2.0))
    got = injectivity_radius(big, LocatedPoint(0, 0.3 + 0.4j), 2.0)
    assert got == pytest.approx(math.sqrt(2.0) / 2.0)


def test_injrad_caps_at_rmax():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    assert injectivity_radius(torus, LocatedPoint(0, 0.3 + 0.3j), 0.3) == 0.3


def test_ball_complex_simply_connected_below_first_event():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    p = LocatedPoint(0, 0.23 + 0.37j)
    bc = ball_complex(torus, p, 0.4)
    assert bc.chi == 1 and bc.boundary_components == 1
    assert bc.simply_connected
    assert bc.identifications == []
    assert bc.pieces[0]["star"] == pytest.approx(math.pi * 0.16, rel=1e-9)


def test_ball_complex_square_torus_vs_pixel_oracle():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    p = LocatedPoint(0, 0.23 + 0.37j)
    for r in (0.3, 0.55, 0.62):
        bc = ball_complex(torus, p, r)
        chi, circles = torus_ball_topology(p.pos, r, 1.0, 1.0)
        assert bc.chi == chi
        assert bc.boundary_components == circles


def test_ball_complex_annulus_on_two_square_torus():
    wide = build_sts(parse_cycles("(1 2)", 2), Perm.identity(2))
    p = LocatedPoint(0, 0.52 + 0.5j)
    bc = ball_complex(wide, p, 0.7)
    assert bc.chi == 0
    assert bc.boundary_components == 2
    assert not bc.simply_connected
    chi, circles = torus_ball_topology(p.pos, 0.7, 2.0, 1.0)
    assert (chi, circles) == (0, 2)


def test_ball_complex_identifications_are_symmetric():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    bc = ball_complex(torus, LocatedPoint(0, 0.4 + 0.45j), 0.62)
    hols = sorted((round(h.real, 6), round(h.imag, 6)) for h, _ in bc.identifications)
    assert ((-1.0, 0.0) in hols) == ((1.0, 0.0) in hols)
    assert ((0.0, -1.0) in hols) == ((0.0, 1.0) in hols)


def test_injrad_interior_point_random_origami():
    # interior points of any unit-square surface have injrad <= 1/2 of the
    # shortest lattice loop; sanity-check a few random surfaces for bounds
    for seed in range(3):
        sts = random_sts(seed, 4)
        got = injectivity_radius(sts, LocatedPoint(0, 0.41 + 0.27j), 1.0)
        assert 0.0 < got <= 1.0
