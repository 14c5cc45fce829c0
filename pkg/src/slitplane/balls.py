"""Metric-ball topology and injectivity radii on finite surfaces.

A metric ball on a compact translation surface is the projection of the
corresponding ball in the universal cover, which is a topological disk
(nonpositive curvature).  The projection is injective, hence the ball
simply connected, exactly while no deck translate of the center's lift
comes within twice the radius; the injectivity radius at a point is
therefore half the smallest displacement over the point's other lifts.
The event radii at which the ball's combinatorics change are those half
displacements, so the first-failure scan reduces to their minimum.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional

from .cover import UniversalCover
from .explorer import (DistanceMap, dijkstra, distance, metric_ball_singularities,
                       visible_atlas)
from .flatcomplex import LocatedPoint
from .geom import EPS_GEO, Vec2
from .origami import SquareTiledSurface


def _lift_displacements(surface: SquareTiledSurface, point: LocatedPoint,
                        reach: float) -> list[tuple[Vec2, float]]:
    """(holonomy, distance) of every deck translate of the lift of ``point``
    within covering-space distance ``reach``."""
    cover = UniversalCover(surface, point)
    source = cover.base_located
    dmap = dijkstra(cover, source, reach)
    return _collect_lifts(cover, source, dmap, point, reach)


def _collect_lifts(cover: UniversalCover, source: LocatedPoint, dmap,
                   point: LocatedPoint, reach: float) -> list[tuple[Vec2, float]]:
    out: list[tuple[Vec2, float]] = []
    if point.cone is not None:
        base_vid = cover.base_vertex_of(source.cone)
        root_id = cover.canonical_cone(source.cone)
        best: dict = {}
        for cid, (dist_c, _) in dmap.entries.items():
            canonical = cover.canonical_cone(cid)
            if canonical == root_id or cover.base_vertex_of(canonical) != base_vid:
                continue
            if canonical not in best or dist_c < best[canonical][1]:
                chart, pos = cover.cone_position(canonical)
                hol = cover.dev_offset(chart) + pos \
                    - (cover.dev_offset(source.chart) + source.pos)
                best[canonical] = (hol, dist_c)
        out.extend(best.values())
    else:
        for lift in cover.lifts_of_regular(point):
            hol = cover.dev_offset(lift.chart)
            if abs(hol) > reach + EPS_GEO:
                continue
            d = distance(cover, source, lift, reach, dmap=dmap)
            if d is not None and d > EPS_GEO:
                out.append((hol, d))
    out.sort(key=lambda rec: rec[1])
    return out


def injectivity_radius(surface: SquareTiledSurface, point: LocatedPoint,
                       r_max: float) -> float:
    """Supremum of ``r <= r_max`` with the metric ball about ``point`` simply
    connected.

    Scans the event radii (half displacements of the point's other lifts in
    the universal cover) for the first simple-connectivity failure; returns
    ``r_max`` if there is none.  The reach is deepened iteratively: a lift
    found within reach ``L`` is already the global minimum because every
    shorter displacement would also lie within ``L``.
    """
    if surface.total_area is None:
        raise ValueError("injectivity radius needs a finite surface")
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    full = 2.0 * r_max
    reach = max(surface.scale, full / 16.0)
    while True:
        reach = min(reach, full)
        events = [d / 2.0 for _, d in _lift_displacements(surface, point, reach)
                  if d <= reach + EPS_GEO]
        if events:
            return min(r_max, min(events))
        if reach >= full:
            return r_max
        reach *= 2.0


@dataclass
class BallComplex:
    """Topological summary of a metric ball on a finite surface.

    ``pieces`` lists the visible stars whose union is the ball (one per
    source: the center, then each cone point within the radius).
    ``identifications`` are the deck displacements active at this radius;
    each +/- pair contributes one essential loop, so ``chi = 1 - classes``.
    ``boundary_components`` is exact when the covered boundary arcs of the
    center's sphere are pairwise disjoint (always true up to and including
    the first event) and ``None`` otherwise.
    """

    center: LocatedPoint
    radius: float
    pieces: list[dict]
    identifications: list[tuple[Vec2, float]]
    chi: int
    boundary_components: Optional[int]

    @property
    def simply_connected(self) -> bool:
        return self.chi == 1 and self.boundary_components == 1


def _class_key(hol: Vec2) -> tuple[float, float]:
    a = (round(hol.real, 9), round(hol.imag, 9))
    b = (round(-hol.real, 9), round(-hol.imag, 9))
    return max(a, b)


def _boundary_count(hols: list[Vec2], radius: float) -> Optional[int]:
    """Boundary circles of the quotient of a round sphere by chord gluings.

    Each displacement ``h`` covers the arc of directions within
    ``acos(|h| / 2r)`` of ``arg(h)``; identified pairs sew the free arcs.
    Returns ``None`` when covered arcs overlap (the model stops being a
    faithful picture of the boundary).
    """
    two_pi = 2.0 * math.pi
    arcs = []
    for h in hols:
        ratio = abs(h) / (2.0 * radius)
        if ratio >= 1.0 - 1e-12:
            continue
        half = math.acos(ratio)
        center = cmath.phase(h) % two_pi
        arcs.append((center, half, h))
    if not arcs:
        return 1
    arcs.sort(key=lambda rec: rec[0])
    for (c1, w1, _), (c2, w2, _) in zip(arcs, arcs[1:] + arcs[:1]):
        gap = (c2 - c1) % two_pi
        if gap < w1 + w2 - 1e-12:
            return None
    free_starts = [(c + w) % two_pi for c, w, _ in arcs]   # after arc i
    free_ends = [(c - w) % two_pi for c, w, _ in arcs]     # before arc i
    # free arc i runs from free_starts[i] ccw to free_ends[(i+1) % n]
    n = len(arcs)
    visited = [False] * n
    components = 0
    for start in range(n):
        if visited[start]:
            continue
        components += 1
        i = start
        while not visited[i]:
            visited[i] = True
            nxt = (i + 1) % n
            c, _w, h = arcs[nxt]
            lo = free_ends[nxt]
            landing = cmath.phase(radius * cmath.exp(1j * lo) - h) % two_pi
            i = min(range(n), key=lambda j: abs((free_starts[j] - landing + math.pi) % two_pi - math.pi))
        # walk consumed the cycle through `start`
    return components


def ball_complex(surface: SquareTiledSurface, point: LocatedPoint,
                 radius: float) -> BallComplex:
    """Build the ball's piece complex and topological summary at one radius."""
    if surface.total_area is None:
        raise ValueError("ball complex needs a finite surface")
    displacements = [(h, d) for h, d in
                     _lift_displacements(surface, point, 2.0 * radius)
                     if d <= 2.0 * radius + EPS_GEO]
    classes = {}
    for h, d in displacements:
        classes.setdefault(_class_key(h), []).append((h, d))
    k = len(classes)
    chi = 1 - k
    if k == 0:
        b = 1
    else:
        hols = [h for h, _ in displacements]
        b = _boundary_count(hols, radius)

    pieces = [{"source": "center", "distance": 0.0,
               "star": visible_atlas(surface, point, radius).total_area}]
    # star pieces around cone points within the radius, on the base surface
    cover = UniversalCover(surface, point)
    dmap = dijkstra(cover, cover.base_located, radius)
    seen_base = {}
    for cid, (dist_c, _) in dmap.entries.items():
        base_vid = cover.base_vertex_of(cid)
        if base_vid not in seen_base or dist_c < seen_base[base_vid]:
            seen_base[base_vid] = dist_c
    for base_vid, dist_c in sorted(seen_base.items()):
        if radius - dist_c > EPS_GEO:
            atlas = visible_atlas(surface, surface.locate_cone(base_vid),
                                  radius - dist_c)
            pieces.append({"source": f"cone:{base_vid}", "distance": dist_c,
                           "star": atlas.total_area})
    return BallComplex(center=point, radius=radius, pieces=pieces,
                       identifications=displacements, chi=chi,
                       boundary_components=b)
