"""Geodesic engine over any surface provider.

Everything here works against the :class:`~slitplane.flatcomplex.SurfaceProvider`
contract: straight traces across portals, visible-singularity queries,
exact-area visibility atlases built by recursive angular windows, and
shortest-path distances through the cone-point visibility graph.

Straightness is preserved across portals because gluings are translations;
a trace is therefore a single developed segment, and visibility of a
candidate point reduces to tracing toward its developed position.
"""

from __future__ import annotations

import cmath
import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import DegenerateGeometry, DepthExceeded
from .flatcomplex import (ConeId, LocatedPoint, PortalView, SurfaceProvider,
                          develop)
from .geom import (EPS_GEO, EPS_TIGHT, TWO_PI, Ray, Segment, Vec2, cross,
                   dot, foot_parameters, line_crossing_radius,
                   sector_triangle_area, unwrap_angle)

log = logging.getLogger(__name__)

MAX_TRACE_LEGS = 100_000
ATLAS_DEPTH_CAP = 64
MIN_CELL_WIDTH = 1e-12

# ---------------------------------------------------------------------------
# Tracing


@dataclass(frozen=True)
class ReachedLength:
    pass


@dataclass(frozen=True)
class HitConePoint:
    cone: ConeId
    length: float


@dataclass(frozen=True)
class DegenerateStop:
    reason: str


@dataclass
class Trace:
    """Itinerary of a straight unit-speed path across charts."""

    legs: list[tuple[object, Segment]]
    terminal: ReachedLength | HitConePoint | DegenerateStop
    length: float
    end: Optional[LocatedPoint] = None

    @property
    def hit_cone(self) -> Optional[ConeId]:
        return self.terminal.cone if isinstance(self.terminal, HitConePoint) else None


def _resolve_start(surface: SurfaceProvider, start: LocatedPoint, theta: float):
    """Chart, position and unit direction for a trace start.

    For a cone-point start, ``theta`` is interpreted in the cone's
    ``[0, 2*pi*(k+1))`` frame.
    """
    if start.cone is not None:
        cp = surface.cone_point(start.cone)
        chart, pos, chart_dir = cp.direction_at(theta)
        return chart, pos, cmath.exp(1j * chart_dir)
    return start.chart, start.pos, cmath.exp(1j * theta)


def trace(surface: SurfaceProvider, start: LocatedPoint, theta: float,
          length: float) -> Trace:
    """Trace the straight unit-speed path of the given length.

    Portals apply their translation and preserve the direction.  Passing
    within ``EPS_GEO`` of a cone point terminates with
    :class:`HitConePoint`; running along a slit cut keeps the current
    chart's bank.  Collapses to :class:`DegenerateStop` only when the start
    itself sits on a cut.
    """
    if length < 0:
        raise ValueError("trace length must be >= 0")
    surface.ensure_viewpoint(start, length)
    chart, pos, direction = _resolve_start(surface, start, theta)
    legs: list[tuple[object, Segment]] = []
    remaining = length
    consumed = 0.0
    last_side_key = None

    for _ in range(MAX_TRACE_LEGS):
        best_cone = None
        for cid, apex in surface.cone_points_in(chart):
            h = apex - pos
            t = dot(h, direction)
            if t <= EPS_GEO or t > remaining + EPS_GEO:
                continue
            if abs(h - t * direction) <= EPS_GEO:
                if best_cone is None or t < best_cone[0]:
                    best_cone = (t, cid, apex)
        best = None  # (t, payload)
        for view in surface.portals_in(chart):
            if view.side_key == last_side_key:
                continue
            geom = view.geometry
            if isinstance(geom, Segment):
                side_apex, side_dir, side_len = geom.a, geom.dir, geom.length
            else:
                side_apex, side_dir, side_len = geom.apex, geom.dir, math.inf
            denom = cross(direction, side_dir)
            if abs(denom) <= EPS_TIGHT:
                # Parallel. If we are on the side's line we ride along the
                # cut in the current chart; endpoint cone points still block
                # through the apex events above.
                continue
            if view.interior_side:
                # Oriented sides are only crossed outward; this keeps paths
                # that merely touch a boundary point from tunneling sideways.
                if view.interior_side * denom <= 0:
                    continue
                t_min = -EPS_GEO
            else:
                t_min = EPS_GEO
            w = side_apex - pos
            t = cross(w, side_dir) / denom
            s = cross(w, direction) / denom
            if t < t_min or t > remaining + EPS_GEO:
                continue
            if s < -EPS_GEO or s > side_len + EPS_GEO:
                continue
            if best is None or t < best[0]:
                best = (t, view, s)

        # A cone point on the path terminates the trace; it outranks portal
        # crossings within tolerance because a crossing at a slit apex is the
        # same surface point seen from the other chart.
        if best_cone is not None and (best is None or best_cone[0] <= best[0] + EPS_GEO):
            t, cid, apex = best_cone
            if abs(apex - pos) > EPS_TIGHT:
                legs.append((chart, Segment(pos, apex)))
            consumed += t
            return Trace(legs, HitConePoint(cid, consumed), consumed,
                         end=surface.locate_cone(cid))

        if best is None or best[0] > remaining + EPS_GEO:
            end_pos = pos + remaining * direction
            if remaining > EPS_TIGHT:
                legs.append((chart, Segment(pos, end_pos)))
            return Trace(legs, ReachedLength(), length,
                         end=LocatedPoint(chart, end_pos))

        t, view, s = best
        geom = view.geometry
        s = min(max(s, 0.0), geom.length if isinstance(geom, Segment) else s)
        crossing = geom.point(s)
        if abs(crossing - pos) > EPS_TIGHT:
            legs.append((chart, Segment(pos, crossing)))
        step = max(t, 0.0)
        remaining -= step
        consumed += step
        chart, last_side_key = surface.cross(view)
        pos = crossing + view.shift
    raise DegenerateGeometry("trace exceeded leg cap; runaway portal chain")


# ---------------------------------------------------------------------------
# Visible singularities


@dataclass(frozen=True)
class VisibleSingularity:
    cone: ConeId
    holonomy: Vec2
    distance: float


def _view_dev(surface: SurfaceProvider, point: LocatedPoint) -> Vec2:
    return surface.dev_offset(point.chart) + point.pos


def _canon(surface: SurfaceProvider, cone_id: ConeId) -> ConeId:
    """Canonical cone id; providers that merge identities expose the hook."""
    resolve = getattr(surface, "canonical_cone", None)
    return cone_id if resolve is None else resolve(cone_id)


def visible_singularities(surface: SurfaceProvider, point: LocatedPoint,
                          radius: float) -> list[VisibleSingularity]:
    """Cone points reachable by a straight trace of length <= ``radius``.

    Candidates are enumerated from the truncation by developed distance and
    confirmed by tracing toward their exact developed direction; the
    holonomy of the confirming geodesic equals the developed displacement
    and its length is the distance.
    """
    if not surface.is_simply_connected:
        raise DegenerateGeometry(
            "visible_singularities needs a global developing frame; "
            "wrap compact surfaces in their universal cover")
    surface.ensure_viewpoint(point, radius)
    if getattr(surface, "lazy_discovery", False):
        visible_atlas(surface, point, radius)  # materializes every reachable chart
    origin = _view_dev(surface, point)
    candidates = []
    for cid in surface.iter_cone_points():
        if point.cone is not None and cid == point.cone:
            continue
        chart, pos = surface.cone_position(cid)
        hol = surface.dev_offset(chart) + pos - origin
        dist = abs(hol)
        if EPS_GEO < dist <= radius + EPS_GEO:
            candidates.append((dist, cid, hol))
    candidates.sort(key=lambda rec: (rec[0], str(rec[1])))

    out = []
    seen = set()
    for dist, cid, hol in candidates:
        if _confirm_visible(surface, point, cid, hol, dist):
            canonical = _canon(surface, cid)
            if canonical in seen:
                continue
            seen.add(canonical)
            out.append(VisibleSingularity(cone=canonical, holonomy=hol, distance=dist))
    return out


def _confirm_visible(surface, point, cid, hol, dist) -> bool:
    theta = cmath.phase(hol)
    if point.cone is None:
        starts = [theta]
    else:
        cp = surface.cone_point(point.cone)
        starts = [psi for psi, _, _ in cp.sheet_angles_for_direction(theta)]
    for psi in starts:
        try:
            tr = trace(surface, point, psi, dist + 1e-7)
        except DegenerateGeometry as exc:
            log.warning("degenerate trace while confirming %s: %s", cid, exc)
            continue
        if isinstance(tr.terminal, HitConePoint) \
                and _canon(surface, tr.terminal.cone) == _canon(surface, cid) \
                and abs(tr.terminal.length - dist) <= 1e-6:
            return True
    return False


# ---------------------------------------------------------------------------
# Visibility atlas: recursive angular windows with closed-form areas


@dataclass(frozen=True)
class AtlasCell:
    """One angular cell of the atlas.

    Coordinates are developed: the viewpoint sits at the origin and chart
    content ``q`` appears at ``q + dev``.  ``inner``/``outer`` bound the
    radial extent; lines are encoded by perpendicular foot ``(d, phi)`` so
    the crossing radius along direction ``theta`` is ``d / cos(theta-phi)``.
    """

    chart: object
    dev: Vec2
    psi: tuple[float, float]
    theta: tuple[float, float]
    inner: Optional[tuple[float, float]]
    outer: tuple  # ("arc", R) or ("line", d, phi)
    area: float

    def radial_bounds(self, theta: float) -> tuple[float, float]:
        r_in = 0.0 if self.inner is None else line_crossing_radius(*self.inner, theta)
        if self.outer[0] == "arc":
            r_out = self.outer[1]
        else:
            r_out = line_crossing_radius(self.outer[1], self.outer[2], theta)
        return r_in, r_out


@dataclass
class VisibleAtlas:
    viewpoint: LocatedPoint
    radius: float
    total_angle: float
    cells: list[AtlasCell]
    area_error_bound: float = 0.0

    @property
    def total_area(self) -> float:
        return sum(c.area for c in self.cells)

    def expected_area(self) -> float:
        return 0.5 * self.total_angle * self.radius * self.radius

    def cells_in_chart(self, chart) -> list[AtlasCell]:
        return [c for c in self.cells if c.chart == chart]

    def contains(self, chart, pos: Vec2) -> int:
        """Multiplicity of the surface point among the atlas cells."""
        count = 0
        for cell in self.cells:
            if cell.chart != chart:
                continue
            z = pos + cell.dev
            r = abs(z)
            if r <= EPS_TIGHT:
                continue
            theta = unwrap_angle(cmath.phase(z), cell.theta[0])
            if theta > cell.theta[1]:
                continue
            r_in, r_out = cell.radial_bounds(theta)
            if r_in < r <= r_out:
                count += 1
        return count


@dataclass
class _Window:
    chart: object
    dev: Vec2
    th_lo: float
    th_hi: float
    psi_lo: float
    entry_key: object
    entry_line: Optional[tuple[float, float]]
    depth: int


@dataclass
class _Obstruction:
    view: PortalView
    d: float
    phi: float
    apex: Vec2
    side_dir: Vec2
    side_len: float

    def crossing(self, theta: float) -> tuple[float, float]:
        """(radius, side parameter) of the origin ray at direction ``theta``."""
        r = line_crossing_radius(self.d, self.phi, theta)
        if not math.isfinite(r):
            return math.inf, math.nan
        p = r * cmath.exp(1j * theta)
        s = dot(p - self.apex, self.side_dir)
        return r, s


def _initial_windows(surface, point: LocatedPoint) -> tuple[list[_Window], float]:
    if point.cone is None:
        win = _Window(chart=point.chart, dev=-point.pos, th_lo=0.0, th_hi=TWO_PI,
                      psi_lo=0.0, entry_key=None, entry_line=None, depth=0)
        return [win], TWO_PI
    cp = surface.cone_point(point.cone)
    windows = []
    base = 0.0
    for inc in cp.incidences:
        windows.append(_Window(chart=inc.chart, dev=-inc.pos, th_lo=inc.start_dir,
                               th_hi=inc.start_dir + inc.span, psi_lo=base,
                               entry_key=None, entry_line=None, depth=0))
        base += inc.span
    return windows, cp.total_angle


def visible_atlas(surface: SurfaceProvider, point: LocatedPoint,
                  radius: float) -> VisibleAtlas:
    """Exact star-shaped visibility atlas around ``point`` out to ``radius``.

    Each sheet's full angular window is recursively split at developed
    slit-apex directions, side-endpoint directions and radius crossings;
    within a cell the nearest portal side is constant, its crossing opens a
    child window in the partner chart, and areas come from closed forms
    (triangles against line bounds, circular sectors against the arius arc).

    The telescoping of entry/exit bounds makes the total area equal
    ``(total angle / 2) * radius^2`` up to dropped slivers, which is the
    disk-tiling identity the gluing construction must satisfy.
    """
    if radius <= 0:
        raise ValueError("atlas radius must be positive")
    surface.ensure_viewpoint(point, radius)
    windows, total_angle = _initial_windows(surface, point)
    cells: list[AtlasCell] = []
    err = 0.0
    stack = list(windows)
    while stack:
        win = stack.pop()
        if win.depth > ATLAS_DEPTH_CAP:
            raise DepthExceeded(f"atlas recursion deeper than {ATLAS_DEPTH_CAP}")
        err += _sweep_window(surface, win, radius, cells, stack)
    return VisibleAtlas(viewpoint=point, radius=radius, total_angle=total_angle,
                        cells=cells, area_error_bound=err)


def _sweep_window(surface, win: _Window, radius: float,
                  cells: list[AtlasCell], stack: list[_Window]) -> float:
    obstructions: list[_Obstruction] = []
    criticals: list[float] = []

    def note(angle: float) -> None:
        a = unwrap_angle(angle, win.th_lo)
        if win.th_lo < a < win.th_hi:
            criticals.append(a)
        # windows are at most 2*pi wide, so one extra turn cannot re-enter

    for view in surface.portals_in(win.chart):
        if view.side_key == win.entry_key:
            continue
        geom = view.geometry
        if isinstance(geom, Segment):
            apex, side_dir, side_len = geom.a + win.dev, geom.dir, geom.length
            endpoints = [apex, geom.b + win.dev]
        else:
            apex, side_dir, side_len = geom.apex + win.dev, geom.dir, math.inf
            endpoints = [apex]
        d, phi = foot_parameters(apex, side_dir)
        if d <= EPS_GEO:
            # Side line passes through the viewpoint: measure-zero angular
            # footprint.  Legitimate when the side emanates from the
            # viewpoint (cone sheets, chart-origin viewpoints); fatal when
            # the viewpoint lies on the open cut.
            s_origin = dot(-apex, side_dir)
            if abs(apex) > EPS_GEO and EPS_GEO < s_origin < side_len - EPS_GEO:
                raise DegenerateGeometry("viewpoint sits on a portal side")
            for e in endpoints:
                if abs(e) > EPS_GEO:
                    note(cmath.phase(e))
            if not isinstance(geom, Segment):
                note(cmath.phase(side_dir))
            continue
        obstructions.append(_Obstruction(view=view, d=d, phi=phi, apex=apex,
                                         side_dir=side_dir, side_len=side_len))
        for e in endpoints:
            note(cmath.phase(e))
        if not isinstance(geom, Segment):
            note(cmath.phase(side_dir))
        if d < radius:
            half = math.acos(min(d / radius, 1.0))
            note(phi - half)
            note(phi + half)

    criticals.append(win.th_lo)
    criticals.append(win.th_hi)
    criticals.sort()

    err = 0.0
    for t1, t2 in zip(criticals, criticals[1:]):
        width = t2 - t1
        if width <= 0:
            continue
        if width < MIN_CELL_WIDTH:
            err += 0.5 * radius * radius * width
            continue
        tm = 0.5 * (t1 + t2)
        if win.entry_line is None:
            r_in = 0.0
        else:
            r_in = line_crossing_radius(*win.entry_line, tm)
            if r_in >= radius - EPS_TIGHT:
                continue
        best: Optional[tuple[float, _Obstruction]] = None
        for ob in obstructions:
            r, s = ob.crossing(tm)
            if not math.isfinite(r) or r > radius + EPS_TIGHT:
                continue
            if s < -EPS_GEO or s > ob.side_len + EPS_GEO:
                continue
            if r <= r_in + EPS_TIGHT:
                continue
            if best is None or r < best[0]:
                best = (r, ob)

        inner = win.entry_line
        inner_area = 0.0 if inner is None else sector_triangle_area(inner[0], inner[1], t1, t2)
        if best is None:
            outer = ("arc", radius)
            outer_area = 0.5 * radius * radius * width
        else:
            ob = best[1]
            outer = ("line", ob.d, ob.phi)
            outer_area = sector_triangle_area(ob.d, ob.phi, t1, t2)
        area = outer_area - inner_area
        if area < -1e-9:
            raise DegenerateGeometry(f"negative cell area {area}")
        psi1 = win.psi_lo + (t1 - win.th_lo)
        cells.append(AtlasCell(chart=win.chart, dev=win.dev, psi=(psi1, psi1 + width),
                               theta=(t1, t2), inner=inner, outer=outer,
                               area=max(area, 0.0)))
        if best is not None:
            ob = best[1]
            other_chart, other_key = surface.cross(ob.view)
            stack.append(_Window(chart=other_chart, dev=win.dev - ob.view.shift,
                                 th_lo=t1, th_hi=t2, psi_lo=psi1,
                                 entry_key=other_key, entry_line=(ob.d, ob.phi),
                                 depth=win.depth + 1))
    return err


def atlas_sample_points(atlas: VisibleAtlas, n_points: int, seed: int = 0):
    """Deterministic low-discrepancy samples across the atlas cells.

    Yields ``(cell, chart, pos, weight)`` where ``weight`` integrates to the
    cell area: sampling is uniform in angle and uniform in squared radius
    between the cell's radial bounds.
    """
    from scipy.stats import qmc

    total = atlas.total_area
    if total <= 0:
        return
    engine = qmc.Halton(d=2, seed=seed)
    counts = []
    for cell in atlas.cells:
        counts.append(max(4, int(round(n_points * cell.area / total))))
    for cell, m in zip(atlas.cells, counts):
        u = engine.random(m)
        t1, t2 = cell.theta
        for u1, u2 in u:
            theta = t1 + u1 * (t2 - t1)
            r_in, r_out = cell.radial_bounds(theta)
            if r_out <= r_in:
                continue
            r = math.sqrt(r_in * r_in + u2 * (r_out * r_out - r_in * r_in))
            z = r * cmath.exp(1j * theta)
            pos = z - cell.dev
            weight = 0.5 * (r_out * r_out - r_in * r_in) * (t2 - t1) / m
            yield cell, cell.chart, pos, weight


# ---------------------------------------------------------------------------
# Distances through the cone-point graph


@dataclass
class DistanceMap:
    """Shortest distances from a source through chains bending at cone points."""

    source: LocatedPoint
    budget: float
    entries: dict   # cone id -> (distance, predecessor cone id or None)

    def distance_to(self, cone: ConeId) -> Optional[float]:
        rec = self.entries.get(cone)
        return None if rec is None else rec[0]


def dijkstra(surface: SurfaceProvider, source: LocatedPoint,
             budget: float) -> DistanceMap:
    """Shortest paths from ``source`` to every cone point within ``budget``.

    Nodes are the source plus cone points; edges are straight visible legs.
    Valid on flat surfaces because geodesics are straight away from cone
    points.
    """
    entries: dict = {}
    heap: list = []
    counter = 0
    for vs in visible_singularities(surface, source, budget):
        heapq.heappush(heap, (vs.distance, counter, vs.cone, None))
        counter += 1
    while heap:
        dist, _, cone, pred = heapq.heappop(heap)
        cone = _canon(surface, cone)
        if cone in entries:
            continue
        entries[cone] = (dist, pred)
        rest = budget - dist
        if rest <= EPS_GEO:
            continue
        for vs in visible_singularities(surface, surface.locate_cone(cone), rest):
            if vs.cone in entries:
                continue
            heapq.heappush(heap, (dist + vs.distance, counter, vs.cone, cone))
            counter += 1
    return DistanceMap(source=source, budget=budget, entries=entries)


def _points_coincide(surface, p: LocatedPoint, q: LocatedPoint) -> bool:
    if p.cone is not None or q.cone is not None:
        return p.cone == q.cone and p.cone is not None
    return p.chart == q.chart and abs(p.pos - q.pos) <= EPS_GEO


def _visible_leg(surface, frm: LocatedPoint, to: LocatedPoint) -> Optional[float]:
    """Length of the straight visible geodesic between two points, if any."""
    hol = _view_dev(surface, to) - _view_dev(surface, frm)
    dist = abs(hol)
    if dist <= EPS_GEO:
        return None
    if to.cone is not None:
        return dist if _confirm_visible(surface, frm, to.cone, hol, dist) else None
    theta = cmath.phase(hol)
    if frm.cone is None:
        starts = [theta]
    else:
        cp = surface.cone_point(frm.cone)
        starts = [psi for psi, _, _ in cp.sheet_angles_for_direction(theta)]
    for psi in starts:
        try:
            tr = trace(surface, frm, psi, dist)
        except DegenerateGeometry:
            continue
        if isinstance(tr.terminal, ReachedLength) and tr.end is not None \
                and tr.end.chart == to.chart and abs(tr.end.pos - to.pos) <= EPS_GEO:
            return dist
    return None


def distance(surface: SurfaceProvider, p: LocatedPoint, q: LocatedPoint,
             budget: float, dmap: Optional[DistanceMap] = None) -> Optional[float]:
    """Shortest-path distance if it is <= ``budget``, else ``None``.

    Minimum of the direct visible leg and chains bending at cone points
    (Dijkstra over the visibility graph plus one final visible hop).
    """
    if _points_coincide(surface, p, q):
        return 0.0
    best = math.inf
    direct_hol = _view_dev(surface, q) - _view_dev(surface, p)
    if abs(direct_hol) <= budget + EPS_GEO:
        leg = _visible_leg(surface, p, q)
        if leg is not None:
            best = leg
    if dmap is None:
        dmap = dijkstra(surface, p, budget)
    for cone, (dist_c, _) in sorted(dmap.entries.items(), key=lambda kv: kv[1][0]):
        if dist_c >= best:
            break
        if q.cone is not None and cone == q.cone:
            best = min(best, dist_c)
            continue
        lower = abs(_view_dev(surface, q) - _view_dev(surface, surface.locate_cone(cone)))
        if dist_c + lower >= best or dist_c + lower > budget + EPS_GEO:
            continue
        leg = _visible_leg(surface, surface.locate_cone(cone), q)
        if leg is not None:
            best = min(best, dist_c + leg)
    return best if best <= budget + EPS_GEO else None


def metric_ball_singularities(surface: SurfaceProvider, point: LocatedPoint,
                              radius: float) -> list[tuple[ConeId, float]]:
    """All cone points at metric distance <= ``radius``; superset of the
    visible ones restricted to that distance."""
    dmap = dijkstra(surface, point, radius)
    out = [(cone, rec[0]) for cone, rec in dmap.entries.items()]
    out.sort(key=lambda kv: (kv[1], str(kv[0])))
    return out


# ---------------------------------------------------------------------------
# Ball area by quasi-Monte Carlo union sampling


def ball_area(surface: SurfaceProvider, point: LocatedPoint, radius: float,
              n_points: int = 100_000, seed: int = 0) -> tuple[float, float]:
    """Area of the metric ball with a standard error estimate.

    The ball is the union of visible stars around the point and every cone
    point within ``radius``; overlaps are resolved by membership-weighted
    quasi-Monte Carlo sampling since the union is not disjoint.
    """
    sources: list[tuple[LocatedPoint, float]] = [(point, radius)]
    for cone, dist_c in metric_ball_singularities(surface, point, radius):
        if radius - dist_c > EPS_GEO:
            sources.append((surface.locate_cone(cone), radius - dist_c))
    atlases = [visible_atlas(surface, src, rad) for src, rad in sources]

    estimate = 0.0
    var_acc = 0.0
    for i, atlas in enumerate(atlases):
        values = []
        weights = []
        for _, chart, pos, weight in atlas_sample_points(atlas, n_points, seed=seed + i):
            mult = 0
            for other in atlases:
                mult += other.contains(chart, pos)
            values.append(0.0 if mult == 0 else 1.0 / mult)
            weights.append(weight)
        if not values:
            continue
        total_w = sum(weights)
        mean = sum(v * w for v, w in zip(values, weights)) / total_w
        estimate += atlas.total_area * mean
        m = len(values)
        if m > 1:
            mu = mean
            var = sum(w * (v - mu) ** 2 for v, w in zip(values, weights)) / total_w
            var_acc += (atlas.total_area ** 2) * var / m
    return estimate, math.sqrt(var_acc)
