"""Shared flat-surface model: charts glued along translation portals.

A surface is a collection of planar charts (complex-coordinate domains)
joined along *portals*: straight boundary pieces identified by a pure
translation at equal arclength.  Crossing a portal side from its left
(relative to the side's direction) emerges on the partner side's right.
Cone points sit where chart incidences close up with total angle
``2*pi*(k+1)``; ``k`` is the order of the singularity.

Concrete surfaces implement :class:`SurfaceProvider`; everything downstream
(tracing, visibility, distances) is written against that contract and never
inspects a provider's internals.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional

from .errors import NoPath
from .geom import EPS_GEO, EPS_TIGHT, TWO_PI, Ray, Segment, Vec2

ChartId = Hashable
ConeId = Hashable


@dataclass(frozen=True)
class PortalSide:
    chart: ChartId
    geometry: Ray | Segment


@dataclass(frozen=True)
class Portal:
    """One gluing between two boundary pieces.

    ``shift`` carries side-a coordinates to side-b coordinates; the two
    crossing directions of a single slit are the two uses of one portal.
    """

    key: Hashable
    side_a: PortalSide
    side_b: PortalSide
    shift: Vec2


@dataclass(frozen=True)
class PortalView:
    """A portal as seen from one of its charts.

    ``side_key`` identifies (portal, side) so a sweep can exclude the side it
    entered through; ``shift`` maps this chart's coordinates to the partner
    chart's.  The partner chart is obtained through ``provider.cross(view)``
    so that lazily built surfaces can materialize it on demand.

    ``interior_side`` records where this chart's content lies relative to the
    side's direction: +1 left, -1 right, 0 when content sits on both sides
    (slit cuts in full planar charts).  Oriented sides are crossed only
    outward, which disambiguates paths touching a boundary point.
    """

    chart: ChartId
    side_key: Hashable
    geometry: Ray | Segment
    shift: Vec2
    interior_side: int = 0


@dataclass(frozen=True)
class Incidence:
    """One chart's wedge at a cone point.

    Directions ``start_dir + t`` for ``t`` in ``[0, span]`` point from
    ``pos`` into the chart; consecutive incidences stitch continuously in the
    cone point's angular frame.
    """

    chart: ChartId
    pos: Vec2
    start_dir: float
    span: float


@dataclass(frozen=True)
class ConePoint:
    id: ConeId
    order: int
    incidences: tuple[Incidence, ...]

    @property
    def total_angle(self) -> float:
        return sum(inc.span for inc in self.incidences)

    def frame_bases(self) -> list[float]:
        bases = []
        acc = 0.0
        for inc in self.incidences:
            bases.append(acc)
            acc += inc.span
        return bases

    def direction_at(self, psi: float) -> tuple[ChartId, Vec2, float]:
        """Chart, apex position and chart direction for frame angle ``psi``."""
        total = self.total_angle
        psi = psi % total
        acc = 0.0
        for inc in self.incidences:
            if psi < acc + inc.span or inc is self.incidences[-1]:
                return inc.chart, inc.pos, inc.start_dir + (psi - acc)
            acc += inc.span
        raise AssertionError("unreachable")

    def sheet_angles_for_direction(self, theta: float) -> list[tuple[float, ChartId, Vec2]]:
        """All frame angles whose outgoing chart direction equals ``theta`` mod 2*pi.

        A cone of total angle ``2*pi*(k+1)`` sees every direction ``k+1``
        times, once per sheet.
        """
        out = []
        acc = 0.0
        for inc in self.incidences:
            t = (theta - inc.start_dir) % TWO_PI
            while t < inc.span + EPS_TIGHT:
                out.append((acc + min(t, inc.span), inc.chart, inc.pos))
                t += TWO_PI
            acc += inc.span
        return out


@dataclass(frozen=True)
class LocatedPoint:
    """A point of the surface: a chart position, or a cone point with a frame.

    Regular points are ``(chart, pos)``.  For a cone point, ``cone`` names it
    and directions are measured in its ``[0, 2*pi*(k+1))`` angular frame;
    ``chart``/``pos`` record its primary incidence.
    """

    chart: ChartId
    pos: Vec2
    cone: Optional[ConeId] = None


class SurfaceProvider(ABC):
    """Capability contract for concrete surfaces.

    Repeated queries with identical arguments return identical answers.  For
    lazily sampled surfaces, :meth:`ensure_viewpoint` either guarantees that
    every geodesic of the given length from the viewpoint stays within
    materialized charts or raises :class:`~slitplane.errors.NeedsExpansion`.
    """

    is_simply_connected: bool = False

    @abstractmethod
    def portals_in(self, chart: ChartId) -> list[PortalView]:
        """All portal sides lying in ``chart``."""

    @abstractmethod
    def cross(self, view: PortalView) -> tuple[ChartId, Hashable]:
        """Partner chart and partner side key of a portal view."""

    @abstractmethod
    def cone_points_in(self, chart: ChartId) -> list[tuple[ConeId, Vec2]]:
        """Cone-point apexes positioned in ``chart``."""

    @abstractmethod
    def cone_point(self, cone_id: ConeId) -> ConePoint:
        ...

    def cone_position(self, cone_id: ConeId) -> tuple[ChartId, Vec2]:
        """A chart and position of the cone point; cheaper than the full
        incidence structure on lazily built surfaces."""
        inc = self.cone_point(cone_id).incidences[0]
        return inc.chart, inc.pos

    @abstractmethod
    def iter_charts(self) -> Iterable[ChartId]:
        ...

    @abstractmethod
    def iter_cone_points(self) -> Iterable[ConeId]:
        ...

    def dev_offset(self, chart: ChartId) -> Vec2:
        """Developed offset of ``chart`` in the surface's base frame.

        Only well defined for simply connected surfaces.
        """
        raise NoPath("surface has no global developing frame")

    def ensure_viewpoint(self, point: LocatedPoint, radius: float) -> None:
        """Guarantee radius-``radius`` queries from ``point`` are in budget."""

    @property
    def total_area(self) -> Optional[float]:
        return None

    def locate_cone(self, cone_id: ConeId) -> LocatedPoint:
        cp = self.cone_point(cone_id)
        inc = cp.incidences[0]
        return LocatedPoint(inc.chart, inc.pos, cone=cone_id)


def develop(surface: SurfaceProvider, frm: ChartId, to: ChartId) -> Vec2:
    """Translation taking ``to``-chart coordinates into ``frm``-developed ones.

    Requires a simply connected surface (a global developing frame); for
    finite surfaces use :func:`develop_along` with an explicit crossing path.
    """
    if not surface.is_simply_connected:
        raise NoPath("develop(frm, to) needs a simply connected surface; "
                     "use develop_along with an explicit portal path")
    return surface.dev_offset(to) - surface.dev_offset(frm)


def develop_along(surface: SurfaceProvider, views: Iterable[PortalView]) -> Vec2:
    """Composite shift of a chain of portal crossings.

    The returned translation carries final-chart coordinates back into the
    first chart's frame.
    """
    acc = 0.0 + 0.0j
    for view in views:
        acc -= view.shift
    return acc


def _geometry_samples(geom) -> list[float]:
    if isinstance(geom, Segment):
        return [0.0, 0.5 * geom.length, geom.length]
    return [0.0, 0.5, 1.0]


def _point_at(geom, t: float) -> Vec2:
    return geom.point(t)


def _near_disk(geom, center: Vec2, radius: float) -> bool:
    if isinstance(geom, Segment):
        ref = min(abs(geom.a - center), abs(geom.b - center))
        return ref <= radius + geom.length
    # ray: closest point to center
    t = max(0.0, (center - geom.apex).real * geom.dir.real
            + (center - geom.apex).imag * geom.dir.imag)
    return abs(geom.point(t) - center) <= radius


def validate(surface: SurfaceProvider, chart: ChartId, center: Vec2 = 0j,
             radius: float = math.inf) -> list[str]:
    """Consistency report for the region of ``chart`` near a disk.

    Checks portal involutions and equal-arclength parametrization, and
    cone-angle closure for cone points in the region.  Returns a list of
    human-readable violations; empty means the region is consistent.
    """
    violations: list[str] = []
    for view in surface.portals_in(chart):
        if not _near_disk(view.geometry, center, radius):
            continue
        other_chart, other_key = surface.cross(view)
        back = None
        for w in surface.portals_in(other_chart):
            if w.side_key == other_key:
                back = w
                break
        if back is None:
            violations.append(f"portal {view.side_key}: partner side missing in {other_chart}")
            continue
        if abs(back.shift + view.shift) > EPS_TIGHT:
            violations.append(
                f"portal {view.side_key}: shifts not involutive "
                f"({view.shift} vs {back.shift})")
        kind_a, kind_b = type(view.geometry), type(back.geometry)
        if kind_a is not kind_b:
            violations.append(f"portal {view.side_key}: side kinds differ")
            continue
        if isinstance(view.geometry, Segment) and \
                abs(view.geometry.length - back.geometry.length) > EPS_TIGHT:
            violations.append(f"portal {view.side_key}: side lengths differ")
            continue
        for t in _geometry_samples(view.geometry):
            expect = _point_at(view.geometry, t) + view.shift
            got = _point_at(back.geometry, t)
            if abs(expect - got) > EPS_TIGHT:
                violations.append(
                    f"portal {view.side_key}: parametrization mismatch at t={t:.3g} "
                    f"({expect} vs {got})")
                break
    for cone_id, pos in surface.cone_points_in(chart):
        if abs(pos - center) > radius:
            continue
        cp = surface.cone_point(cone_id)
        target = TWO_PI * (cp.order + 1)
        if abs(cp.total_angle - target) > EPS_GEO:
            violations.append(
                f"cone {cone_id}: incidence angles sum to {cp.total_angle:.12g}, "
                f"expected {target:.12g}")
    return violations


def vec_to_json(v: Vec2) -> list[float]:
    return [v.real, v.imag]


def vec_from_json(data) -> Vec2:
    return complex(float(data[0]), float(data[1]))
