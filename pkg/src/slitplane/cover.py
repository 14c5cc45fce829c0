"""Lazy universal cover of a square-tiled surface.

Charts are developed copies of the base squares, created on demand when a
trace or visibility sweep crosses an edge.  Lifted vertices keep their
incident wedges in counterclockwise order; when a fan accumulates its full
``2*pi*(k+1)`` of angle it closes by gluing its two end charts, which is
the only source of identifications (everything else is tree-like).  The
result is a simply connected provider, so the generic explorer machinery
gives exact covering-space distances; in particular the injectivity radius
at a base point is half the smallest displacement of a deck translate of
its lift.
"""

from __future__ import annotations

import math
from typing import Optional

from .errors import BudgetOverflow
from .flatcomplex import (ConePoint, Incidence, LocatedPoint, PortalView,
                          SurfaceProvider)
from .geom import Segment, Vec2
from .origami import SquareTiledSurface, _corner_pos

# Edges 0=R, 1=T, 2=L, 3=B; opposite edge is (e+2) % 4.
# Corner pairs (this chart corner, partner chart corner) sharing each edge.
_EDGE_CORNERS = {
    0: ((1, 0), (2, 3)),
    2: ((0, 1), (3, 2)),
    1: ((3, 0), (2, 1)),
    3: ((0, 3), (1, 2)),
}
# Crossing edge _CCW_EDGE[c] from the wedge at corner c reaches the wedge
# that is counterclockwise-next around the vertex.
_CCW_EDGE = {0: 2, 1: 3, 2: 0, 3: 1}

DEFAULT_CHART_CAP = 200_000


class _Chart:
    __slots__ = ("id", "square", "dev", "edges", "corners")

    def __init__(self, cid: int, square: int, dev: Vec2):
        self.id = cid
        self.square = square
        self.dev = dev
        self.edges: list[Optional[int]] = [None, None, None, None]
        self.corners: list[Optional["_LiftedVertex"]] = [None, None, None, None]


class _LiftedVertex:
    __slots__ = ("id", "base_vertex", "total_wedges", "fan", "closed")

    def __init__(self, vid: int, base_vertex: int, total_wedges: int):
        self.id = vid
        self.base_vertex = base_vertex
        self.total_wedges = total_wedges
        self.fan: list[tuple[int, int]] = []   # (chart id, corner), ccw order
        self.closed = False


class UniversalCover(SurfaceProvider):
    """Simply connected unfolding of a square-tiled surface around a point."""

    is_simply_connected = True
    lazy_discovery = True

    def __init__(self, base: SquareTiledSurface, point: LocatedPoint,
                 chart_cap: int = DEFAULT_CHART_CAP):
        self.base = base
        self.chart_cap = chart_cap
        self._charts: dict[int, _Chart] = {}
        # id -> surviving vertex object; merged ids stay resolvable
        self._lookup: dict[int, _LiftedVertex] = {}
        self._next_chart = 0
        self._next_vertex = 0

        if point.cone is not None:
            inc = self.base.cone_point(point.cone).incidences[0]
            root = self._new_chart(inc.chart, 0j)
            corner = int(round(inc.start_dir / (math.pi / 2.0))) % 4
            lv = root.corners[corner]
            self._close_fan(lv)
            lv = self._lookup[lv.id]
            self.base_located = LocatedPoint(root.id, inc.pos, cone=lv.id)
        else:
            root = self._new_chart(point.chart, 0j)
            self.base_located = LocatedPoint(root.id, point.pos)
        self.root_chart = root.id

    # -- construction --------------------------------------------------------

    def _new_chart(self, square: int, dev: Vec2) -> _Chart:
        if self._next_chart >= self.chart_cap:
            raise BudgetOverflow(f"universal cover exceeded {self.chart_cap} charts")
        chart = _Chart(self._next_chart, square, dev)
        self._charts[chart.id] = chart
        self._next_chart += 1
        for c in range(4):
            base_vid = self.base.vertex_of[(square, c)]
            lv = _LiftedVertex(self._next_vertex, base_vid,
                               len(self.base.vertices[base_vid]))
            self._lookup[lv.id] = lv
            self._next_vertex += 1
            lv.fan.append((chart.id, c))
            chart.corners[c] = lv
        return chart

    def _base_neighbor(self, square: int, e: int) -> int:
        if e == 0:
            return self.base.h(square)
        if e == 1:
            return self.base.v(square)
        if e == 2:
            return self.base._h_inv(square)
        return self.base._v_inv(square)

    def _edge_offset(self, e: int) -> Vec2:
        s = self.base.scale
        return (complex(s, 0), complex(0, s), complex(-s, 0), complex(0, -s))[e]

    def _resolve(self, chart_id: int, e: int) -> int:
        chart = self._charts[chart_id]
        if chart.edges[e] is not None:
            return chart.edges[e]
        other = self._new_chart(self._base_neighbor(chart.square, e),
                                chart.dev + self._edge_offset(e))
        self._link(chart, e, other)
        return other.id

    def _link(self, chart: _Chart, e: int, other: _Chart) -> None:
        """Glue ``other`` across edge ``e`` of ``chart`` and stitch vertex fans."""
        chart.edges[e] = other.id
        other.edges[(e + 2) % 4] = chart.id
        for c_this, c_other in _EDGE_CORNERS[e]:
            if e == _CCW_EDGE[c_this]:
                self._attach_wedges((chart.id, c_this), (other.id, c_other))
            else:
                self._attach_wedges((other.id, c_other), (chart.id, c_this))

    def _attach_wedges(self, wedge_a: tuple[int, int], wedge_b: tuple[int, int]) -> None:
        """Record that ``wedge_b`` is counterclockwise-next of ``wedge_a``."""
        lv_a = self._charts[wedge_a[0]].corners[wedge_a[1]]
        lv_b = self._charts[wedge_b[0]].corners[wedge_b[1]]
        if lv_a is lv_b:
            if lv_a.closed:
                return
            idx = lv_a.fan.index(wedge_a)
            if lv_a.fan[(idx + 1) % len(lv_a.fan)] == wedge_b and idx + 1 < len(lv_a.fan):
                return  # adjacency already recorded
            if lv_a.fan[-1] == wedge_a and lv_a.fan[0] == wedge_b:
                if len(lv_a.fan) != lv_a.total_wedges:
                    raise AssertionError("fan closed with wrong wedge count")
                lv_a.closed = True
                return
            raise AssertionError("inconsistent fan closure")
        if lv_a.fan[-1] != wedge_a or lv_b.fan[0] != wedge_b:
            raise AssertionError("fans cannot be concatenated in ccw order")
        survivor, absorbed = (lv_a, lv_b) if lv_a.id <= lv_b.id else (lv_b, lv_a)
        fan = lv_a.fan + lv_b.fan
        survivor.fan = fan
        for cid, c in fan:
            self._charts[cid].corners[c] = survivor
        for alias, lv in list(self._lookup.items()):
            if lv is absorbed:
                self._lookup[alias] = survivor
        if len(fan) >= survivor.total_wedges:
            if len(fan) > survivor.total_wedges:
                raise AssertionError("fan overfull")
            self._close_ends(survivor)

    def _close_ends(self, lv: _LiftedVertex) -> None:
        """Glue the first and last charts of a complete fan along their shared edge."""
        chart_c, corner_c = lv.fan[-1]
        chart_d, corner_d = lv.fan[0]
        e = _CCW_EDGE[corner_c]
        c_chart = self._charts[chart_c]
        d_chart = self._charts[chart_d]
        if c_chart.edges[e] is not None:
            if c_chart.edges[e] != chart_d:
                raise AssertionError("fan closure contradicts existing gluing")
            lv.closed = True
            return
        if self._base_neighbor(c_chart.square, e) != d_chart.square:
            raise AssertionError("fan closure violates base gluing")
        if abs(c_chart.dev + self._edge_offset(e) - d_chart.dev) > \
                1e-6 * max(1.0, self.base.scale):
            raise AssertionError("fan closure violates developed offsets")
        lv.closed = True
        self._link(c_chart, e, d_chart)

    def _close_fan(self, lv: _LiftedVertex) -> None:
        """Materialize wedges around ``lv`` until its fan closes."""
        while True:
            lv = self._lookup[lv.id]
            if lv.closed:
                return
            chart_id, corner = lv.fan[-1]
            self._resolve(chart_id, _CCW_EDGE[corner])

    # -- provider --------------------------------------------------------------

    def iter_charts(self):
        return iter(list(self._charts.keys()))

    def iter_cone_points(self):
        seen = set()
        out = []
        for lv in list(self._lookup.values()):
            if lv.id in seen:
                continue
            seen.add(lv.id)
            if self.base.vertex_order[lv.base_vertex] >= 1:
                out.append(lv.id)
        return out

    def dev_offset(self, chart) -> Vec2:
        return self._charts[chart].dev

    def portals_in(self, chart) -> list[PortalView]:
        s = self.base.scale
        return [
            PortalView(chart=chart, side_key=(chart, 0), shift=complex(-s, 0),
                       geometry=Segment(complex(s, 0), complex(s, s)), interior_side=1),
            PortalView(chart=chart, side_key=(chart, 1), shift=complex(0, -s),
                       geometry=Segment(complex(0, s), complex(s, s)), interior_side=-1),
            PortalView(chart=chart, side_key=(chart, 2), shift=complex(s, 0),
                       geometry=Segment(0j, complex(0, s)), interior_side=-1),
            PortalView(chart=chart, side_key=(chart, 3), shift=complex(0, s),
                       geometry=Segment(0j, complex(s, 0)), interior_side=1),
        ]

    def cross(self, view: PortalView):
        chart_id, e = view.side_key
        other = self._resolve(chart_id, e)
        return other, (other, (e + 2) % 4)

    def cone_points_in(self, chart):
        out = []
        ch = self._charts[chart]
        for c in range(4):
            lv = ch.corners[c]
            if self.base.vertex_order[lv.base_vertex] >= 1:
                out.append((lv.id, _corner_pos(c, self.base.scale)))
        return out

    def cone_point(self, cone_id) -> ConePoint:
        lv = self._lookup[cone_id]
        if not lv.closed:
            self._close_fan(lv)
            lv = self._lookup[cone_id]
        incidences = tuple(
            Incidence(chart=cid, pos=_corner_pos(c, self.base.scale),
                      start_dir=c * math.pi / 2.0, span=math.pi / 2.0)
            for cid, c in lv.fan)
        return ConePoint(id=lv.id, order=self.base.vertex_order[lv.base_vertex],
                         incidences=incidences)

    def cone_position(self, cone_id):
        cid, c = self._lookup[cone_id].fan[0]
        return cid, _corner_pos(c, self.base.scale)

    def canonical_cone(self, cone_id):
        return self._lookup[cone_id].id

    def base_vertex_of(self, cone_id) -> int:
        return self._lookup[cone_id].base_vertex

    def lifts_of_regular(self, point: LocatedPoint) -> list[LocatedPoint]:
        """Materialized lifts of a regular base point, root lift excluded."""
        out = []
        for chart in self._charts.values():
            if chart.square == point.chart and chart.id != self.root_chart:
                out.append(LocatedPoint(chart.id, point.pos))
        return out
