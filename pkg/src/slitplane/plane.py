"""Lazily sampled Poisson translation planes.

The surface is a tree of full planar charts.  Each chart carries a Poisson
point sample; every sampled point ``x`` opens a slit along the outward radial
ray from ``x`` and glues a fresh plane, cut along the matching ray from its
origin, across the slit by the translation ``z -> z - x``.  The slit apex
pair is a cone point of total angle ``4*pi`` (order one), and the child
chart's origin sits on it.

Sampling is deterministic: chart ``(i1, .., id)`` draws from a counter-based
stream keyed by ``(seed, path)``, and points are generated in increasing
radius (squared radii are a unit-rate Poisson process after scaling by
``intensity * pi``).  A budget therefore acts as a pure cutoff into a fixed
infinite sequence, which makes enlarging budgets reproduce the original
sample exactly.

The root budget ``R`` is sound for all metric queries of radius ``R`` from
the basepoint: along any unit-speed path the quantity (sum of spawn-point
norms down the chart path) + (norm in the current chart) changes by at most
arclength and is continuous across portals, because every slit is radially
aligned with its chart's origin.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import BudgetOverflow, NeedsExpansion
from .flatcomplex import (ConePoint, Incidence, LocatedPoint, PortalView,
                          SurfaceProvider, vec_from_json, vec_to_json)
from .geom import EPS_GEO, Ray, Vec2, unit
from .rngstream import Stream

log = logging.getLogger(__name__)

DEFAULT_NODE_CAP = 1_000_000
PLANTED_INDEX = -1
_MAX_ANGLE_REDRAWS = 128


def _dist_to_radial_slit(p: Vec2, x: Vec2) -> float:
    """Distance from ``p`` to the slit ray ``{t * x/|x| : t >= |x|}``."""
    xhat = x / abs(x)
    t = (p - x).real * xhat.real + (p - x).imag * xhat.imag
    if t <= 0.0:
        return abs(p - x)
    return abs(p - (x + t * xhat))


def _degeneracy(candidate: Vec2, theta: float, accepted: list[tuple[Vec2, float]]) -> Optional[str]:
    """Name of the measure-zero event ``candidate`` falls into, if any."""
    if abs(candidate) <= EPS_GEO:
        return "near-origin"
    for q, q_theta in accepted:
        if abs(candidate - q) <= EPS_GEO:
            return "near-point"
        half = (theta - q_theta) % math.pi
        if min(half, math.pi - half) <= EPS_GEO:
            return "collinear-with-origin"
        if _dist_to_radial_slit(candidate, q) <= EPS_GEO:
            return "near-slit"
        if _dist_to_radial_slit(q, candidate) <= EPS_GEO:
            return "slit-over-point"
    return None


def poisson_disk(stream: Stream, intensity: float, radius: float) -> list[Vec2]:
    """Poisson(intensity * pi * radius^2)-many uniform points in the disk.

    Points come out in increasing radius; as a set they are an exact Poisson
    sample.  Deterministic in the stream state.
    """
    if intensity < 0 or radius <= 0:
        raise ValueError("need intensity >= 0 and radius > 0")
    points: list[Vec2] = []
    if intensity == 0.0:
        return points
    scale = intensity * math.pi
    cum = 0.0
    while True:
        cum += stream.exponential()
        r = math.sqrt(cum / scale)
        if r > radius:
            return points
        theta = stream.angle()
        points.append(r * complex(math.cos(theta), math.sin(theta)))


def _sample_node_points(stream: Stream, intensity: float, budget: float,
                        planted: list[Vec2]) -> list[Vec2]:
    """Radial Poisson sample with measure-zero configurations redrawn.

    ``planted`` points participate in the degeneracy predicate from the
    start.  A rejected candidate redraws its angle from the stream
    continuation (the radius sequence must stay monotone); candidates within
    tolerance of the origin are dropped outright.  Decisions for each point
    depend only on earlier structure, so a larger budget replays identically.
    """
    accepted: list[tuple[Vec2, float]] = []
    for q in planted:
        accepted.append((q, math.atan2(q.imag, q.real)))
    out: list[Vec2] = []
    if intensity == 0.0 or budget <= 0.0:
        return out
    scale = intensity * math.pi
    cum = 0.0
    while True:
        cum += stream.exponential()
        r = math.sqrt(cum / scale)
        if r > budget:
            return out
        for attempt in range(_MAX_ANGLE_REDRAWS):
            theta = stream.angle()
            candidate = r * complex(math.cos(theta), math.sin(theta))
            why = _degeneracy(candidate, theta, accepted)
            if why is None:
                accepted.append((candidate, theta))
                out.append(candidate)
                break
            if why == "near-origin":
                log.warning("dropped degenerate sample (%s) at r=%.3g", why, r)
                break
            log.warning("redrew degenerate sample (%s), attempt %d", why, attempt + 1)
        else:
            raise BudgetOverflow("angle redraw limit exceeded; sample pathologically degenerate")


@dataclass
class PlaneNode:
    """One chart of the truncated plane.

    ``points`` are the chart's Poisson sample within ``budget`` in increasing
    radius; ``children[i]`` is the chart glued across the slit of
    ``points[i]`` (key ``-1`` for a planted point), present whenever the
    child budget ``budget - |x|`` is positive.
    """

    path: tuple[int, ...]
    budget: float
    points: list[Vec2]
    children: dict[int, "PlaneNode"] = field(default_factory=dict)

    def spawn(self, index: int, planted: Optional[Vec2]) -> Vec2:
        if index == PLANTED_INDEX:
            if planted is None:
                raise KeyError("no planted point on this plane")
            return planted
        return self.points[index]


class TruncatedPlane(SurfaceProvider):
    """A Poisson translation plane truncated to a radius budget.

    Immutable after construction; regenerating from ``(intensity, seed,
    budget)`` reproduces the identical tree.  ``planted`` optionally adds one
    deterministic extra root point whose cone point serves as a conditioned
    singularity viewpoint; it lives at child index ``-1``.
    """

    is_simply_connected = True

    def __init__(self, intensity: float, root: PlaneNode, seed: Optional[int] = None,
                 planted: Optional[Vec2] = None, resampleable: bool = False):
        self.intensity = intensity
        self.seed = seed
        self.root = root
        self.planted = planted
        self.resampleable = resampleable
        self._nodes: dict[tuple[int, ...], PlaneNode] = {}
        self._dev: dict[tuple[int, ...], Vec2] = {}
        self._index(root, 0j)

    def _index(self, node: PlaneNode, dev: Vec2) -> None:
        self._nodes[node.path] = node
        self._dev[node.path] = dev
        for idx, child in node.children.items():
            self._index(child, dev + node.spawn(idx, self.planted if node.path == () else None))

    # -- structure ---------------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    def node(self, path: tuple[int, ...]) -> PlaneNode:
        return self._nodes[path]

    def spawn_point(self, child_path: tuple[int, ...]) -> Vec2:
        parent = self._nodes[child_path[:-1]]
        return parent.spawn(child_path[-1], self.planted if parent.path == () else None)

    def iter_charts(self):
        return iter(self._nodes.keys())

    def iter_cone_points(self):
        for path in self._nodes:
            if path != ():
                yield path

    def dev_offset(self, chart) -> Vec2:
        return self._dev[chart]

    # -- provider ----------------------------------------------------------

    def portals_in(self, chart) -> list[PortalView]:
        node = self._nodes[chart]
        views = []
        if chart != ():
            x = self.spawn_point(chart)
            views.append(PortalView(chart=chart, side_key=(chart, "child"),
                                    geometry=Ray(apex=0j, dir=unit(x)), shift=x))
        for idx in sorted(node.children):
            x = node.spawn(idx, self.planted if chart == () else None)
            child = chart + (idx,)
            views.append(PortalView(chart=chart, side_key=(child, "parent"),
                                    geometry=Ray(apex=x, dir=unit(x)), shift=-x))
        return views

    def cross(self, view: PortalView):
        cone_path, side = view.side_key
        if side == "parent":
            return cone_path, (cone_path, "child")
        return cone_path[:-1], (cone_path, "parent")

    def cone_points_in(self, chart) -> list[tuple[tuple[int, ...], Vec2]]:
        node = self._nodes[chart]
        out = []
        if chart != ():
            out.append((chart, 0j))
        for idx in sorted(node.children):
            x = node.spawn(idx, self.planted if chart == () else None)
            out.append((chart + (idx,), x))
        return out

    def cone_point(self, cone_id) -> ConePoint:
        x = self.spawn_point(cone_id)
        start = math.atan2(x.imag, x.real)
        two_pi = 2.0 * math.pi
        return ConePoint(id=cone_id, order=1, incidences=(
            Incidence(chart=cone_id[:-1], pos=x, start_dir=start, span=two_pi),
            Incidence(chart=cone_id, pos=0j, start_dir=start, span=two_pi),
        ))

    def basepoint(self) -> LocatedPoint:
        return LocatedPoint(chart=(), pos=0j)

    def reach(self, point: LocatedPoint) -> float:
        """Arclength any path must spend to get from the basepoint to ``point``."""
        total = abs(point.pos)
        path = point.chart
        while path != ():
            total += abs(self.spawn_point(path))
            path = path[:-1]
        return total

    def ensure_viewpoint(self, point: LocatedPoint, radius: float) -> None:
        needed = self.reach(point) + radius
        if needed > self.root.budget + EPS_GEO:
            raise NeedsExpansion(needed)

    # -- serialization -----------------------------------------------------

    def to_document(self) -> dict:
        def encode(node: PlaneNode) -> dict:
            return {
                "path": list(node.path),
                "budget": None if math.isinf(node.budget) else node.budget,
                "points": [vec_to_json(p) for p in node.points],
                "children": {str(i): encode(c) for i, c in sorted(node.children.items())},
            }

        return {
            "format_version": 1,
            "kind": "poisson_plane",
            "intensity": self.intensity,
            "seed": self.seed,
            "resampleable": self.resampleable,
            "planted": None if self.planted is None else vec_to_json(self.planted),
            "root": encode(self.root),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_document(doc: dict) -> "TruncatedPlane":
        if doc.get("kind") != "poisson_plane":
            raise ValueError(f"not a poisson_plane document: kind={doc.get('kind')!r}")

        def decode(data: dict) -> PlaneNode:
            node = PlaneNode(
                path=tuple(data["path"]),
                budget=math.inf if data["budget"] is None else float(data["budget"]),
                points=[vec_from_json(p) for p in data["points"]],
            )
            for key, sub in data["children"].items():
                node.children[int(key)] = decode(sub)
            return node

        planted = doc.get("planted")
        return TruncatedPlane(
            intensity=float(doc["intensity"]),
            root=decode(doc["root"]),
            seed=doc.get("seed"),
            planted=None if planted is None else vec_from_json(planted),
            resampleable=bool(doc.get("resampleable", False)),
        )

    @staticmethod
    def from_json(text: str) -> "TruncatedPlane":
        return TruncatedPlane.from_document(json.loads(text))


def _build_node(seed: int, intensity: float, path: tuple[int, ...], budget: float,
                planted: Optional[Vec2], counter: list[int], node_cap: int) -> PlaneNode:
    counter[0] += 1
    if counter[0] > node_cap:
        raise BudgetOverflow(f"materialized more than {node_cap} nodes")
    planted_here = [planted] if (path == () and planted is not None) else []
    points = _sample_node_points(Stream(seed, path), intensity, budget, planted_here)
    node = PlaneNode(path=path, budget=budget, points=points)
    for idx, x in enumerate(points):
        child_budget = budget - abs(x)
        if child_budget > 0.0:
            node.children[idx] = _build_node(seed, intensity, path + (idx,),
                                             child_budget, None, counter, node_cap)
    if planted_here:
        child_budget = budget - abs(planted)
        if child_budget > 0.0:
            node.children[PLANTED_INDEX] = _build_node(
                seed, intensity, path + (PLANTED_INDEX,), child_budget, None,
                counter, node_cap)
    return node


def sample_plane(seed: int, intensity: float, radius: float,
                 planted: Optional[Vec2] = None,
                 node_cap: int = DEFAULT_NODE_CAP) -> TruncatedPlane:
    """Sample a Poisson translation plane truncated for radius-``radius`` queries.

    The root chart is budgeted to ``radius``; a child spawned by point ``x``
    in a chart of budget ``B`` gets budget ``B - |x|`` and is materialized
    only when that is positive.  ``planted`` adds one deterministic extra
    root point (its slit, child chart and subtree included), used to realize
    a conditioned singularity viewpoint.
    """
    if intensity <= 0 or radius <= 0:
        raise ValueError("need intensity > 0 and radius > 0")
    if planted is not None and abs(planted) >= radius:
        raise ValueError("planted point must lie strictly inside the root budget")
    counter = [0]
    root = _build_node(seed, intensity, (), radius, planted, counter, node_cap)
    return TruncatedPlane(intensity=intensity, root=root, seed=seed,
                          planted=planted, resampleable=True)


def expand(plane: TruncatedPlane, radius: float,
           node_cap: int = DEFAULT_NODE_CAP) -> TruncatedPlane:
    """Re-truncate a sampled plane at a larger budget.

    Node streams are replayed from their keys, so the result restricted to
    the old budgets is identical to the input; new points appear only in the
    newly covered annuli.
    """
    if not plane.resampleable:
        raise ValueError("plane was not stream-sampled; cannot expand")
    if radius < plane.root.budget:
        raise ValueError("expand target below current budget")
    if radius == plane.root.budget:
        return plane
    return sample_plane(plane.seed, plane.intensity, radius,
                        planted=plane.planted, node_cap=node_cap)


def restrict(plane: TruncatedPlane, radius: float) -> TruncatedPlane:
    """Truncate a plane to a smaller root budget (pure cutoff, no sampling)."""
    if radius > plane.root.budget:
        raise ValueError("restrict target above current budget")

    def cut(node: PlaneNode, budget: float) -> PlaneNode:
        points = [p for p in node.points if abs(p) <= budget]
        out = PlaneNode(path=node.path, budget=budget, points=points)
        for idx, child in node.children.items():
            x = node.spawn(idx, plane.planted if node.path == () else None)
            child_budget = budget - abs(x)
            if child_budget > 0.0:
                out.children[idx] = cut(child, child_budget)
        return out

    planted = plane.planted if (plane.planted is not None and abs(plane.planted) < radius) else None
    return TruncatedPlane(intensity=plane.intensity, root=cut(plane.root, radius),
                          seed=plane.seed, planted=planted,
                          resampleable=plane.resampleable)


def manual_plane(points_by_path: dict[tuple[int, ...], list[Vec2]],
                 intensity: float = 1.0, budget: float = math.inf) -> TruncatedPlane:
    """Hand-built plane: every listed point gets a slit and a child chart.

    Charts not named in ``points_by_path`` are empty planes.  Budgets are
    infinite by default so any in-tree query is admissible.
    """

    def build(path: tuple[int, ...]) -> PlaneNode:
        points = [complex(p) for p in points_by_path.get(path, [])]
        node = PlaneNode(path=path, budget=budget, points=points)
        for idx in range(len(points)):
            node.children[idx] = build(path + (idx,))
        return node

    for path in points_by_path:
        for prefix_len in range(len(path)):
            prefix = path[:prefix_len]
            if path[prefix_len] >= len(points_by_path.get(prefix, [])):
                raise ValueError(f"path {path} not reachable: missing point in {prefix}")
    return TruncatedPlane(intensity=intensity, root=build(()), resampleable=False)


def rescale_plane(plane: TruncatedPlane, s: float) -> TruncatedPlane:
    """Multiply all lengths by ``s``; the intensity becomes ``intensity / s^2``.

    The result is no longer stream-backed (its coordinates are not a replay
    of any seed), so it cannot be expanded.
    """
    if not (s > 0 and math.isfinite(s)):
        raise ValueError("scale factor must be positive and finite")

    def scale(node: PlaneNode) -> PlaneNode:
        out = PlaneNode(path=node.path, budget=node.budget * s,
                        points=[p * s for p in node.points])
        for idx, child in node.children.items():
            out.children[idx] = scale(child)
        return out

    return TruncatedPlane(intensity=plane.intensity / (s * s), root=scale(plane.root),
                          seed=plane.seed,
                          planted=None if plane.planted is None else plane.planted * s,
                          resampleable=False)
