"""Square-tiled surfaces from permutation pairs.

A surface of ``n`` unit squares is encoded by permutations ``h`` (right
neighbor) and ``v`` (top neighbor): square ``i`` glues its right edge to the
left edge of ``h(i)`` and its top edge to the bottom edge of ``v(i)``.
Vertices are the orbits of the corner walk; a vertex whose orbit has ``m``
wedges carries total angle ``m * pi/2`` and is a cone point of order
``m/4 - 1`` when that is positive.

The uniform sampler here is illustrative only: uniform permutation pairs do
not follow the natural Lebesgue-class measure on any stratum and typically
land outside the principal stratum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import Disconnected, OutOfRange, PermParseError
from .flatcomplex import (ConePoint, Incidence, LocatedPoint, PortalView,
                          SurfaceProvider, vec_to_json)
from .geom import Segment, Vec2
from .rngstream import stream_key


class Perm:
    """Permutation of ``{0, .., n-1}`` stored by its image tuple."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        object.__setattr__(self, "images", images)

    def __len__(self):
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __eq__(self, other):
        return isinstance(other, Perm) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Perm({list(self.images)})"

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(range(n))

    def inverse(self) -> "Perm":
        out = [0] * len(self.images)
        for i, j in enumerate(self.images):
            out[j] = i
        return Perm(out)

    def compose(self, other: "Perm") -> "Perm":
        """self after other: (self.compose(other))(x) = self(other(x))."""
        return Perm(self.images[other.images[i]] for i in range(len(self.images)))

    def cycles(self, drop_fixed: bool = False) -> list[tuple[int, ...]]:
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            cyc = [start]
            seen[start] = True
            j = self.images[start]
            while j != start:
                cyc.append(j)
                seen[j] = True
                j = self.images[j]
            if not (drop_fixed and len(cyc) == 1):
                out.append(tuple(cyc))
        return out


def parse_cycles(text: str, n: int) -> Perm:
    """Parse 1-based cycle notation like ``"(1 2)(3 4)"`` into a permutation.

    Fixed points are omitted; entries separated by whitespace or commas.
    """
    images = list(range(n))
    assigned = [False] * n
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch != "(":
            raise PermParseError(f"expected '(' but found {ch!r}", i)
        close = text.find(")", i)
        if close < 0:
            raise PermParseError("unclosed cycle", i)
        body = text[i + 1:close].replace(",", " ").split()
        if not body:
            raise PermParseError("empty cycle", i)
        entries = []
        for token in body:
            if not token.isdigit():
                raise PermParseError(f"bad entry {token!r}", i)
            value = int(token) - 1
            if not 0 <= value < n:
                raise OutOfRange(f"entry {token} outside 1..{n}")
            if assigned[value]:
                raise PermParseError(f"entry {token} repeated", i)
            assigned[value] = True
            entries.append(value)
        for a, b in zip(entries, entries[1:] + entries[:1]):
            images[a] = b
        i = close + 1
    return Perm(images)


def print_cycles(perm: Perm) -> str:
    """1-based cycle notation with fixed points omitted; identity prints ''."""
    parts = []
    for cyc in perm.cycles(drop_fixed=True):
        parts.append("(" + " ".join(str(i + 1) for i in cyc) + ")")
    return "".join(parts)


# Corner indexing: 0 = (0,0), 1 = (s,0), 2 = (s,s), 3 = (0,s).
# Walking counterclockwise around a vertex from the wedge at corner ``c`` of
# square ``sq`` crosses one edge into the next square's wedge:
#   c=0 -> left  edge -> (h^-1 sq, 1)      c=1 -> bottom -> (v^-1 sq, 2)
#   c=2 -> right edge -> (h sq, 3)         c=3 -> top    -> (v sq, 0)


def _corner_pos(c: int, scale: float) -> Vec2:
    return [0j, complex(scale, 0), complex(scale, scale), complex(0, scale)][c]


class SquareTiledSurface(SurfaceProvider):
    """Compact translation surface tiled by ``n`` squares of side ``scale``."""

    is_simply_connected = False

    def __init__(self, h: Perm, v: Perm, scale: float = 1.0):
        if len(h) != len(v):
            raise ValueError("permutation sizes differ")
        if len(h) < 1:
            raise ValueError("need at least one square")
        if not (scale > 0 and math.isfinite(scale)):
            raise ValueError("scale must be positive and finite")
        self.h = h
        self.v = v
        self.n = len(h)
        self.scale = scale
        self._h_inv = h.inverse()
        self._v_inv = v.inverse()
        self._check_connected()
        self._build_vertices()

    def _check_connected(self):
        seen = {0}
        frontier = [0]
        while frontier:
            sq = frontier.pop()
            for nb in (self.h(sq), self._h_inv(sq), self.v(sq), self._v_inv(sq)):
                if nb not in seen:
                    seen.add(nb)
                    frontier.append(nb)
        if len(seen) != self.n:
            raise Disconnected(f"only {len(seen)} of {self.n} squares reachable")

    def walk_next(self, sq: int, c: int) -> tuple[int, int]:
        if c == 0:
            return self._h_inv(sq), 1
        if c == 1:
            return self._v_inv(sq), 2
        if c == 2:
            return self.h(sq), 3
        return self.v(sq), 0

    def _build_vertices(self):
        self.vertex_of: dict[tuple[int, int], int] = {}
        self.vertices: list[list[tuple[int, int]]] = []
        for sq in range(self.n):
            for c in range(4):
                if (sq, c) in self.vertex_of:
                    continue
                vid = len(self.vertices)
                orbit = []
                cur = (sq, c)
                while cur not in self.vertex_of:
                    self.vertex_of[cur] = vid
                    orbit.append(cur)
                    cur = self.walk_next(*cur)
                self.vertices.append(orbit)
        self.vertex_order = [len(orbit) // 4 - 1 for orbit in self.vertices]

    # -- derived invariants --------------------------------------------------

    @property
    def genus(self) -> int:
        n_vertices = len(self.vertices)
        two_minus_2g = n_vertices - self.n  # V - E + F with E = 2n, F = n
        return (2 - two_minus_2g) // 2

    @property
    def total_area(self) -> float:
        return self.scale * self.scale * self.n

    def cone_orders(self) -> list[int]:
        return [k for k in self.vertex_order if k >= 1]

    # -- provider -------------------------------------------------------------

    def iter_charts(self):
        return range(self.n)

    def iter_cone_points(self):
        return (vid for vid, k in enumerate(self.vertex_order) if k >= 1)

    def portals_in(self, chart) -> list[PortalView]:
        s = self.scale
        sq = chart
        return [
            PortalView(chart=sq, side_key=(sq, "R"), shift=complex(-s, 0),
                       geometry=Segment(complex(s, 0), complex(s, s)), interior_side=1),
            PortalView(chart=sq, side_key=(sq, "L"), shift=complex(s, 0),
                       geometry=Segment(0j, complex(0, s)), interior_side=-1),
            PortalView(chart=sq, side_key=(sq, "T"), shift=complex(0, -s),
                       geometry=Segment(complex(0, s), complex(s, s)), interior_side=-1),
            PortalView(chart=sq, side_key=(sq, "B"), shift=complex(0, s),
                       geometry=Segment(0j, complex(s, 0)), interior_side=1),
        ]

    def cross(self, view: PortalView):
        sq, side = view.side_key
        if side == "R":
            other = self.h(sq)
            return other, (other, "L")
        if side == "L":
            other = self._h_inv(sq)
            return other, (other, "R")
        if side == "T":
            other = self.v(sq)
            return other, (other, "B")
        other = self._v_inv(sq)
        return other, (other, "T")

    def cone_points_in(self, chart) -> list:
        out = []
        for c in range(4):
            vid = self.vertex_of[(chart, c)]
            if self.vertex_order[vid] >= 1:
                out.append((vid, _corner_pos(c, self.scale)))
        return out

    def cone_point(self, cone_id) -> ConePoint:
        orbit = self.vertices[cone_id]
        incidences = tuple(
            Incidence(chart=sq, pos=_corner_pos(c, self.scale),
                      start_dir=c * math.pi / 2.0, span=math.pi / 2.0)
            for sq, c in orbit)
        return ConePoint(id=cone_id, order=self.vertex_order[cone_id],
                         incidences=incidences)

    def cone_location(self, cone_id) -> LocatedPoint:
        return self.locate_cone(cone_id)

    # -- serialization ---------------------------------------------------------

    def to_document(self) -> dict:
        return {
            "format_version": 1,
            "kind": "square_tiled",
            "n": self.n,
            "hperm": print_cycles(self.h),
            "vperm": print_cycles(self.v),
            "h_images": list(self.h.images),
            "v_images": list(self.v.images),
            "scale": self.scale,
            "derived": {
                "genus": self.genus,
                "area": self.total_area,
                "cone_orders": self.cone_orders(),
                "vertex_count": len(self.vertices),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, separators=(",", ":"))

    @staticmethod
    def from_document(doc: dict) -> "SquareTiledSurface":
        if doc.get("kind") != "square_tiled":
            raise ValueError(f"not a square_tiled document: kind={doc.get('kind')!r}")
        return SquareTiledSurface(Perm(doc["h_images"]), Perm(doc["v_images"]),
                                  scale=float(doc.get("scale", 1.0)))

    @staticmethod
    def from_json(text: str) -> "SquareTiledSurface":
        return SquareTiledSurface.from_document(json.loads(text))


def build_sts(h: Perm, v: Perm) -> SquareTiledSurface:
    """Surface from a permutation pair; raises ``Disconnected`` if not connected."""
    return SquareTiledSurface(h, v)


def random_sts(seed: int, n: int) -> SquareTiledSurface:
    """Independent uniform permutations, resampled until connected.

    Deterministic in ``seed``.  The induced law is NOT the Lebesgue-class
    measure on any stratum; treat these surfaces as illustrative test cases.
    """
    gen = np.random.Generator(np.random.Philox(key=stream_key(seed, (), "sts")))
    while True:
        h = Perm(int(i) for i in gen.permutation(n))
        v = Perm(int(i) for i in gen.permutation(n))
        try:
            return SquareTiledSurface(h, v)
        except Disconnected:
            continue


def rescale(surface: SquareTiledSurface, s: float) -> SquareTiledSurface:
    """Multiply all lengths by ``s``; combinatorics unchanged, area by ``s^2``."""
    return SquareTiledSurface(surface.h, surface.v, scale=surface.scale * s)
