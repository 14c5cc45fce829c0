"""Exact-as-practical planar primitives on complex coordinates.

Points and directions are plain ``complex`` numbers: translation-surface
charts compose by complex addition, so holonomy bookkeeping is exact float
arithmetic.  All predicates share one absolute tolerance ``EPS_GEO``;
coordinates are assumed pre-scaled so queries live in disks of radius <= 1e3.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DegenerateGeometry, ZeroVector

Vec2 = complex

EPS_GEO = 1e-9    # shared absolute geometric tolerance
EPS_TIGHT = 1e-12 # tolerance for exact identities (portal involutions, unit norms)

TWO_PI = 2.0 * math.pi


def cross(a: Vec2, b: Vec2) -> float:
    """Signed z-component of a x b."""
    return a.real * b.imag - a.imag * b.real


def dot(a: Vec2, b: Vec2) -> float:
    return a.real * b.real + a.imag * b.imag


def unit(v: Vec2) -> Vec2:
    n = abs(v)
    if n <= EPS_TIGHT:
        raise ZeroVector(f"cannot normalize |v|={n:.3g}")
    return v / n


@dataclass(frozen=True)
class Ray:
    """Half-infinite straight path ``apex + t*dir``, t >= 0, |dir| = 1."""

    apex: Vec2
    dir: Vec2

    def __post_init__(self):
        if abs(abs(self.dir) - 1.0) > EPS_TIGHT:
            raise ValueError(f"ray direction not unit: |dir|={abs(self.dir)!r}")

    def point(self, t: float) -> Vec2:
        return self.apex + t * self.dir


@dataclass(frozen=True)
class Segment:
    """Straight path from ``a`` to ``b``, a != b."""

    a: Vec2
    b: Vec2

    def __post_init__(self):
        if abs(self.b - self.a) <= EPS_TIGHT:
            raise ValueError("degenerate segment: endpoints coincide")

    @property
    def length(self) -> float:
        return abs(self.b - self.a)

    @property
    def dir(self) -> Vec2:
        return unit(self.b - self.a)

    def point(self, t: float) -> Vec2:
        """Point at arclength ``t`` from ``a``."""
        return self.a + t * self.dir


@dataclass(frozen=True)
class AngularInterval:
    """Directions ``[lo, hi]`` in radians, unnormalized; 0 <= hi - lo <= 4*pi.

    The 4*pi cap accommodates viewpoints sitting on an order-one cone point,
    where a full turn of directions spans two sheets.
    """

    lo: float
    hi: float

    def __post_init__(self):
        width = self.hi - self.lo
        if width < 0 or width > 2 * TWO_PI + EPS_GEO:
            raise ValueError(f"angular interval width {width} outside [0, 4*pi]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, theta: float) -> bool:
        return self.lo - EPS_GEO <= theta <= self.hi + EPS_GEO


def angle_of(v: Vec2, frame: AngularInterval | None = None) -> float:
    """Direction of ``v`` normalized into ``[frame.lo, frame.lo + 2*pi)``.

    Defaults to the frame ``[0, 2*pi)``.  Raises ``ZeroVector`` below 1e-12.
    """
    if abs(v) <= EPS_TIGHT:
        raise ZeroVector("direction of near-zero vector")
    theta = cmath.phase(v)
    lo = 0.0 if frame is None else frame.lo
    return unwrap_angle(theta, lo)


def unwrap_angle(theta: float, lo: float) -> float:
    """Representative of ``theta`` mod 2*pi inside ``[lo, lo + 2*pi)``."""
    out = math.fmod(theta - lo, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    if out >= TWO_PI:
        out = 0.0
    return lo + out


def intersect_segment_ray(s: Segment, r: Ray, tol: float = EPS_GEO):
    """Unique transversal intersection of a segment with a ray.

    Returns ``(point, t_seg, t_ray)`` with ``t_seg`` in [0, 1] the segment
    fraction and ``t_ray >= 0`` the ray arclength, or ``None`` when the two
    do not meet.  Raises ``DegenerateGeometry`` when the segment is collinear
    with the ray's line or the crossing falls within ``tol`` of the ray apex:
    those configurations have measure zero and callers must resample or
    surface the error rather than trust a perturbed answer.
    """
    d = s.b - s.a
    denom = cross(d, r.dir)
    if abs(denom) <= EPS_TIGHT * max(1.0, abs(d)):
        # Parallel. Collinear iff the apex lies on the segment's line.
        if abs(cross(d, r.apex - s.a)) <= tol * max(1.0, abs(d)):
            raise DegenerateGeometry("segment collinear with ray")
        return None
    w = r.apex - s.a
    u = cross(w, r.dir) / denom      # fraction along the segment
    t_ray = cross(w, d) / denom      # arclength along the ray (|dir| = 1)
    if u < -EPS_TIGHT or u > 1.0 + EPS_TIGHT or t_ray < -EPS_TIGHT:
        return None
    p = s.a + u * d
    if abs(p - r.apex) <= tol:
        raise DegenerateGeometry("intersection within tolerance of ray apex")
    return p, min(max(u, 0.0), 1.0), max(t_ray, 0.0)


def rotate(v: Vec2, theta: float) -> Vec2:
    return v * cmath.exp(1j * theta)


def foot_parameters(apex: Vec2, direction: Vec2) -> tuple[float, float]:
    """Perpendicular-foot encoding of the line through ``apex`` along ``direction``.

    Returns ``(d, phi)``: the line is ``{z : Re(z * conj(e^{i phi})) = d}`` with
    ``d >= 0`` the distance from the origin and ``phi`` the direction of the
    foot of the perpendicular.  Radial crossing distance along direction
    ``theta`` is ``d / cos(theta - phi)``.
    """
    n = 1j * direction  # unit normal
    d = dot(apex, n)
    if d < 0:
        n = -n
        d = -d
    return d, cmath.phase(n)


def line_crossing_radius(d: float, phi: float, theta: float) -> float:
    """Distance from the origin to the line ``(d, phi)`` along direction ``theta``.

    Returns ``inf`` when the direction never reaches the line.
    """
    c = math.cos(theta - phi)
    if c <= 0.0:
        return math.inf
    return d / c


def sector_triangle_area(d: float, phi: float, theta1: float, theta2: float) -> float:
    """Area of {r e^{i theta} : theta1 <= theta <= theta2, 0 <= r <= d/cos(theta-phi)}.

    Equals the triangle spanned by the origin and the two line crossings,
    which is better conditioned than integrating tan().
    """
    r1 = line_crossing_radius(d, phi, theta1)
    r2 = line_crossing_radius(d, phi, theta2)
    if not (math.isfinite(r1) and math.isfinite(r2)):
        return math.inf
    p1 = r1 * cmath.exp(1j * theta1)
    p2 = r2 * cmath.exp(1j * theta2)
    return 0.5 * cross(p1, p2)
