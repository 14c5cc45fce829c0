import math

import numpy as np
import pytest

from slitplane.errors import NoPath
from slitplane.flatcomplex import (LocatedPoint, PortalView, SurfaceProvider,
                                   develop, develop_along, validate)
from slitplane.geom import Segment
from slitplane.origami import Perm, build_sts
from slitplane.plane import manual_plane, sample_plane


def test_validate_unit_torus_clean():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    assert validate(torus, 0) == []


def test_validate_sampled_plane_clean():
    plane = sample_plane(17, 4.0, 2.0)
    for chart in plane.iter_charts():
        assert validate(plane, chart) == []


class _BrokenPair(SurfaceProvider):
    """Two unit squares glued left-right, one shift deliberately off."""

    def __init__(self, offset):
        self.offset = offset

    def portals_in(self, chart):
        if chart == 0:
            return [PortalView(chart=0, side_key=("e", 0), interior_side=1,
                               geometry=Segment(complex(1, 0), complex(1, 1)),
                               shift=complex(-1 + self.offset, 0))]
        return [PortalView(chart=1, side_key=("e", 1), interior_side=-1,
                           geometry=Segment(0j, complex(0, 1)),
                           shift=complex(1, 0))]

    def cross(self, view):
        other = 1 - view.chart
        return other, ("e", other)

    def cone_points_in(self, chart):
        return []

    def cone_point(self, cone_id):
        raise KeyError(cone_id)

    def iter_charts(self):
        return (0, 1)

    def iter_cone_points(self):
        return ()


def test_validate_flags_corrupted_portal():
    clean = _BrokenPair(0.0)
    assert validate(clean, 0) == []
    broken = _BrokenPair(0.1)
    report = validate(broken, 0)
    assert len(report) >= 1
    assert "('e', 0)" in report[0]


def test_develop_identity_and_manual_tree():
    m = manual_plane({(): [1 + 0j], (0,): [1j]})
    assert develop(m, (), ()) == 0j
    assert develop(m, (), (0, 0)) == 1 + 1j


def test_develop_composition_on_random_trees():
    rng = np.random.default_rng(31)
    for _ in range(100):
        pts = {(): [complex(*rng.uniform(-1, 1, 2)) for _ in range(3)]}
        pts[(1,)] = [complex(*rng.uniform(-1, 1, 2)) for _ in range(2)]
        pts[(1, 0)] = [complex(*rng.uniform(-1, 1, 2))]
        m = manual_plane(pts)
        a, b, c = (), (1,), (1, 0)
        assert develop(m, a, b) + develop(m, b, c) == develop(m, a, c)
        d = (1, 0, 0)
        assert develop(m, a, c) + develop(m, c, d) == develop(m, a, d)


def test_develop_needs_simply_connected():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    with pytest.raises(NoPath):
        develop(torus, 0, 0)


def test_develop_along_portal_chain():
    torus = build_sts(Perm.identity(1), Perm.identity(1))
    right = [v for v in torus.portals_in(0) if v.side_key == (0, "R")][0]
    up = [v for v in torus.portals_in(0) if v.side_key == (0, "T")][0]
    # crossing right then top: final chart coords differ by (1, 1)
    assert develop_along(torus, [right, up]) == 1 + 1j


def test_portal_involution_roundtrip():
    plane = sample_plane(3, 4.0, 1.5)
    for chart in plane.iter_charts():
        for view in plane.portals_in(chart):
            other, other_key = plane.cross(view)
            back = [w for w in plane.portals_in(other) if w.side_key == other_key]
            assert len(back) == 1
            assert back[0].shift == -view.shift
            # equal-arclength parametrization at a probe value
            t = 0.7
            assert abs(view.geometry.point(t) + view.shift
                       - back[0].geometry.point(t)) < 1e-12


def test_cone_angles_on_plane():
    plane = sample_plane(23, 4.0, 1.5)
    for cid in plane.iter_cone_points():
        cp = plane.cone_point(cid)
        assert cp.order == 1
        assert cp.total_angle == pytest.approx(4 * math.pi, abs=1e-9)


def test_cone_frame_direction_lookup():
    m = manual_plane({(): [1 + 0j]})
    cp = m.cone_point((0,))
    chart, pos, ang = cp.direction_at(math.pi / 2)  # parent sheet
    assert chart == () and pos == 1 + 0j
    chart2, pos2, ang2 = cp.direction_at(2 * math.pi + math.pi / 2)  # child sheet
    assert chart2 == (0,) and pos2 == 0j
    assert math.cos(ang) == pytest.approx(math.cos(ang2))
    assert math.sin(ang) == pytest.approx(math.sin(ang2))


def test_cone_sheet_angles_cover_each_direction_twice():
    m = manual_plane({(): [1 + 1j]})
    cp = m.cone_point((0,))
    for theta in (0.0, 1.0, 3.0, 5.5):
        hits = cp.sheet_angles_for_direction(theta)
        assert len(hits) == 2
        charts = {chart for _, chart, _ in hits}
        assert charts == {(), (0,)}
