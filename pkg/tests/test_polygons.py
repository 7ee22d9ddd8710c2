"""Exact polygon primitives, cross-checked against brute-force sampling."""
from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from fairdiv.geometry import BarycentricPoint, bary_dist2
from fairdiv.polygons import (
    clip_polygon,
    convex_hull,
    halfplane_through,
    orient_sign,
    point_in_convex,
    polygon_centroid,
    polygon_dist2,
    segment_dist2,
)

from conftest import random_point

V1 = BarycentricPoint.vertex(3, 1)
V2 = BarycentricPoint.vertex(3, 2)
V3 = BarycentricPoint.vertex(3, 3)
TRIANGLE = (V1, V2, V3)


def P(a, b, c) -> BarycentricPoint:
    return BarycentricPoint.of([a, b, c])


class TestOrient:
    def test_reference_triangle_ccw(self):
        assert orient_sign(V1.coords, V2.coords, V3.coords) == 1
        assert orient_sign(V2.coords, V1.coords, V3.coords) == -1

    def test_collinear(self):
        assert orient_sign(V1.coords, V2.coords, P("1/2", "1/2", "0").coords) == 0


class TestMembership:
    def test_whole_triangle_contains_anything(self):
        rng = random.Random(1)
        for _ in range(50):
            assert point_in_convex(random_point(rng, 3), TRIANGLE)

    def test_vertices_and_edge_midpoints_on_boundary(self):
        poly = (V2, V3, P("1/3", "1/3", "1/3"))
        pts = list(poly)
        k = len(poly)
        for i in range(k):
            a, b = poly[i], poly[(i + 1) % k]
            pts.append(BarycentricPoint(tuple((x + y) / 2 for x, y in zip(a.coords, b.coords))))
        for p in pts:
            assert point_in_convex(p, poly)

    def test_outside(self):
        poly = (V2, V3, P("1/3", "1/3", "1/3"))
        assert not point_in_convex(P("2/3", "1/6", "1/6"), poly)


class TestHull:
    def test_drops_interior_and_collinear(self):
        pts = [V1, V2, V3, P("1/3", "1/3", "1/3"), P("1/2", "1/2", "0")]
        hull = convex_hull(pts)
        assert sorted(p.coords for p in hull) == sorted(p.coords for p in TRIANGLE)

    def test_ccw_order(self):
        hull = convex_hull([V3, V1, V2])
        k = len(hull)
        for i in range(k):
            assert orient_sign(hull[i].coords, hull[(i + 1) % k].coords, hull[(i + 2) % k].coords) == 1

    def test_collinear_input(self):
        hull = convex_hull([V1, V2, P("1/2", "1/2", "0"), P("3/4", "1/4", "0")])
        assert len(hull) == 2


class TestClip:
    def test_halfplane_keeps_triangle_half(self):
        # line through v3 and the midpoint of F_3, keeping v1's side
        mid = P("1/2", "1/2", "0")
        plane = halfplane_through(V3.coords, mid.coords, V1.coords)
        poly = clip_polygon(list(TRIANGLE), plane)
        assert point_in_convex(P("2/3", "1/6", "1/6"), tuple(poly))
        assert not point_in_convex(P("1/6", "2/3", "1/6"), tuple(poly))

    def test_clip_to_point(self):
        plane1 = (Fraction(-1), Fraction(0), Fraction(0))  # alpha_1 <= 0
        plane2 = (Fraction(0), Fraction(-1), Fraction(0))  # alpha_2 <= 0
        poly = clip_polygon(list(TRIANGLE), plane1)
        assert sorted(p.coords for p in poly) == sorted([V2.coords, V3.coords])
        poly = clip_polygon(poly, plane2)
        assert [p.coords for p in poly] == [V3.coords]
        assert polygon_centroid(poly) == V3

    def test_clip_to_empty(self):
        plane = (Fraction(-1), Fraction(-1), Fraction(-1))  # sum <= 0: impossible
        assert clip_polygon(list(TRIANGLE), plane) == []

    def test_keep_point_on_line_rejected(self):
        with pytest.raises(ValueError):
            halfplane_through(V1.coords, V2.coords, P("1/2", "1/2", "0").coords)


class TestDistances:
    def test_segment_distance_endpoints_and_projection(self):
        x = P("1/3", "1/3", "1/3")
        assert segment_dist2(x, V2, V3) == bary_dist2(x, P("0", "1/2", "1/2"))
        far = V1
        assert segment_dist2(far, V2, V3) == bary_dist2(far, P("0", "1/2", "1/2"))

    def test_polygon_distance_zero_inside(self):
        assert polygon_dist2(P("1/3", "1/3", "1/3"), TRIANGLE) == 0

    def test_polygon_distance_brute_force(self):
        rng = random.Random(7)
        poly = (V2, V3, P("1/2", "1/4", "1/4"))
        for _ in range(40):
            x = random_point(rng, 3, denom=59)
            exact = polygon_dist2(x, poly)
            # dense boundary + interior sampling as the independent oracle
            best = None
            k = len(poly)
            samples = []
            for i in range(k):
                a, b = poly[i], poly[(i + 1) % k]
                for t in range(101):
                    f = Fraction(t, 100)
                    samples.append(tuple(p + f * (q - p) for p, q in zip(a.coords, b.coords)))
            for s in samples:
                d2 = sum((c - v) ** 2 for c, v in zip(x.coords, s)) / 2
                best = d2 if best is None else min(best, d2)
            if point_in_convex(x, poly):
                assert exact == 0
            else:
                assert exact <= best
                assert math.sqrt(best) - math.sqrt(exact) < 0.02
