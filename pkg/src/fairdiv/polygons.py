"""Exact convex-polygon primitives in barycentric coordinates (d = 3).

Orientation is the sign of the 3x3 determinant of row-stacked barycentric
coordinates; with the reference triangle (v1, v2, v3) that determinant is +1,
so "counter-clockwise" means positive.  Signs are evaluated in integer
arithmetic after clearing denominators, which keeps the membership hot path
fast; exact Fraction values are used wherever magnitudes matter (clipping
intersections, distances).
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from .geometry import BarycentricPoint, bary_dist2

Coords = tuple[Fraction, Fraction, Fraction]


def _int_row(p: Coords) -> tuple[int, int, int]:
    m = lcm(p[0].denominator, p[1].denominator, p[2].denominator)
    return (
        p[0].numerator * (m // p[0].denominator),
        p[1].numerator * (m // p[1].denominator),
        p[2].numerator * (m // p[2].denominator),
    )


def orient_sign(p: Coords, q: Coords, r: Coords) -> int:
    """Sign of det[p; q; r]; positive iff (p, q, r) turns counter-clockwise."""
    a0, a1, a2 = _int_row(p)
    b0, b1, b2 = _int_row(q)
    c0, c1, c2 = _int_row(r)
    det = a0 * (b1 * c2 - b2 * c1) - a1 * (b0 * c2 - b2 * c0) + a2 * (b0 * c1 - b1 * c0)
    return (det > 0) - (det < 0)


def point_in_convex(x: BarycentricPoint, vertices: tuple[BarycentricPoint, ...]) -> bool:
    """Membership in a closed convex polygon given as CCW vertices."""
    k = len(vertices)
    if k == 1:
        return x.coords == vertices[0].coords
    if k == 2:
        return _on_segment(x, vertices[0], vertices[1])
    xc = x.coords
    for i in range(k):
        if orient_sign(vertices[i].coords, vertices[(i + 1) % k].coords, xc) < 0:
            return False
    return True


def _on_segment(x: BarycentricPoint, p: BarycentricPoint, q: BarycentricPoint) -> bool:
    if orient_sign(p.coords, q.coords, x.coords) != 0:
        return False
    lo = [min(a, b) for a, b in zip(p.coords, q.coords)]
    hi = [max(a, b) for a, b in zip(p.coords, q.coords)]
    return all(l <= c <= h for c, l, h in zip(x.coords, lo, hi))


def convex_hull(points: list[BarycentricPoint]) -> list[BarycentricPoint]:
    """CCW hull via monotone chain in the affine chart (alpha_2, alpha_3).

    Collinear boundary points are dropped, so the result is strictly convex.
    """
    uniq = sorted({(p.coords[1], p.coords[2], p.coords[0]) for p in points})
    pts = [BarycentricPoint((c[2], c[0], c[1])) for c in uniq]
    if len(pts) <= 2:
        return pts

    def build(seq):
        out: list[BarycentricPoint] = []
        for p in seq:
            while len(out) >= 2 and orient_sign(out[-2].coords, out[-1].coords, p.coords) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = build(pts)
    upper = build(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        # All input points collinear.
        return [pts[0], pts[-1]]
    return hull


# A closed half-plane {y : c1*a1(y) + c2*a2(y) + c3*a3(y) >= 0}.
HalfPlane = tuple[Fraction, Fraction, Fraction]


def halfplane_through(p: Coords, q: Coords, keep: Coords) -> HalfPlane:
    """Half-plane bounded by the line through p and q that contains `keep`.

    The functional is the cofactor expansion of det[p; q; y] in y; `keep`
    must not lie on the line.
    """
    c1 = p[1] * q[2] - p[2] * q[1]
    c2 = p[2] * q[0] - p[0] * q[2]
    c3 = p[0] * q[1] - p[1] * q[0]
    val = c1 * keep[0] + c2 * keep[1] + c3 * keep[2]
    if val == 0:
        raise ValueError("keep-point lies on the boundary line")
    if val < 0:
        c1, c2, c3 = -c1, -c2, -c3
    return (c1, c2, c3)


def clip_polygon(vertices: list[BarycentricPoint], plane: HalfPlane) -> list[BarycentricPoint]:
    """Sutherland-Hodgman clip of a convex polygon by a closed half-plane.

    Handles degenerate one- and two-vertex "polygons"; output vertices are
    deduplicated.  Empty list means empty intersection.
    """
    c1, c2, c3 = plane

    def val(p: BarycentricPoint) -> Fraction:
        a, b, c = p.coords
        return c1 * a + c2 * b + c3 * c

    if not vertices:
        return []
    if len(vertices) == 1:
        return vertices if val(vertices[0]) >= 0 else []

    out: list[BarycentricPoint] = []
    k = len(vertices)
    for i in range(k):
        s, e = vertices[i - 1], vertices[i]
        vs, ve = val(s), val(e)
        if ve >= 0:
            if vs < 0:
                out.append(_cross(s, e, vs, ve))
            out.append(e)
        elif vs >= 0:
            out.append(_cross(s, e, vs, ve))
    return _dedupe(out)


def _cross(s: BarycentricPoint, e: BarycentricPoint, vs: Fraction, ve: Fraction) -> BarycentricPoint:
    t = vs / (vs - ve)
    return BarycentricPoint(tuple(a + t * (b - a) for a, b in zip(s.coords, e.coords)))


def _dedupe(vertices: list[BarycentricPoint]) -> list[BarycentricPoint]:
    out: list[BarycentricPoint] = []
    for p in vertices:
        if not out or p.coords != out[-1].coords:
            out.append(p)
    while len(out) > 1 and out[0].coords == out[-1].coords:
        out.pop()
    return out


def polygon_centroid(vertices: list[BarycentricPoint]) -> BarycentricPoint:
    k = len(vertices)
    sums = [sum(p.coords[c] for p in vertices) for c in range(3)]
    return BarycentricPoint(tuple(s / k for s in sums))


def segment_dist2(x: BarycentricPoint, p: BarycentricPoint, q: BarycentricPoint) -> Fraction:
    """Exact squared distance from x to segment [p, q] in the simplex metric."""
    dpq = [b - a for a, b in zip(p.coords, q.coords)]
    dxp = [b - a for a, b in zip(p.coords, x.coords)]
    denom = sum(v * v for v in dpq)
    if denom == 0:
        return bary_dist2(x, p)
    t = sum(a * b for a, b in zip(dxp, dpq)) / denom
    if t < 0:
        t = Fraction(0)
    elif t > 1:
        t = Fraction(1)
    foot = BarycentricPoint(tuple(a + t * v for a, v in zip(p.coords, dpq)))
    return bary_dist2(x, foot)


def polygon_dist2(x: BarycentricPoint, vertices: tuple[BarycentricPoint, ...]) -> Fraction:
    """Exact squared distance from x to a closed convex polygon (0 if inside)."""
    if point_in_convex(x, tuple(vertices)):
        return Fraction(0)
    k = len(vertices)
    if k == 1:
        return bary_dist2(x, vertices[0])
    return min(segment_dist2(x, vertices[i], vertices[(i + 1) % k]) for i in range(k))
