"""Small planar geometry kernel: affine maps, convex clipping, predicates.

Points are ``(x, y)`` tuples in the lifted plane. Predicates that can be
decided only up to floating error return ``None`` ("undecided") inside a
band of width :data:`EDGE_TOL` around a boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .map_family import Mat2

Point = tuple
Polygon = tuple

EDGE_TOL = 2.0 ** -30


class Undecided(ValueError):
    """A predicate could not be decided because a point is too close to a boundary."""


@dataclass(frozen=True)
class Affine:
    """p -> M p + c over any number type."""

    m: Mat2
    c: tuple

    def __call__(self, p):
        x, y = self.m @ p
        return (x + self.c[0], y + self.c[1])

    def then(self, other: "Affine") -> "Affine":
        """``other`` applied after ``self``."""
        return Affine(other.m @ self.m, other(self.c))

    def inverse(self) -> "Affine":
        inv = self.m.unimodular_inverse()
        cx, cy = inv @ self.c
        return Affine(inv, (-cx, -cy))

    def to_float(self) -> "Affine":
        return Affine(self.m.to_float(), (float(self.c[0]), float(self.c[1])))

    @staticmethod
    def identity(one=1.0) -> "Affine":
        return Affine(Mat2.identity(one), (0.0 * one, 0.0 * one))

    @staticmethod
    def shift(dx, dy) -> "Affine":
        return Affine(Mat2.identity(1.0), (dx, dy))


def signed_area(poly: Sequence[Point]) -> float:
    s = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def ccw(poly: Sequence[Point]) -> tuple:
    poly = tuple((float(x), float(y)) for x, y in poly)
    return poly if signed_area(poly) >= 0 else tuple(reversed(poly))


def centroid(poly: Sequence[Point]) -> Point:
    a = signed_area(poly)
    if abs(a) < 1e-300:
        n = len(poly)
        return (sum(p[0] for p in poly) / n, sum(p[1] for p in poly) / n)
    cx = cy = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        w = x0 * y1 - x1 * y0
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    return (cx / (6 * a), cy / (6 * a))


def bbox(points: Iterable[Point]) -> tuple[float, float, float, float]:
    pts = list(points)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    return min(xs), min(ys), max(xs), max(ys)


def cross(o: Point, a: Point, b: Point) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def seg_dist(p: Point, a: Point, b: Point) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return math.hypot(p[0] - a[0], p[1] - a[1])
    t = max(0.0, min(1.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L2))
    return math.hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy)


def boundary_distance(p: Point, poly: Sequence[Point]) -> float:
    n = len(poly)
    return min(seg_dist(p, poly[i], poly[(i + 1) % n]) for i in range(n))


def point_in_polygon(p: Point, poly: Sequence[Point], tol: float = EDGE_TOL) -> Optional[bool]:
    """Inside test for a simple polygon; None when within ``tol`` of the boundary."""
    if boundary_distance(p, poly) < tol:
        return None
    x, y = p
    inside = False
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            xi = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
            if xi > x:
                inside = not inside
    return inside


def clip_halfplane(poly: Sequence[Point], a: Point, b: Point) -> list:
    """Keep the part of ``poly`` left of the directed line a -> b."""
    out = []
    n = len(poly)
    if n == 0:
        return out
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        cp, cq = cross(a, b, p), cross(a, b, q)
        if cp >= 0:
            out.append(p)
        if (cp >= 0) != (cq >= 0):
            t = cp / (cp - cq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def clip_convex(subject: Sequence[Point], clip: Sequence[Point]) -> list:
    """Sutherland-Hodgman intersection with a convex counter-clockwise polygon."""
    out = list(subject)
    n = len(clip)
    for i in range(n):
        out = clip_halfplane(out, clip[i], clip[(i + 1) % n])
        if not out:
            break
    return out


def translate(poly: Sequence[Point], dx: float, dy: float) -> tuple:
    return tuple((x + dx, y + dy) for x, y in poly)


def overlapping_shifts(box_a, box_b, pad: float = 0.0):
    """Integer shifts (i, j) such that box_b + (i, j) overlaps box_a."""
    ax0, ay0, ax1, ay1 = box_a
    bx0, by0, bx1, by1 = box_b
    for i in range(math.floor(ax0 - bx1 - pad), math.ceil(ax1 - bx0 + pad) + 1):
        for j in range(math.floor(ay0 - by1 - pad), math.ceil(ay1 - by0 + pad) + 1):
            yield i, j


def segment_crossings(p: Point, q: Point, poly: Sequence[Point]) -> list:
    """Parameters t in (0, 1) where segment p->q meets an edge of poly."""
    out = []
    dx, dy = q[0] - p[0], q[1] - p[1]
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        den = dx * ey - dy * ex
        if den == 0.0:
            continue
        wx, wy = a[0] - p[0], a[1] - p[1]
        t = (wx * ey - wy * ex) / den
        u = (wx * dy - wy * dx) / den
        if 0.0 < t < 1.0 and -1e-12 <= u <= 1.0 + 1e-12:
            out.append(t)
    return out


def line_intersection(p1: Point, d1: Point, p2: Point, d2: Point):
    """Intersection of lines p1 + s d1 and p2 + u d2 (generic number type)."""
    den = d1[0] * d2[1] - d1[1] * d2[0]
    wx, wy = p2[0] - p1[0], p2[1] - p1[1]
    s = (wx * d2[1] - wy * d2[0]) / den
    return (p1[0] + s * d1[0], p1[1] + s * d1[1])


def rotate_half_turn(poly: Sequence[Point], cx, cy) -> tuple:
    return tuple((2 * cx - x, 2 * cy - y) for x, y in poly)
