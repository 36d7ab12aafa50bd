"""Return-time partitions, named points, special quadrilaterals and the
epsilon-branch regions bounded by the curves omega, zeta, alpha, beta.

Regions are stored as simple polygons in the lifted plane (vertices may sit
outside the unit chart, e.g. the parallelogram A1). Membership of a torus
point is tested against integer translates of the lifted polygon.

Writing t for the fold parameter (t = eta, or t = 1/2 - eps), the backward
return partition of A = [0,1] x [0,1-t] is

* A2: the triangle (0,0), (t,0), (1-t,1-2t) and its half-turn image,
* A3: the parallelogram (0,0), (1-t,1-2t), (1,1-t), (t,t),
* A1: the remaining parallelogram between the lines y = x - t and y = x - 1.

The forward partition of H(A) is the image of the backward one under the
time-reversing involution S(x, y) = (x, x - y + 1 - t), which conjugates H
to its inverse.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from . import geometry as geo
from .geometry import Affine, Undecided
from .interval import IScalar, as_interval, sqrt
from .map_family import (
    BWD,
    EPS,
    ETA,
    FWD,
    Mat2,
    Params,
    TorusPoint,
    fold_of,
    lift_forward,
    lift_inverse,
    reduce_unit,
    shear_slopes,
)


class UnknownPoint(KeyError):
    pass


class MissingCurveData(FileNotFoundError):
    pass


# ---------------------------------------------------------------------------
# affine pieces of the lifted map
# ---------------------------------------------------------------------------

def forward_piece(rising: bool, band: int, eta) -> Affine:
    """Lifted H on the horizontal band ``band`` (rising or falling tent piece)."""
    s_up, s_down = shear_slopes(eta)
    if rising:
        return Affine(Mat2(1, s_up, 1, 1 + s_up), (-s_up * band, -s_up * band))
    k = (band + 1) / eta
    return Affine(Mat2(1, s_down, 1, 1 + s_down), (k, k))


def backward_piece(rising: bool, band: int, eta) -> Affine:
    """Lifted H^-1 on the diagonal band ``band`` of y - x."""
    s_up, s_down = shear_slopes(eta)
    if rising:
        return Affine(Mat2(1 + s_up, -s_up, -1, 1), (s_up * band, 0 * s_up))
    return Affine(Mat2(1 + s_down, -s_down, -1, 1), (-(band + 1) / eta, 0 * s_down))


def piece(direction: str, rising: bool, band: int, eta) -> Affine:
    return forward_piece(rising, band, eta) if direction == FWD else backward_piece(rising, band, eta)


def involution(eta) -> Affine:
    """S(x, y) = (x, x - y + 1 - eta); S H S = H^-1."""
    return Affine(Mat2(1, 0, 1, -1), (0 * eta, 1 - eta))


# ---------------------------------------------------------------------------
# torus label polygons
# ---------------------------------------------------------------------------

def label_polygons(t: float, direction: str) -> dict:
    """Convex lifted polygons of the itinerary labels.

    Returns ``{label: (polygon, rising, band_of_shift)}`` where
    ``band_of_shift(i, j)`` gives the tent band used by the map on the
    translate of the polygon by (i, j).
    """
    if direction == FWD:
        return {
            "A": (((0, 0), (1, 0), (1, 1 - t), (0, 1 - t)), True, lambda i, j: j),
            "B": (((0, 1 - t), (1 - t, 1 - t), (1, 1), (t, 1)), False, lambda i, j: j),
            "C": (((1 - t, 1 - t), (1, 1 - t), (1 + t, 1), (1, 1)), False, lambda i, j: j),
        }
    return {
        "a": (((0, 0), (1, 1), (1, 2 - t), (0, 1 - t)), True, lambda i, j: j - i),
        "b": (((0, 0), (t, 0), (1, 1 - t), (1 - t, 1 - t)), False, lambda i, j: j - i - 1),
        "c": (((1 - t, 1 - t), (1, 1 - t), (1 + t, 1), (1, 1)), False, lambda i, j: j - i - 1),
    }


@lru_cache(maxsize=256)
def _torus_pieces(t: float, direction: str) -> tuple:
    """Label polygons split further by membership of A (bwd) or H(A) (fwd)."""
    labels = label_polygons(t, direction)
    home = label_polygons(t, BWD if direction == FWD else FWD)
    target = home["a"][0] if direction == FWD else home["A"][0]
    out = []
    for sym, (poly, rising, band_of) in labels.items():
        poly = geo.ccw(poly)
        for i, j in geo.overlapping_shifts(geo.bbox(poly), geo.bbox(target)):
            inside = geo.clip_convex(poly, geo.ccw(geo.translate(target, i, j)))
            if len(inside) >= 3 and abs(geo.signed_area(inside)) > 1e-15:
                out.append((tuple(inside), sym, True, rising, band_of))
        rest = [poly]
        for i, j in geo.overlapping_shifts(geo.bbox(poly), geo.bbox(target)):
            tr = geo.ccw(geo.translate(target, i, j))
            new_rest = []
            for r in rest:
                new_rest.extend(_convex_difference(r, tr))
            rest = new_rest
        for r in rest:
            if len(r) >= 3 and abs(geo.signed_area(r)) > 1e-15:
                out.append((tuple(r), sym, False, rising, band_of))
    return tuple(out)


def _convex_difference(subject, clip) -> list:
    """subject minus convex clip, as a list of convex pieces."""
    out = []
    current = list(subject)
    n = len(clip)
    for k in range(n):
        a, b = clip[k], clip[(k + 1) % n]
        outside = geo.clip_halfplane(current, b, a)
        if len(outside) >= 3 and abs(geo.signed_area(outside)) > 1e-15:
            out.append(outside)
        current = geo.clip_halfplane(current, a, b)
        if len(current) < 3:
            break
    return out


@dataclass
class Cell:
    """Polygon of starting points sharing one itinerary, with the lifted affine
    map taking them to their current position."""

    poly: tuple
    image: tuple
    to_image: Affine
    word: str = ""
    returns: list = field(default_factory=list)
    branch: tuple = ()


def refine(cells: list, t: float, direction: str) -> list:
    """Split every cell by the current label and apply one step of the map."""
    pieces = _torus_pieces(t, direction)
    out = []
    for cell in cells:
        bb = geo.bbox(cell.image)
        inv = cell.to_image.inverse()
        for poly, sym, home, rising, band_of in pieces:
            for i, j in geo.overlapping_shifts(bb, geo.bbox(poly)):
                part = geo.clip_convex(cell.image, geo.translate(poly, i, j))
                if len(part) < 3 or abs(geo.signed_area(part)) < 1e-16:
                    continue
                step = piece(direction, rising, band_of(i, j), t)
                new_map = cell.to_image.then(step)
                img = [step(p) for p in part]
                cx, cy = geo.centroid(img)
                sx, sy = -math.floor(cx), -math.floor(cy)
                new_map = new_map.then(Affine.shift(sx, sy))
                img = tuple((x + sx, y + sy) for x, y in img)
                orig = tuple(inv(p) for p in part)
                out.append(
                    Cell(
                        orig,
                        img,
                        new_map,
                        cell.word + sym,
                        cell.returns + [home],
                        cell.branch + ((rising, band_of(i, j), sx, sy),),
                    )
                )
    return out


def itinerary_cells(poly: Sequence, t: float, direction: str, steps: int) -> list:
    """Partition ``poly`` by its ``steps``-step itinerary."""
    cells = [Cell(geo.ccw(poly), geo.ccw(poly), Affine.identity())]
    for _ in range(steps):
        cells = refine(cells, t, direction)
    return cells


def return_cells(poly: Sequence, t: float, direction: str, max_steps: int = 6) -> list:
    """Cells of ``poly`` labelled by first return time to A (bwd) or H(A) (fwd).

    ``returns[k]`` records whether the point at step k lies in the home
    region; the image after the final step is classified by the label of the
    next step, so the return time is the first k >= 1 with ``returns[k]``.
    """
    cells = [Cell(geo.ccw(poly), geo.ccw(poly), Affine.identity())]
    done = []
    for _ in range(max_steps + 1):
        cells = refine(cells, t, direction)
        nxt = []
        for c in cells:
            if len(c.returns) > 1 and c.returns[-1]:
                done.append(c)
            else:
                nxt.append(c)
        cells = nxt
        if not cells:
            break
    return done


# ---------------------------------------------------------------------------
# lifted lines, composite branches and vertex recipes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LineRef:
    """Lifted line ``y = c`` (kind ``"h"``) or ``y - x = c`` (kind ``"d"``),
    with ``c = n + m * t`` for the fold parameter t."""

    kind: str
    n: int
    m: int = 0

    def constant(self, t):
        return self.n + self.m * t

    def geometry(self, t) -> tuple:
        c = self.constant(t)
        direction = (1, 0) if self.kind == "h" else (1, 1)
        return (0 * t, c), direction

    def value_at(self, p) -> float:
        return p[1] if self.kind == "h" else p[1] - p[0]


def compose(direction: str, word: Sequence, t) -> Affine:
    """Lifted branch of H^k (or H^-k) following ``word = ((rising, band), ...)``."""
    out = Affine(Mat2(1 + 0 * t, 0 * t, 0 * t, 1 + 0 * t), (0 * t, 0 * t))
    for rising, band in word:
        out = out.then(piece(direction, rising, band, t))
    return out


def branch_word(p, t: float, direction: str, steps: int) -> tuple:
    """(rising, band) sequence of the lifted orbit of ``p``."""
    out = []
    x, y = p
    for _ in range(steps):
        u = y if direction == FWD else y - x
        band = math.floor(u)
        out.append((u - band < 1.0 - t, band))
        x, y = (lift_forward if direction == FWD else lift_inverse)(x, y, t)
    return tuple(out)


@dataclass(frozen=True)
class VertexRecipe:
    """A point on ``source`` whose image under the prefix ``word`` lies on
    ``line``; it is carried to its image by the branch ``image_word``."""

    source: LineRef
    word: tuple
    line: LineRef
    image_word: tuple

    def point(self, direction: str, t):
        p0, d0 = self.source.geometry(t)
        inv = compose(direction, self.word, t).inverse()
        p1, d1 = self.line.geometry(t)
        return geo.line_intersection(p0, d0, inv(p1), inv.m @ d1)

    def image(self, direction: str, t, shift=(0, 0)):
        q = compose(direction, self.image_word, t)(self.point(direction, t))
        return (q[0] + shift[0], q[1] + shift[1])


@dataclass(frozen=True)
class Breakpoint:
    s: float
    step: int
    line: LineRef


def trace_segment(a, b, t: float, direction: str, steps: int) -> tuple[list, list]:
    """Push the lifted segment a -> b through ``steps`` iterates.

    Returns the image chain as ``[(s, point), ...]`` (s is the parameter on
    the source segment) and the breakpoints where some intermediate image
    crosses a singular line of the map.
    """
    step_map = lift_forward if direction == FWD else lift_inverse
    kind = "h" if direction == FWD else "d"
    cur = [(0.0, tuple(a)), (1.0, tuple(b))]
    events = []
    for j in range(steps):
        new = [cur[0]]
        for (s0, p), (s1, q) in zip(cur, cur[1:]):
            va = p[1] if kind == "h" else p[1] - p[0]
            vb = q[1] if kind == "h" else q[1] - q[0]
            if va != vb:
                lo, hi = min(va, vb), max(va, vb)
                hits = []
                for n in range(math.floor(lo) - 1, math.ceil(hi) + 1):
                    for line in (LineRef(kind, n), LineRef(kind, n + 1, -1)):
                        c = line.constant(t)
                        if lo < c < hi:
                            hits.append(((c - va) / (vb - va), line))
                for u, line in sorted(hits, key=lambda h: h[0]):
                    pt = (p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1]))
                    s = s0 + u * (s1 - s0)
                    new.append((s, pt))
                    events.append(Breakpoint(s, j, line))
            new.append((s1, q))
        cur = [(s, step_map(x, y, t)) for s, (x, y) in new]
    return cur, sorted(events, key=lambda e: e.s)


# ---------------------------------------------------------------------------
# polygons as regions
# ---------------------------------------------------------------------------

def _mid(v) -> float:
    return v.mid() if isinstance(v, IScalar) else float(v)


def _fpoint(p) -> tuple[float, float]:
    return (_mid(p[0]), _mid(p[1]))


@dataclass(frozen=True)
class PolyRegion:
    """Labelled polygon; ``lift`` holds its vertices in the lifted plane
    (interval or float coordinates), counter-clockwise."""

    label: str
    lift: tuple
    return_time: int
    itinerary_block: str
    part: str = ""

    @property
    def vertices(self) -> tuple:
        return tuple(TorusPoint(*_fpoint(p)) for p in self.lift)

    def float_lift(self) -> tuple:
        return tuple(_fpoint(p) for p in self.lift)

    def area(self) -> float:
        return abs(geo.signed_area(self.float_lift()))

    def contains(self, p, tol: float = geo.EDGE_TOL) -> Optional[bool]:
        """Membership of a torus point; None when it sits on the boundary."""
        poly = self.float_lift()
        x, y = (p.x, p.y) if isinstance(p, TorusPoint) else p
        x0, y0, x1, y1 = geo.bbox(poly)
        undecided = False
        for i in range(math.floor(x0 - x) - 1, math.ceil(x1 - x) + 1):
            for j in range(math.floor(y0 - y) - 1, math.ceil(y1 - y) + 1):
                hit = geo.point_in_polygon((x + i, y + j), poly, tol)
                if hit:
                    return True
                undecided |= hit is None
        return None if undecided else False

    def sample(self, rng, n: int) -> list:
        """``n`` uniform interior points of the lifted polygon."""
        poly = self.float_lift()
        x0, y0, x1, y1 = geo.bbox(poly)
        out = []
        while len(out) < n:
            p = (x0 + (x1 - x0) * rng.random(), y0 + (y1 - y0) * rng.random())
            if geo.point_in_polygon(p, poly, 1e-9):
                out.append(p)
        return out


def _ccw_generic(poly: Sequence) -> tuple:
    return tuple(poly) if geo.signed_area([_fpoint(p) for p in poly]) >= 0 else tuple(reversed(poly))


def _fold(params: Params):
    return params.eta


def half_turn_backward(p, t):
    """Half-turn about the centre of A, a symmetry of the backward partition."""
    return (1 - p[0], 1 - t - p[1])


def half_turn_forward(p, t):
    """Half-turn about (1/2, 1 - t/2), a symmetry of the forward partition."""
    return (1 - p[0], 2 - t - p[1])


def _backward_pieces(t) -> list:
    lower = ((0 * t, 0 * t), (t, 0 * t), (1 - t, 1 - 2 * t))
    upper = tuple(half_turn_backward(p, t) for p in lower)
    return [
        ("A1", ((t, 0 * t), (1 + 0 * t, 0 * t), (2 - t, 1 - t), (1 + 0 * t, 1 - t)), 1, "a", ""),
        ("A2", lower, 2, "ba", "lower"),
        ("A2", upper, 2, "ba", "upper"),
        ("A3", ((0 * t, 0 * t), (1 - t, 1 - 2 * t), (1 + 0 * t, 1 - t), (t, t)), 3, "bca", ""),
    ]


FORWARD_LABEL = {"A1": "a1", "A2": "a2", "A3": "a3", "A4": "a4", "A5": "a5"}
FORWARD_BLOCK = {"a": "A", "ba": "BA", "bca": "BCA", "baa": "BAA"}


def return_partition(domain: str, params: Params) -> list:
    """Return-time partition of A (``"backward_A"``) or of H(A) (``"forward_frak_a"``)."""
    t = _fold(params)
    pieces = _backward_pieces(t)
    if domain == "backward_A":
        return [PolyRegion(lab, _ccw_generic(poly), rt, blk, part) for lab, poly, rt, blk, part in pieces]
    if domain == "forward_frak_a":
        s = involution(t)
        return [
            PolyRegion(FORWARD_LABEL[lab], _ccw_generic([s(p) for p in poly]), rt, FORWARD_BLOCK[blk], part)
            for lab, poly, rt, blk, part in pieces
        ]
    raise ValueError(f"unknown domain {domain!r}")


def a2_subdivision(params: Params) -> tuple[list, list]:
    """Split A2 into A4 (block baa) and A5 (block ba), lower and upper parts.

    The small triangle near (1/2 - eps, 0) whose points would also qualify
    for A4 is kept inside A5, as the growth argument allows.
    """
    if params.branch != EPS:
        raise ValueError("the A4/A5 subdivision is defined on the epsilon branch")
    t = _fold(params)
    q1 = named_point("Q1", params).coords
    q2 = named_point("Q2", params).coords
    a4 = ((0 * t, 0 * t), q1, q2, (1 - t, 1 - 2 * t))
    a5 = (q1, (t, 0 * t), q2)
    out4 = [PolyRegion("A4", _ccw_generic(a4), 2, "baa", "lower"),
            PolyRegion("A4", _ccw_generic([half_turn_backward(p, t) for p in a4]), 2, "baa", "upper")]
    out5 = [PolyRegion("A5", _ccw_generic(a5), 2, "ba", "lower"),
            PolyRegion("A5", _ccw_generic([half_turn_backward(p, t) for p in a5]), 2, "ba", "upper")]
    return out4, out5


def region_at(p, params: Params, domain: str = "backward_A") -> Optional[PolyRegion]:
    """Partition element containing a torus point (None off the domain)."""
    for region in return_partition(domain, params):
        if region.contains(p):
            return region
    return None


# ---------------------------------------------------------------------------
# named points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NamedPoint:
    """Closed-form point with the lines ``a x + b y = c`` that define it."""

    id: str
    coords: tuple
    lines: tuple = ()

    def residuals(self) -> list:
        x, y = self.coords
        return [a * x + b * y - c for a, b, c in self.lines]


ETA_POINTS = ("R1", "R2", "R3", "R4", "R1p", "r1", "r2", "r3", "r4", "r1p",
              "xstar", "xprime", "xstar_b", "xprime_b")
EPS_POINTS = ("Q1", "Q2", "Q3", "Q3p")


def k1_of(e):
    """Gradient of the segment L1 joining Q1 and Q2."""
    return (12 * e * e + 16 * e + 1) / ((2 * e + 1) * (2 * e + 5))


def k2_of(e):
    """Gradient of the A4/A3 boundary."""
    return 4 * e / (2 * e + 1)


def k5_of(e):
    """Unstable gradient of MF2 in closed form."""
    from .interval import sqrt as isqrt

    return (e - isqrt(e * (4 * e * e + 5 * e + 1))) / (2 * e + 1)


def q1_x(e):
    return (-4 * e ** 3 - 2 * e ** 2 + e + 0.5) / (12 * e ** 2 + 16 * e + 1)


def x_star_forward(t, g):
    """x-range bound of L* for the forward argument; g is the cone gradient."""
    return t * g / (g - t / (1 - t))


def x_star_backward(t, g):
    return (t * t - 3 * t + 1 - g * (1 - t) ** 2) / (1 - 2 * t - g * (1 - t))


def x_prime_forward(t):
    return (-t * t + 2 * t - 1) / (t * (2 * t - 3))


def x_prime_backward(t):
    return (3 * t * t - 5 * t + 1) / (t * (2 * t - 3))


def _eta_point(pid: str, t):
    one, zero = 1 + 0 * t, 0 * t
    d1 = 3 * t ** 2 - 10 * t + 8
    d2 = t ** 2 - 7 * t + 8
    d3 = 4 * t ** 3 - 18 * t ** 2 + 23 * t - 8
    top = ((zero, one, one),)
    left = ((one, zero, zero),)
    diag = ((-one, one, zero),)
    shelf = ((zero, one, 1 - t),)
    # forward a2/a3 boundary: y = 1 - t + x t/(1-t); backward A2/A3 (upper) boundary
    fwd_ramp = ((-t / (1 - t), one, 1 - t),)
    bwd_ramp = ((-(1 - 2 * t) / (1 - t), one, t - t * (1 - 2 * t) / (1 - t)),)
    if pid == "R1":
        return ((-t ** 3 + 7 * t ** 2 - 13 * t + 7) / d1, one), top
    if pid == "R2":
        return (2 * (2 * t ** 2 - 5 * t + 3) / d1, one), top
    if pid == "R3":
        return (zero, (5 * t ** 2 - 13 * t + 8) / d2), left
    if pid == "R4":
        return (zero, (-t ** 3 + 7 * t ** 2 - 14 * t + 8) / d2), left
    if pid in ("R1p", "xprime"):
        return (x_prime_forward(t), (-2 * t ** 2 + 6 * t - 4) / (2 * t - 3)), fwd_ramp
    if pid == "r1":
        v = (t ** 3 - 4 * t ** 2 + 3 * t + 1) / d1
        return (v, v), diag
    if pid == "r2":
        return ((5 * t ** 3 - 20 * t ** 2 + 24 * t - 8) / d3, 1 - t), shelf
    if pid == "r3":
        return ((-t ** 4 + 8 * t ** 3 - 23 * t ** 2 + 25 * t - 8) / d3, 1 - t), shelf
    if pid == "r4":
        v = (2 - t ** 2) / d1
        return (v, v), diag
    if pid in ("r1p", "xprime_b"):
        return (x_prime_backward(t), (-2 * t ** 3 + 7 * t ** 2 - 6 * t + 1) / (t * (2 * t - 3))), bwd_ramp
    raise UnknownPoint(pid)


def named_point(pid: str, params: Params) -> NamedPoint:
    """Interval enclosure of a named corner or crossing point."""
    if params.branch == ETA:
        if pid not in ETA_POINTS:
            raise UnknownPoint(f"{pid!r} is not defined on the eta branch")
        t = params.value
        if pid == "xstar":
            from .cone_engine import eigen_gradient

            g = eigen_gradient("M3", ETA, t)
            x = x_star_forward(t, g)
            lines = ((-t / (1 - t), 1 + 0 * t, 1 - t), (-g, 1 + 0 * t, 1 - t - g * t))
            return NamedPoint(pid, (x, 1 - t + x * t / (1 - t)), lines)
        if pid == "xstar_b":
            from .cone_engine import eigen_gradient

            g = eigen_gradient("MF3", ETA, t)
            x = x_star_backward(t, g)
            ramp = -(1 - 2 * t) / (1 - t)
            lines = ((ramp, 1 + 0 * t, t + ramp * t), (-g, 1 + 0 * t, 1 - 2 * t - g * (1 - t)))
            return NamedPoint(pid, (x, 1 - 2 * t + g * (x - 1 + t)), lines)
        coords, lines = _eta_point(pid, t)
        return NamedPoint(pid, coords, lines)
    if pid not in EPS_POINTS:
        raise UnknownPoint(f"{pid!r} is not defined on the epsilon branch")
    e = params.value
    t = 0.5 - e
    one, zero = 1 + 0 * e, 0 * e
    k1 = k1_of(e)
    x0 = q1_x(e)
    on_l1 = (-k1, one, -k1 * x0)
    if pid == "Q1":
        return NamedPoint(pid, (x0, zero), ((zero, one, zero), on_l1))
    if pid == "Q2":
        return NamedPoint(pid, ((1 + 2 * e) / (2 + 2 * e), (3 * e + 2 * e * e) / (2 + 2 * e)),
                          (on_l1, (-one, one, -t)))
    if pid == "Q3":
        k5 = k5_of(e)
    else:
        from .inequality_verifier import k5_plus

        k5 = k5_plus()
    x = (k1 * x0 - k5 * t) / (k1 - k5)
    return NamedPoint(pid, (x, k1 * (x - x0)), (on_l1, (-k5, one, -k5 * t)))


# ---------------------------------------------------------------------------
# special quadrilaterals
# ---------------------------------------------------------------------------

ETA0 = 1.0 - 1.0 / math.sqrt(2.0)

# Q3 in A3: the strip whose lifted orbit under H^-5 follows this branch and
# lands in A1 shifted by (-3, 2). Its short sides lie on y = x and
# y = x - t, its long sides on the preimages of the sloping sides of A1.
Q3_WORD = ((False, -1), (False, -1), (True, 0), (True, 1), (True, 2))
Q3_SHIFT = (3, -2)
Q3_RECIPES = (
    VertexRecipe(LineRef("d", 0), Q3_WORD, LineRef("d", 4), Q3_WORD),
    VertexRecipe(LineRef("d", 0, -1), Q3_WORD, LineRef("d", 4), Q3_WORD),
    VertexRecipe(LineRef("d", 0, -1), Q3_WORD, LineRef("d", 5, -1), Q3_WORD),
    VertexRecipe(LineRef("d", 0), Q3_WORD, LineRef("d", 5, -1), Q3_WORD),
)


@dataclass(frozen=True)
class SpecialQuad:
    """Quadrilateral whose image under ``power`` iterates spans A1.

    ``long_sides`` index the two sides mapped onto opposite boundaries of
    A1: its lower/upper boundary when ``spans == "v"``, its sloping sides
    when ``spans == "h"``.
    """

    name: str
    corners: tuple
    power: int
    direction: str
    host: str
    long_sides: tuple
    spans: str

    def float_corners(self) -> tuple:
        return tuple(_fpoint(p) for p in self.corners)


def _q3_backward(t) -> tuple:
    return tuple(r.point(BWD, t) for r in Q3_RECIPES)


def quads_at(t, below_eta0: bool) -> list:
    """The quadrilaterals for any number type of the fold parameter ``t``
    (Fraction values give exact corners)."""
    pt = lambda pid: _eta_point(pid, t)[0]  # noqa: E731
    out = []
    q3 = _q3_backward(t)
    s = involution(t)
    out.append(SpecialQuad("Q3_forward", tuple(s(p) for p in q3), 5, FWD, "a3", ((0, 1), (2, 3)), "v"))

    fwd2 = (pt("R1") if below_eta0 else pt("R1p"), pt("R2"), pt("R3"), pt("R4"))
    name = "Q2_forward" if below_eta0 else "Q2p_forward"
    out.append(SpecialQuad(name, fwd2, 3, FWD, "a2", ((1, 2), (3, 0)), "v"))
    out.append(SpecialQuad(name + "_mirror", tuple(half_turn_forward(p, t) for p in fwd2), 3, FWD, "a2",
                           ((1, 2), (3, 0)), "v"))

    out.append(SpecialQuad("Q3_backward", q3, 5, BWD, "A3", ((0, 1), (2, 3)), "h"))
    bwd2 = (pt("r1") if below_eta0 else pt("r1p"), pt("r2"), pt("r3"), pt("r4"))
    name = "Q2_backward" if below_eta0 else "Q2p_backward"
    out.append(SpecialQuad(name, bwd2, 3, BWD, "A2", ((0, 1), (2, 3)), "h"))
    out.append(SpecialQuad(name + "_mirror", tuple(half_turn_backward(p, t) for p in bwd2), 3, BWD, "A2",
                           ((0, 1), (2, 3)), "h"))
    return out


def special_quads(params: Params) -> list:
    """The eta-branch quadrilaterals with their iterate counts.

    The primed variants Q2p (corner R1p or r1p) replace Q2 when eta > eta0.
    """
    if params.branch != ETA:
        raise ValueError("special quadrilaterals are defined on the eta branch")
    v = params.value
    if v.lo <= ETA0 < v.hi:
        raise ValueError("parameter interval straddles eta0; split it")
    return quads_at(v, v.hi <= ETA0)


def a1_lift(t) -> tuple:
    return ((t, 0 * t), (1 + 0 * t, 0 * t), (2 - t, 1 - t), (1 + 0 * t, 1 - t))


def a1_boundary(t) -> dict:
    """Lines bounding the base lift of A1 as LineRef objects."""
    return {
        "lower": LineRef("h", 0),
        "upper": LineRef("h", 1, -1),
        "left": LineRef("d", 0, -1),
        "right": LineRef("d", -1),
    }


def push_forward_branch(points: Sequence, interior, t_float: float, t, direction: str, steps: int):
    """Carry ``points`` along the lifted branch followed by ``interior``.

    The image is translated so that the image of ``interior`` lies in the
    base lift of A1 (when it lies in some translate). Returns
    ``(images, word)``.
    """
    word = branch_word(interior, t_float, direction, steps)
    branch = compose(direction, word, t)
    ix, iy = compose(direction, word, t_float)(interior)
    poly = a1_lift(t_float)
    shift = (0, 0)
    for i in range(math.floor(ix) - 3, math.floor(ix) + 3):
        for j in range(math.floor(iy) - 3, math.floor(iy) + 3):
            if geo.point_in_polygon((ix - i, iy - j), poly, 0.0):
                shift = (i, j)
    images = []
    for p in points:
        x, y = branch(p)
        images.append((x - shift[0], y - shift[1]))
    return images, word


# ---------------------------------------------------------------------------
# epsilon-branch regions bounded by omega, zeta, alpha, beta
# ---------------------------------------------------------------------------

# omega and zeta are the parts of H^4 of A1's right and left sloping sides
# that cross frak_b from y = 0 to y = 1 - t, translated by (-3, -11).
_W_TOP = ((True, 0), (True, 2), (True, 4), (False, 7))
_W_MID = ((True, 0), (True, 2), (False, 4), (False, 7))
_W_LOW = ((True, 0), (True, 2), (True, 5), (False, 7))
CURVE_SHIFT = (-3, -11)


def _side_recipes(source: LineRef) -> tuple:
    # listed with x increasing along the image
    return (
        VertexRecipe(source, _W_LOW, LineRef("h", 11), _W_LOW),
        VertexRecipe(source, _W_LOW[:2], LineRef("h", 5), _W_LOW),
        VertexRecipe(source, _W_MID[:2], LineRef("h", 5, -1), _W_MID),
        VertexRecipe(source, _W_TOP, LineRef("h", 12, -1), _W_TOP),
    )


CURVE_RECIPES = {
    "omega": _side_recipes(LineRef("d", -1)),
    "zeta": _side_recipes(LineRef("d", 0, -1)),
}


@dataclass(frozen=True)
class BoundaryCurve:
    """Four-vertex piecewise-linear chain, x increasing with the index."""

    id: str
    vertices: tuple

    def float_vertices(self) -> tuple:
        return tuple(_fpoint(p) for p in self.vertices)


def _number(v):
    return as_interval(v) if isinstance(v, (int, float)) else v


def derive_curves(eps) -> dict:
    """omega, zeta, alpha, beta evaluated from their branch recipes (any
    number type; floats are promoted to intervals)."""
    e = _number(eps)
    t = 0.5 - e
    out = {name: BoundaryCurve(name, tuple(r.image(FWD, t, CURVE_SHIFT) for r in recipes))
           for name, recipes in CURVE_RECIPES.items()}
    s = involution(t)
    out["alpha"] = BoundaryCurve("alpha", tuple(s(p) for p in out["zeta"].vertices))
    out["beta"] = BoundaryCurve("beta", tuple(s(p) for p in out["omega"].vertices))
    return out


def curve_preimage_corners(eps) -> dict:
    """End points of omega and zeta pulled back by H^-4 onto A1's sloping sides."""
    e = _number(eps)
    t = 0.5 - e
    return {name: (recipes[0].point(FWD, t), recipes[-1].point(FWD, t))
            for name, recipes in CURVE_RECIPES.items()}


# curve data file -----------------------------------------------------------

CURVE_FILE = "boundary_curves.csv"


def _poly_eval(coeffs: Sequence, x):
    acc = 0 * x
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _parse_poly(text: str) -> tuple:
    return tuple(int(tok) for tok in text.split())


@dataclass(frozen=True)
class CurveTable:
    """Rows ``(curve, index) -> (x_num, x_den, y_num, y_den)``; every
    coordinate is a ratio of integer polynomials in eps (ascending powers)."""

    rows: dict
    source: str = ""

    def curve(self, name: str, eps) -> BoundaryCurve:
        e = _number(eps)
        keys = sorted(k for k in self.rows if k[0] == name)
        if not keys:
            raise MissingCurveData(f"no rows for curve {name!r} in {self.source}")
        verts = []
        for key in keys:
            xn, xd, yn, yd = self.rows[key]
            verts.append((_poly_eval(xn, e) / _poly_eval(xd, e), _poly_eval(yn, e) / _poly_eval(yd, e)))
        return BoundaryCurve(name, tuple(verts))


def parse_curve_table(text: str, source: str = "") -> CurveTable:
    rows = {}
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    for rec in csv.reader(lines):
        rec = [f.strip() for f in rec]
        if rec[0] == "curve":
            continue
        if len(rec) != 6:
            raise ValueError(f"malformed curve row {rec!r}")
        name, idx = rec[0], int(rec[1])
        rows[(name, idx)] = tuple(_parse_poly(f) for f in rec[2:])
    return CurveTable(rows, source)


def load_curve_data(path=None) -> CurveTable:
    """Read the omega/zeta/alpha/beta table (the packaged copy by default)."""
    if path is None:
        ref = resources.files("conemix").joinpath("data", CURVE_FILE)
        if not ref.is_file():
            raise MissingCurveData(f"packaged {CURVE_FILE} not found")
        return parse_curve_table(ref.read_text(encoding="utf-8"), str(ref))
    path = Path(path)
    if not path.is_file():
        raise MissingCurveData(f"curve data file {path} not found")
    return parse_curve_table(path.read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class EpsRegion:
    """Region between two boundary curves, spanning its host from edge to edge."""

    label: str
    host: str
    curves: tuple
    polygon: tuple
    power: int
    direction: str

    def float_polygon(self) -> tuple:
        return tuple(_fpoint(p) for p in self.polygon)


def frak_b_lift(t) -> tuple:
    return ((0 * t, 0 * t), (t, 0 * t), (1 + 0 * t, 1 - t), (1 - t, 1 - t))


def region_b_lift(t) -> tuple:
    return ((0 * t, 1 - t), (1 - t, 1 - t), (1 + 0 * t, 1 + 0 * t), (t, 1 + 0 * t))


def eps_regions(params: Params, curve_data=None) -> tuple[EpsRegion, EpsRegion]:
    """frak_D inside frak_b (bounded by omega, zeta) and D inside B (alpha, beta).

    ``curve_data`` is a :class:`CurveTable`, a path, or None for the packaged
    table; alpha and beta are read from the table as well.
    """
    if params.branch != EPS:
        raise ValueError("the regions frak_D and D are defined on the epsilon branch")
    table = curve_data if isinstance(curve_data, CurveTable) else load_curve_data(curve_data)
    e = params.value
    omega, zeta = table.curve("omega", e), table.curve("zeta", e)
    alpha, beta = table.curve("alpha", e), table.curve("beta", e)
    frak_d = tuple(omega.vertices) + tuple(reversed(zeta.vertices))
    d = tuple(beta.vertices) + tuple(reversed(alpha.vertices))
    return (
        EpsRegion("frakD", "b", (omega, zeta), _ccw_generic(frak_d), 4, BWD),
        EpsRegion("D", "B", (alpha, beta), _ccw_generic(d), 4, FWD),
    )


def chain_inside(chain: Sequence, host: Sequence, tol: float = 0.0) -> bool:
    """Whether every vertex of a chain lies in the closed convex host polygon."""
    host = geo.ccw(host)
    n = len(host)
    for p in chain:
        for k in range(n):
            if geo.cross(host[k], host[(k + 1) % n], p) < -tol:
                return False
    return True
