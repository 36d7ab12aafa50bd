"""Growth of cone-aligned piecewise linear curves until they produce an
h-segment (backward time) or a v-segment (forward time) inside A1.

Curves live in the lifted plane; region membership is tested against
integer translates of the lifted partition polygons, so a curve may run
across the edges of the unit chart. Backward growth happens in A and
measures diameters on the x-axis; forward growth happens in H(A) and
measures them on the y-axis. On both minimal cones this projection is the
sup norm, which is the norm the expansion factors K_j are computed in.

Selection rule. Given the shares s_i = diam(Γ ∩ E_i) / diam(Γ) of the
partition elements a curve meets, a growth step expands the piece with the
largest certified lower bound K_i s_i (on the epsilon branch the A3 ∪ A4
piece under three iterates counts as one candidate with bound
K3 s3 + K4 s4). Since the shares sum to one, the best candidate always
reaches the harmonic bound 1 / Σ 1/K_i, and this exceeds one exactly
when the certified growth inequalities hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from . import geometry as geo
from .cone_engine import eigen_gradient, min_expansion, minimal_cone
from .geometry import Undecided
from .interval import IScalar, as_interval
from .map_family import BWD, EPS, ETA, FWD, Mat2, Params, dh_rising
from .partition_geometry import (
    EpsRegion,
    PolyRegion,
    SpecialQuad,
    a1_lift,
    a2_subdivision,
    branch_word,
    compose,
    eps_regions,
    involution,
    return_partition,
    special_quads,
    trace_segment,
)

MAX_VERTICES = 10_000
PIECE_TOL = 1e-12
SIDE_TOL = 1e-9
# Images of boundary points after up to five iterates carry float errors of
# order 1e-9 near eta = 0.05 (H^-1 stretches transversally by up to 1/eta).
SEGMENT_TOL = 1e-7
CONE_TOL = 1e-9
JOIN_TOL = 1e-9
RETRY_SHRINK = 2.0 ** -20
MAX_RETRIES = 3

HSEG, VSEG, MAX_ITERS = "HSegment", "VSegment", "MaxIters"


class NonSimple(ValueError):
    """The curve meets a partition element in more than one component."""

    def __init__(self, element: str, count: int):
        super().__init__(f"curve meets {element} in {count} components")
        self.element = element
        self.count = count


class PreconditionViolated(ValueError):
    pass


class NotApplicable(ValueError):
    pass


class SegmentNotFound(RuntimeError):
    """A non-simple curve whose images under the allowed iterates contain no
    h- or v-segment; this would contradict the segment lemma."""


class CurveTooLong(RuntimeError):
    pass


Point = tuple[float, float]


def _axis_index(axis: str) -> int:
    if axis not in ("x", "y"):
        raise ValueError(f"projection axis must be 'x' or 'y', got {axis!r}")
    return 0 if axis == "x" else 1


def _dedupe(points: Iterable[Point], tol: float = 1e-15) -> list:
    out: list = []
    for p in points:
        p = (float(p[0]), float(p[1]))
        if out and abs(p[0] - out[-1][0]) <= tol and abs(p[1] - out[-1][1]) <= tol:
            continue
        out.append(p)
    return out


@dataclass(frozen=True)
class PLCurve:
    """Piecewise linear curve; with ``strict`` its projection to
    ``proj_axis`` must be strictly monotone (the curve does not double back)."""

    vertices: tuple
    proj_axis: str = "x"
    strict: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        verts = tuple(_dedupe(self.vertices))
        if not verts:
            raise ValueError("a curve needs at least one vertex")
        object.__setattr__(self, "vertices", verts)
        k = _axis_index(self.proj_axis)
        if self.strict and len(verts) > 1:
            steps = [q[k] - p[k] for p, q in zip(verts, verts[1:])]
            if not (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
                raise PreconditionViolated("curve doubles back on its projection axis")

    @classmethod
    def chain(cls, vertices, proj_axis: str = "x") -> "PLCurve":
        """A curve without the monotone-projection requirement."""
        return cls(tuple(vertices), proj_axis, strict=False)

    def edges(self) -> list:
        return list(zip(self.vertices, self.vertices[1:]))

    def reversed(self) -> "PLCurve":
        return PLCurve(tuple(reversed(self.vertices)), self.proj_axis, self.strict)

    def translated(self, dx: float, dy: float) -> "PLCurve":
        return PLCurve(tuple((x + dx, y + dy) for x, y in self.vertices), self.proj_axis, self.strict)

    def gradients(self) -> list:
        out = []
        for p, q in self.edges():
            dx = q[0] - p[0]
            out.append(math.inf if dx == 0 else (q[1] - p[1]) / dx)
        return out

    def point_at(self, s: float) -> Point:
        """Point at global parameter ``s`` (edge index + local fraction)."""
        n = len(self.vertices) - 1
        if n == 0:
            return self.vertices[0]
        k = min(max(int(math.floor(s)), 0), n - 1)
        u = s - k
        p, q = self.vertices[k], self.vertices[k + 1]
        return (p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1]))

    def midpoint(self) -> Point:
        return self.point_at((len(self.vertices) - 1) / 2)

    def to_dict(self) -> dict:
        return {"proj_axis": self.proj_axis, "vertices": [list(p) for p in self.vertices]}


def diameter(curve: PLCurve) -> float:
    """Lebesgue measure of the projection onto the curve's axis."""
    k = _axis_index(curve.proj_axis)
    vals = [p[k] for p in curve.vertices]
    if curve.strict:
        return abs(vals[-1] - vals[0])
    return max(vals) - min(vals)


def edge_diameters(curve: PLCurve) -> list:
    k = _axis_index(curve.proj_axis)
    return [abs(q[k] - p[k]) for p, q in curve.edges()]


# ---------------------------------------------------------------------------
# restriction of a curve to a region of the torus
# ---------------------------------------------------------------------------

def _polygons_of(region) -> list:
    """Float lifted polygons of the many region types used here."""
    if isinstance(region, Element):
        return list(region.polygons)
    if isinstance(region, PolyRegion):
        return [region.float_lift()]
    if isinstance(region, SpecialQuad):
        return [region.float_corners()]
    if isinstance(region, EpsRegion):
        return [region.float_polygon()]
    if isinstance(region, (list, tuple)) and region and not isinstance(region[0][0], (int, float)):
        out = []
        for r in region:
            out.extend(_polygons_of(r))
        return out
    return [tuple((float(x), float(y)) for x, y in region)]


def _edge_pieces(p: Point, q: Point, poly: Sequence[Point], interior_ends: tuple) -> list:
    """Sub-intervals [u0, u1] of the segment p -> q lying inside ``poly``."""
    cuts = sorted(geo.segment_crossings(p, q, poly))
    length = math.hypot(q[0] - p[0], q[1] - p[1])
    for u in cuts:
        if (interior_ends[0] and u * length < PIECE_TOL) or (interior_ends[1] and (1 - u) * length < PIECE_TOL):
            raise Undecided("a curve vertex lies on a region boundary within tolerance")
    knots = [0.0] + cuts + [1.0]
    out = []
    for u0, u1 in zip(knots, knots[1:]):
        if (u1 - u0) * length <= PIECE_TOL:
            continue
        um = 0.5 * (u0 + u1)
        mid = (p[0] + um * (q[0] - p[0]), p[1] + um * (q[1] - p[1]))
        if geo.point_in_polygon(mid, poly, 0.0):
            out.append((u0, u1))
    return out


def _intervals(curve: PLCurve, polygons: Sequence) -> list:
    """Merged parameter intervals of the curve inside the union of the
    polygons and all their integer translates."""
    verts = curve.vertices
    n = len(verts) - 1
    raw = []
    boxes = [geo.bbox(poly) for poly in polygons]
    for k in range(n):
        p, q = verts[k], verts[k + 1]
        ebox = geo.bbox((p, q))
        ends = (k > 0, k < n - 1)
        for poly, box in zip(polygons, boxes):
            for i, j in geo.overlapping_shifts(ebox, box):
                tr = geo.translate(poly, i, j)
                for u0, u1 in _edge_pieces(p, q, tr, ends):
                    raw.append((k + u0, k + u1))
    raw.sort()
    merged: list = []
    for s0, s1 in raw:
        if merged and s0 <= merged[-1][1] + 1e-12:
            merged[-1] = (merged[-1][0], max(merged[-1][1], s1))
        else:
            merged.append((s0, s1))
    return merged


def _sub_curve(curve: PLCurve, s0: float, s1: float) -> PLCurve:
    pts = [curve.point_at(s0)]
    pts.extend(curve.vertices[k] for k in range(int(math.floor(s0)) + 1, int(math.ceil(s1))) if s0 < k < s1)
    pts.append(curve.point_at(s1))
    return PLCurve(tuple(pts), curve.proj_axis, curve.strict)


def _components(curve: PLCurve, polygons: Sequence) -> list:
    out = []
    k = _axis_index(curve.proj_axis)
    for s0, s1 in _intervals(curve, polygons):
        piece = _sub_curve(curve, s0, s1)
        if len(piece.vertices) < 2:
            continue
        ext = max(p[k] for p in piece.vertices) - min(p[k] for p in piece.vertices)
        if ext > PIECE_TOL:
            out.append((s0, s1, piece))
    return out


def intersect(curve: PLCurve, region) -> tuple[list, bool]:
    """Connected components of the curve inside a region of the torus.

    ``region`` may be a partition ``PolyRegion`` (or a list of them, e.g.
    both parts of A2), an :class:`Element`, a special quadrilateral, an
    epsilon-branch region or a raw lifted polygon. Components of zero
    diameter (corner touches) are dropped.
    """
    comps = [c for _, _, c in _components(curve, _polygons_of(region))]
    return comps, len(comps) <= 1


# ---------------------------------------------------------------------------
# growth partitions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Element:
    """A growth element: polygons, iterates until return, block and its
    certified minimal expansion over the minimal cone."""

    name: str
    polygons: tuple
    steps: int
    block: str
    expansion: float


@dataclass(frozen=True)
class GrowthSetup:
    direction: str
    params: Params
    elements: tuple
    sub_elements: tuple
    cone: tuple
    axis: str
    domain: tuple

    def element(self, name: str) -> Element:
        for e in self.elements + self.sub_elements:
            if e.name == name:
                return e
        raise KeyError(name)


def _float_params(params) -> Params:
    return params if isinstance(params, Params) else Params(*params)


@lru_cache(maxsize=64)
def growth_setup(direction: str, params: Params) -> GrowthSetup:
    """Partition elements, expansion bounds and cone for one direction."""
    if direction not in (FWD, BWD):
        raise ValueError(f"direction must be {FWD!r} or {BWD!r}")
    cone = minimal_cone(direction, params)
    prefix = "M" if direction == FWD else "MF"

    def k_of(j: int) -> float:
        return min_expansion(f"{prefix}{j}", cone, params).lo

    t = params.eta_f
    domain = "forward_frak_a" if direction == FWD else "backward_A"
    regions = return_partition(domain, params)
    names = {1: "1", 2: "2", 3: "3"}
    elements = []
    for j in (1, 2, 3):
        polys = tuple(r.float_lift() for r in regions if r.label.endswith(names[j]))
        label = ("a" if direction == FWD else "A") + names[j]
        elements.append(Element(label, polys, j, f"{prefix}{j}", k_of(j)))
    subs = []
    if params.branch == EPS:
        a4, a5 = a2_subdivision(params)
        s = involution(t)
        to_dir = (lambda poly: geo.ccw([s(p) for p in poly])) if direction == FWD else geo.ccw
        lab4, lab5 = ("a4", "a5") if direction == FWD else ("A4", "A5")
        subs.append(Element(lab4, tuple(to_dir(r.float_lift()) for r in a4), 3, f"{prefix}4", k_of(4)))
        subs.append(Element(lab5, tuple(to_dir(r.float_lift()) for r in a5), 2, f"{prefix}2", k_of(2)))
    domain_polys = tuple(p for e in elements for p in e.polygons)
    return GrowthSetup(
        direction,
        params,
        tuple(elements),
        tuple(subs),
        (cone.g_lo.lo, cone.g_hi.hi),
        "y" if direction == FWD else "x",
        domain_polys,
    )


def harmonic(*ks: float) -> float:
    return 1.0 / sum(1.0 / k for k in ks)


def growth_delta(direction: str, params: Params) -> float:
    """Guaranteed growth margin δ at one parameter.

    The minimum over every configuration of elements a simple curve can
    meet of the best candidate bound, minus one. On the epsilon branch the
    configuration running through A5 and A4 into A3 uses the A4 share bound
    𝓑1 (scaled by the cone's gradient ratio for y-projections).
    """
    setup = growth_setup(direction, params)
    k1, k2, k3 = (e.expansion for e in setup.elements)
    if params.branch == ETA:
        best = min(k1, k2, k3, harmonic(k1, k2), harmonic(k1, k3), harmonic(k2, k3), harmonic(k1, k2, k3))
        return best - 1.0
    from .inequality_verifier import b1

    k4 = setup.element("a4" if direction == FWD else "A4").expansion
    share = as_interval(b1(params.value)).lo
    if direction == FWD:
        g_lo, g_hi = setup.cone
        share *= g_lo / g_hi
    through_a4 = min(k3, share * k4)
    best = min(k1, k2, k3, k4, harmonic(k1, k2), harmonic(k1, k3), harmonic(k1, through_a4), through_a4)
    return best - 1.0


# ---------------------------------------------------------------------------
# one growth step
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StepReport:
    element: str
    iterates: int
    diameter_before: float
    diameter_after: float
    factor: float
    bound: float
    shares: dict
    expansions: dict

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "iterates": self.iterates,
            "diameter_before": self.diameter_before,
            "diameter_after": self.diameter_after,
            "factor": self.factor,
            "bound": self.bound,
            "shares": dict(sorted(self.shares.items())),
            "expansions": dict(sorted(self.expansions.items())),
        }


def _inside_domain(p: Point, setup: GrowthSetup) -> bool:
    x, y = p
    for poly in setup.domain:
        x0, y0, x1, y1 = geo.bbox(poly)
        for i in range(math.floor(x - x1) - 1, math.ceil(x - x0) + 1):
            for j in range(math.floor(y - y1) - 1, math.ceil(y - y0) + 1):
                if geo.point_in_polygon((x - i, y - j), poly, SIDE_TOL) is not False:
                    return True
    return False


def check_aligned(curve: PLCurve, setup: GrowthSetup, tol: float = CONE_TOL) -> bool:
    g_lo, g_hi = setup.cone
    return all(g_lo - tol <= g <= g_hi + tol for g in curve.gradients())


def _check_input(curve: PLCurve, setup: GrowthSetup) -> None:
    if curve.proj_axis != setup.axis:
        raise PreconditionViolated(f"{setup.direction} growth measures on the {setup.axis}-axis")
    if not curve.strict or len(curve.vertices) < 2:
        raise PreconditionViolated("growth needs a non-degenerate curve that does not double back")
    if len(curve.vertices) > MAX_VERTICES:
        raise CurveTooLong(f"curve has {len(curve.vertices)} vertices (limit {MAX_VERTICES})")
    if not check_aligned(curve, setup):
        raise PreconditionViolated("an edge gradient lies outside the minimal cone")
    for p in curve.vertices:
        if not _inside_domain(p, setup):
            raise PreconditionViolated(f"vertex {p} lies outside the growth domain")


def _branch_image(piece: PLCurve, steps: int, setup: GrowthSetup) -> list:
    """Image of a piece lying in one itinerary cell, by its lifted branch."""
    t = setup.params.eta_f
    out = []
    for p, q in piece.edges():
        mid = (0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]))
        branch = compose(setup.direction, branch_word(mid, t, setup.direction, steps), t)
        a, b = branch(p), branch(q)
        if out:
            # consecutive edges may use lifts differing by a lattice vector
            dx, dy = round(out[-1][0] - a[0]), round(out[-1][1] - a[1])
            b = (b[0] + dx, b[1] + dy)
        else:
            out.append(a)
        out.append(b)
    return out


def _glue(chains: Sequence[list]) -> list:
    out: list = []
    for chain in chains:
        if out:
            dx, dy = round(out[-1][0] - chain[0][0]), round(out[-1][1] - chain[0][1])
            chain = [(x + dx, y + dy) for x, y in chain]
            if math.dist(out[-1], chain[0]) > JOIN_TOL:
                raise PreconditionViolated("images of adjacent pieces do not join")
            chain = chain[1:]
        out.extend(chain)
    return out


def _normalise(points: list) -> list:
    mx = sum(p[0] for p in points) / len(points)
    my = sum(p[1] for p in points) / len(points)
    dx, dy = math.floor(mx), math.floor(my)
    return [(x - dx, y - dy) for x, y in points]


def grow_step(curve: PLCurve, direction: str, params: Params) -> tuple[PLCurve, StepReport]:
    """One application of the growth lemma.

    Raises :class:`NonSimple` when the curve meets some element in more than
    one component; the caller should then look for a segment instead.
    """
    setup = growth_setup(direction, params)
    _check_input(curve, setup)
    total = diameter(curve)
    pieces: dict = {}
    for e in setup.elements + setup.sub_elements:
        comps = _components(curve, e.polygons)
        if e in setup.elements and len(comps) > 1:
            raise NonSimple(e.name, len(comps))
        pieces[e.name] = comps

    def share(name: str) -> float:
        comps = pieces.get(name, [])
        return sum(diameter(c) for _, _, c in comps) / total

    shares = {e.name: share(e.name) for e in setup.elements + setup.sub_elements if pieces[e.name]}
    candidates = []
    for e in setup.elements:
        if pieces[e.name]:
            candidates.append((e.expansion * shares[e.name], e.name, e.steps, [pieces[e.name][0]], {e.name: e.expansion}))
    if setup.sub_elements:
        e3, e4 = setup.elements[2], setup.sub_elements[0]
        p3, p4 = pieces[e3.name], pieces[e4.name]
        joint = _components(curve, e3.polygons + e4.polygons)
        if p4 and len(p3) <= 1 and len(p4) == 1 and len(joint) == 1:
            bound = e4.expansion * shares[e4.name] + (e3.expansion * shares[e3.name] if p3 else 0.0)
            parts = sorted(p3 + p4, key=lambda c: c[0])
            exps = {e4.name: e4.expansion}
            if p3:
                exps[e3.name] = e3.expansion
            label = f"{e3.name}+{e4.name}" if p3 else e4.name
            candidates.append((bound, label, 3, parts, exps))
    if not candidates:
        raise PreconditionViolated("curve meets no partition element")
    bound, label, steps, parts, exps = max(candidates, key=lambda c: c[0])
    image = _normalise(_glue([_branch_image(c, steps, setup) for _, _, c in parts]))
    if len(image) > MAX_VERTICES:
        raise CurveTooLong(f"image has {len(image)} vertices (limit {MAX_VERTICES})")
    out = PLCurve(tuple(image), setup.axis)
    after = diameter(out)
    report = StepReport(label, steps, total, after, after / total, bound, shares, exps)
    return out, report


# ---------------------------------------------------------------------------
# segment detection
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SegmentWitness:
    kind: str
    curve: PLCurve
    iterates: int
    source: str

    def to_dict(self) -> dict:
        return {"kind": self.kind, "iterates": self.iterates, "source": self.source, "curve": self.curve.to_dict()}


def _a1_sides(p: Point, t: float, tol: float = SEGMENT_TOL) -> set:
    x, y = p
    out = set()
    if abs(y) < tol:
        out.add("lower")
    if abs(y - (1 - t)) < tol:
        out.add("upper")
    if abs(y - x + t) < tol:
        out.add("left")
    if abs(y - x + 1) < tol:
        out.add("right")
    return out


def _spans(a: set, b: set, pair: tuple) -> bool:
    return (pair[0] in a and pair[1] in b) or (pair[1] in a and pair[0] in b)


def find_segment(chain: PLCurve, kind: str, t: float) -> Optional[PLCurve]:
    """A component of the chain in A1 joining its sloping sides (``"h"``) or
    its lower and upper sides (``"v"``), translated into the base lift."""
    base = tuple((float(x), float(y)) for x, y in a1_lift(t))
    pair = ("left", "right") if kind == "h" else ("lower", "upper")
    for comp in intersect(PLCurve.chain(chain.vertices, chain.proj_axis), base)[0]:
        mx, my = comp.midpoint()
        shift = None
        for i in range(math.floor(mx) - 2, math.floor(mx) + 2):
            for j in range(math.floor(my) - 2, math.floor(my) + 2):
                if geo.point_in_polygon((mx - i, my - j), base, 0.0):
                    shift = (i, j)
        if shift is None:
            continue
        moved = comp.translated(-shift[0], -shift[1])
        if _spans(_a1_sides(moved.vertices[0], t), _a1_sides(moved.vertices[-1], t), pair):
            axis = "x" if kind == "h" else "y"
            try:
                return PLCurve(moved.vertices, axis)
            except PreconditionViolated:
                return PLCurve.chain(moved.vertices, axis)
    return None


def _image_chain(piece: PLCurve, steps: int, direction: str, t: float) -> PLCurve:
    if steps == 0:
        return PLCurve.chain(piece.vertices, piece.proj_axis)
    chains = []
    for p, q in piece.edges():
        img, _ = trace_segment(p, q, t, direction, steps)
        chains.append([pt for _, pt in img])
    pts = []
    for c in chains:
        pts.extend(c if not pts else c[1:])
    return PLCurve.chain(pts, piece.proj_axis)


def segment_regions(direction: str, params: Params, curve_data=None) -> list:
    """(name, region, iterates) triples whose images may carry the segment."""
    out = [("A1", None, 0)]
    if params.branch == ETA:
        for q in special_quads(params):
            if q.direction == direction:
                out.append((q.name, q, q.power))
    else:
        frak_d, d = eps_regions(params, curve_data)
        region = frak_d if direction == BWD else d
        out.append((region.label, region, region.power))
    return out


def detect_segment(curve: PLCurve, direction: str, params: Params, curve_data=None) -> Optional[SegmentWitness]:
    """Look for an h-segment (backward) or v-segment (forward) among the
    images of the curve's pieces in the lemma's regions.

    Raises :class:`NotApplicable` when the curve is simple everywhere.
    """
    setup = growth_setup(direction, params)
    if all(len(_components(curve, e.polygons)) <= 1 for e in setup.elements):
        raise NotApplicable("curve has simple intersection with every partition element")
    kind = "h" if direction == BWD else "v"
    t = params.eta_f
    for name, region, steps in segment_regions(direction, params, curve_data):
        pieces = [curve] if region is None else intersect(curve, region)[0]
        for piece in pieces:
            seg = find_segment(_image_chain(piece, steps, direction, t), kind, t)
            if seg is not None:
                return SegmentWitness(HSEG if kind == "h" else VSEG, seg, steps, name)
    return None


def witness_intersection(h: PLCurve, v: PLCurve) -> Optional[Point]:
    """First crossing point of two polylines (None if they are disjoint)."""
    for p, q in h.edges():
        for a, b in v.edges():
            d1 = (q[0] - p[0], q[1] - p[1])
            d2 = (b[0] - a[0], b[1] - a[1])
            den = d1[0] * d2[1] - d1[1] * d2[0]
            if den == 0.0:
                continue
            wx, wy = a[0] - p[0], a[1] - p[1]
            s = (wx * d2[1] - wy * d2[0]) / den
            u = (wx * d1[1] - wy * d1[0]) / den
            if -1e-12 <= s <= 1 + 1e-12 and -1e-12 <= u <= 1 + 1e-12:
                return (p[0] + s * d1[0], p[1] + s * d1[1])
    return None


def in_a1(p: Point, t: float, tol: float = SIDE_TOL) -> bool:
    base = geo.ccw(tuple((float(x), float(y)) for x, y in a1_lift(t)))
    return all(geo.cross(base[k], base[(k + 1) % 4], p) >= -tol for k in range(4))


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass
class GrowthTrace:
    direction: str
    branch: str
    param: float
    delta: float
    steps: list = field(default_factory=list)
    terminal: str = MAX_ITERS
    witness: Optional[SegmentWitness] = None
    retries: int = 0

    def diameters(self) -> list:
        if not self.steps:
            return []
        return [self.steps[0].diameter_before] + [s.diameter_after for s in self.steps]

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "branch": self.branch,
            "param": self.param,
            "delta": self.delta,
            "terminal": self.terminal,
            "retries": self.retries,
            "steps": [s.to_dict() for s in self.steps],
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _shorten(curve: PLCurve, frac: float) -> PLCurve:
    n = len(curve.vertices) - 1
    return _sub_curve(curve, frac * n, (1 - frac) * n)


def grow_until_segment(seed: PLCurve, direction: str, params: Params, max_iters: int = 200,
                       curve_data=None) -> GrowthTrace:
    """Grow until the curve meets some element non-simply, then extract the
    segment. Boundary-degenerate steps are retried on a slightly shortened
    curve, at most three times."""
    setup = growth_setup(direction, params)
    trace = GrowthTrace(direction, params.branch, params.value_f, growth_delta(direction, params))
    curve = seed
    for _ in range(max_iters + 1):
        try:
            curve, report = grow_step(curve, direction, params)
        except NonSimple:
            witness = detect_segment(curve, direction, params, curve_data)
            if witness is None:
                raise SegmentNotFound(f"no segment found at {params.branch}={params.value_f}")
            trace.terminal = witness.kind
            trace.witness = witness
            return trace
        except Undecided:
            if trace.retries >= MAX_RETRIES:
                raise
            trace.retries += 1
            curve = _shorten(curve, RETRY_SHRINK)
            continue
        trace.steps.append(report)
        if len(trace.steps) >= max_iters:
            break
    trace.terminal = MAX_ITERS
    return trace


def random_seed(rng, direction: str, params: Params, min_diam: float = 1e-3, max_diam: float = 0.05,
                max_edges: int = 3, hug: float = 0.3) -> PLCurve:
    """Random cone-aligned curve inside the growth domain.

    With probability ``hug`` each edge gradient sits on a cone boundary.
    """
    setup = growth_setup(direction, params)
    g_lo, g_hi = setup.cone
    k = _axis_index(setup.axis)
    polys = setup.domain
    while True:
        poly = polys[rng.randrange(len(polys))]
        x0, y0, x1, y1 = geo.bbox(poly)
        p = (x0 + (x1 - x0) * rng.random(), y0 + (y1 - y0) * rng.random())
        if not geo.point_in_polygon(p, poly, 1e-6):
            continue
        total = math.exp(math.log(min_diam) + (math.log(max_diam) - math.log(min_diam)) * rng.random())
        n = rng.randint(1, max_edges)
        cuts = sorted(rng.random() for _ in range(n - 1))
        lengths = [b - a for a, b in zip([0.0] + cuts, cuts + [1.0])]
        pts = [(0.0, 0.0)]
        for frac in lengths:
            r = rng.random()
            g = g_lo if r < hug / 2 else g_hi if r < hug else g_lo + (g_hi - g_lo) * rng.random()
            step = frac * total
            dx, dy = (step, g * step) if k == 0 else (step / g, step)
            pts.append((pts[-1][0] + dx, pts[-1][1] + dy))
        off = rng.random()
        cx, cy = pts[-1][0] * off, pts[-1][1] * off
        chain = PLCurve(tuple((p[0] + x - cx, p[1] + y - cy) for x, y in pts), setup.axis)
        for s0, s1, comp in _components(chain, polys):
            anchor = (len(chain.vertices) - 1) * off
            if s0 <= anchor <= s1 and diameter(comp) >= min_diam / 4:
                return comp


# ---------------------------------------------------------------------------
# alignment of local manifolds
# ---------------------------------------------------------------------------

STABLE_BLOCKS = {
    (ETA, FWD): ("MF1", "MF3"),
    (EPS, FWD): ("MF2", "MF3"),
    (ETA, BWD): ("M1", "M3"),
    (EPS, BWD): ("M2", "M3"),
}


def stable_range(direction: str, params: Params) -> IScalar:
    """Gradients bounded by the stable eigenvectors that feed the minimal cone."""
    a, b = (eigen_gradient(blk, params.branch, params.value, "s") for blk in STABLE_BLOCKS[(params.branch, direction)])
    a, b = as_interval(a), as_interval(b)
    return IScalar(min(a.lo, b.lo), max(a.hi, b.hi))


def _mobius(m: Mat2, g):
    return (m.c + m.d * g) / (m.a + m.b * g)


def alignment_pull(seed_gradient, location, direction: str, params: Params) -> IScalar:
    """Gradient enclosure of DH1 (forward) or DH1^-1 (backward) applied to a
    gradient or gradient interval at a point of H(A) or of A respectively."""
    setup = growth_setup(direction, params)
    host = setup.domain
    p = (float(location[0]), float(location[1]))
    if not any(
        geo.point_in_polygon((p[0] - i, p[1] - j), poly, 0.0) is not False
        for poly in host
        for i, j in geo.overlapping_shifts(geo.bbox((p,)), geo.bbox(poly))
    ):
        raise PreconditionViolated(f"{location} is outside the alignment domain")
    eta = params.eta
    m = dh_rising(eta)
    if direction == BWD:
        m = m.unimodular_inverse()
    if isinstance(seed_gradient, tuple):
        g = IScalar(float(seed_gradient[0]), float(seed_gradient[1]))
    else:
        g = as_interval(seed_gradient)
    pole = as_interval(m.a + m.b * g)
    if pole.lo <= 0.0 <= pole.hi:
        raise PreconditionViolated("gradient range contains the pole of the pull")
    lo, hi = as_interval(_mobius(m, IScalar(g.lo))), as_interval(_mobius(m, IScalar(g.hi)))
    return IScalar(min(lo.lo, hi.lo), max(lo.hi, hi.hi))
