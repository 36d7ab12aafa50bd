"""Invariant expanding cones built from eigenvector gradients of the blocks.

Gradients are dy/dx. The sup-norm expansion ratio of a matrix M along the
direction (1, t) is

    r(t) = max(|m11 + m12 t|, |m21 + m22 t|) / max(1, |t|),

which is piecewise linear in t on |t| <= 1 and piecewise linear in 1/t on
|t| >= 1. Its breakpoints ("kinks") are where one image coordinate vanishes,
where the two image coordinates have equal magnitude, and |t| = 1. The
minimum over a gradient interval is therefore attained at an end point or
at a kink inside the interval; :func:`min_expansion` evaluates exactly that
candidate set, which certifies the location of the minimum instead of
assuming it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .certify import CERTIFIED, FAILED, INCONCLUSIVE, Certificate, Timer, subdivision_floor
from .interval import IDual, IScalar, as_interval, imin, sqrt
from .map_family import BWD, EPS, ETA, FWD, Mat2, Params, block_from_eta, block_matrix, fold_of, projective_block, projective_scale


class NotHyperbolic(ValueError):
    pass


class ZeroVector(ValueError):
    pass


# ---------------------------------------------------------------------------
# eigen data
# ---------------------------------------------------------------------------

def _certain_sign(x) -> int:
    v = x.val if isinstance(x, IDual) else x
    if isinstance(v, IScalar):
        if v.lo > 0:
            return 1
        if v.hi < 0:
            return -1
        return 0
    return 1 if v > 0 else (-1 if v < 0 else 0)


def _separation(x) -> float:
    """How far x is certainly from zero (0 when it may vanish)."""
    v = x.val if isinstance(x, IDual) else x
    if isinstance(v, IScalar):
        return max(v.lo, -v.hi, 0.0)
    return abs(v)


def _mid(x) -> float:
    v = x.val if isinstance(x, IDual) else x
    return v.mid() if isinstance(v, IScalar) else float(v)


def fixed_gradient(m: Mat2, s: int, root):
    """Gradient of the eigen direction with eigenvalue (tr + s*root)/2.

    Works for any positive multiple of a block. The two algebraically equal
    forms (d - a + s root)/(2b) and 2c/(a - d + s root) are chosen between
    so that the sum of like-signed terms is the one computed, which avoids
    cancellation and the b -> 0 singularity of the first form.
    """
    first = (m.d - m.a + s * root, 2 * m.b)
    second = (2 * m.c, m.a - m.d + s * root)
    order = (first, second) if s * _mid(m.d - m.a) >= 0 else (second, first)
    for num, den in order:
        if _separation(den) > 0 or not isinstance(den, (IScalar, IDual)):
            try:
                return num / den
            except ZeroDivisionError:
                continue
    raise ZeroDivisionError("eigen direction is not separated from vertical")


def hyperbolic_parts(m: Mat2, det=1):
    """(sign of trace, sqrt of tr^2 - 4 det); raises NotHyperbolic when unresolved."""
    tr = m.a + m.d
    disc = tr * tr - 4 * det
    if _certain_sign(disc) <= 0 or _certain_sign(det) <= 0:
        raise NotHyperbolic(f"tr^2 > 4 det > 0 is not established (trace={tr!r})")
    return _certain_sign(tr), sqrt(disc)


def eigen_of(m: Mat2):
    """(unstable eigenvalue, unstable gradient, stable gradient) of a determinant-one matrix.

    The stable gradient is None when it cannot be separated from vertical.
    """
    sgn, root = hyperbolic_parts(m)
    lam_u = (m.a + m.d + sgn * root) / 2
    try:
        g_s = fixed_gradient(m, -sgn, root)
    except ZeroDivisionError:
        g_s = None
    return lam_u, fixed_gradient(m, sgn, root), g_s


def stable_vector(m: Mat2, sgn: int, root):
    """A nonzero stable eigenvector, the better conditioned of two parallel choices."""
    v1 = (2 * m.b, m.d - m.a - sgn * root)
    v2 = (m.a - m.d - sgn * root, 2 * m.c)
    n1 = abs(_mid(v1[0])) + abs(_mid(v1[1]))
    n2 = abs(_mid(v2[0])) + abs(_mid(v2[1]))
    return v1 if n1 >= n2 else v2


@dataclass(frozen=True)
class EigenData:
    block: str
    g_u: IScalar
    g_s: IScalar | None
    lambda_u: IScalar

    def residual(self, m: Mat2) -> tuple[IScalar, IScalar]:
        """(M - lambda I)(1, g_u); both components must contain 0."""
        lam = self.lambda_u if (m.a + m.d).lo > 0 else -self.lambda_u
        g = self.g_u
        return (m.a - lam + m.b * g, m.c + (m.d - lam) * g)


def eigen_gradients(block: str, params: Params) -> EigenData:
    m = block_matrix(block, params)
    lam, g_u, g_s = eigen_of(m)
    return EigenData(block, g_u, g_s, abs(lam))


def eigen_gradient(block: str, branch: str, value, which: str = "u"):
    """Eigen gradient of a block as a generic function of the branch parameter."""
    eta = fold_of(branch, value)
    m = projective_block(block, eta)
    sgn, root = hyperbolic_parts(m, projective_scale(block, eta) ** 2)
    return fixed_gradient(m, sgn if which == "u" else -sgn, root)


# ---------------------------------------------------------------------------
# cones
# ---------------------------------------------------------------------------

# Blocks whose unstable eigenvectors bound the minimal cone, as (lower, upper).
CONE_BLOCKS = {
    (ETA, FWD): ("M3", "M1"),
    (ETA, BWD): ("MF1", "MF3"),
    (EPS, FWD): ("M2", "M3"),
    (EPS, BWD): ("MF3", "MF2"),
}

BLOCK_SETS = {
    (ETA, FWD): ("M1", "M2", "M3"),
    (ETA, BWD): ("MF1", "MF2", "MF3"),
    (EPS, FWD): ("M1", "M2", "M3", "M4"),
    (EPS, BWD): ("MF1", "MF2", "MF3", "MF4"),
}


@dataclass(frozen=True)
class Cone:
    g_lo: IScalar
    g_hi: IScalar
    crosses_vertical: bool = False
    direction: str = FWD

    def __post_init__(self):
        object.__setattr__(self, "g_lo", as_interval(self.g_lo))
        object.__setattr__(self, "g_hi", as_interval(self.g_hi))
        if not self.crosses_vertical and self.g_lo.lo > self.g_hi.hi:
            raise ValueError("g_lo must not exceed g_hi for a non-vertical cone")


def cone_bounds(branch: str, direction: str, value):
    """Boundary gradients (lower, upper) as generic functions of the parameter."""
    lo_block, hi_block = CONE_BLOCKS[(branch, direction)]
    return eigen_gradient(lo_block, branch, value), eigen_gradient(hi_block, branch, value)


def minimal_cone(direction: str, params: Params) -> Cone:
    g_lo, g_hi = cone_bounds(params.branch, direction, params.value)
    return Cone(g_lo, g_hi, False, direction)


def contains(cone: Cone, v) -> bool:
    """Closed-cone membership of a nonzero vector, symmetric under v -> -v."""
    vx, vy = float(v[0]), float(v[1])
    if vx == 0.0 and vy == 0.0:
        raise ZeroVector("the zero vector has no direction")
    if vx == 0.0:
        return cone.crosses_vertical
    g = vy / vx
    if cone.crosses_vertical:
        return g >= cone.g_lo.lo or g <= cone.g_hi.hi
    return cone.g_lo.lo <= g <= cone.g_hi.hi


def _maybe_in(cone: Cone, t: IScalar) -> bool:
    if cone.crosses_vertical:
        return t.hi >= cone.g_lo.lo or t.lo <= cone.g_hi.hi
    return t.hi >= cone.g_lo.lo and t.lo <= cone.g_hi.hi


# ---------------------------------------------------------------------------
# expansion
# ---------------------------------------------------------------------------

def _gmax(a, b):
    if isinstance(a, IDual) or isinstance(b, IDual):
        diff = a - b
        s = _certain_sign(diff)
        if s == 0:
            raise ValueError("max is not differentiable here")
        return a if s > 0 else b
    if isinstance(a, IScalar) or isinstance(b, IScalar):
        a, b = as_interval(a), as_interval(b)
        return IScalar(max(a.lo, b.lo), max(a.hi, b.hi))
    return max(a, b)


def gmin(a, b):
    if isinstance(a, IDual) or isinstance(b, IDual):
        s = _certain_sign(a - b)
        if s == 0:
            raise ValueError("min is not differentiable here")
        return b if s > 0 else a
    if isinstance(a, IScalar) or isinstance(b, IScalar):
        return imin(a, b)
    return min(a, b)


def expansion_ratio(m: Mat2, t):
    """Sup-norm stretch of the direction with gradient t."""
    num = _gmax(abs(m.a + m.b * t), abs(m.c + m.d * t))
    at = abs(t)
    if isinstance(at, IDual):
        s = _certain_sign(at - 1)
        if s == 0:
            raise ValueError("|t| = 1 is not excluded")
        return num if s < 0 else num / at
    if isinstance(at, IScalar):
        if at.hi <= 1.0:
            return num
        if at.lo >= 1.0:
            return num / at
        return num / IScalar(1.0, at.hi)
    return num / max(1.0, at)


def vertical_ratio(m: Mat2):
    return _gmax(abs(m.b), abs(m.d))


def kinks(m: Mat2) -> list:
    """Gradients at which the expansion ratio may change slope.

    A kink whose denominator cannot be separated from zero is reported as
    the whole line, so callers fall back to evaluating over the full cone.
    """
    out = []
    for num, den in (
        (-m.a, m.b),
        (-m.c, m.d),
        (m.c - m.a, m.b - m.d),
        (-(m.a + m.c), m.b + m.d),
    ):
        den_i = as_interval(den)
        if den_i.lo > 0 or den_i.hi < 0:
            out.append(as_interval(num / den))
        else:
            out.append(IScalar(-math.inf, math.inf))
    out.extend([IScalar(1.0), IScalar(-1.0)])
    return out


def min_expansion(block, cone: Cone, params: Params | None = None) -> IScalar:
    """Enclosure ``[lower, upper]`` of the minimal sup-norm stretch over the cone.

    ``block`` is a block name (evaluated at ``params``) or a ``Mat2``.
    ``lower`` is a certified lower bound; ``upper`` is attained by a boundary
    direction, so the enclosure contains the true infimum.
    """
    m = block if isinstance(block, Mat2) else block_matrix(block, params)
    m = Mat2(*(as_interval(e) for e in m.entries()))
    bounds = [expansion_ratio(m, cone.g_lo), expansion_ratio(m, cone.g_hi)]
    candidates = list(bounds)
    if cone.crosses_vertical:
        candidates.append(vertical_ratio(m))
    for k in kinks(m):
        if _maybe_in(cone, k):
            if cone.crosses_vertical and not math.isfinite(k.width()):
                candidates.append(IScalar(0.0))
                continue
            if not cone.crosses_vertical:
                k = k.intersect(IScalar(cone.g_lo.lo, cone.g_hi.hi))
            candidates.append(expansion_ratio(m, k))
    lower = min(c.lo for c in candidates)
    upper = min(b.hi for b in bounds)
    return IScalar(lower, max(lower, upper))


def boundary_ratios(block: str, branch: str, direction: str, value):
    """Expansion ratio at the two cone boundaries, generic in the parameter."""
    m = block_from_eta(block, fold_of(branch, value))
    g_lo, g_hi = cone_bounds(branch, direction, value)
    return expansion_ratio(m, g_lo), expansion_ratio(m, g_hi)


def min_boundary_expansion(block: str, branch: str, direction: str, value):
    """Closed form of K_j / script-K_j: the smaller boundary ratio."""
    lo, hi = boundary_ratios(block, branch, direction, value)
    return gmin(lo, hi)


# ---------------------------------------------------------------------------
# certificates over parameter windows
# ---------------------------------------------------------------------------

def _box_params(branch: str, a: float, b: float) -> Params:
    return Params.unchecked(branch, IScalar(a, b))


def _subdivide(claim: str, branch: str, lo: float, hi: float, leaf_test, floor: float | None = None) -> Certificate:
    """Generic parameter bisection; ``leaf_test`` returns True/False/None (undecided)."""
    floor = subdivision_floor() if floor is None else floor
    stack = [(lo, hi)]
    leaves = 0
    pending = None
    witness = None

    def run(p):
        try:
            return leaf_test(p)
        except (ZeroDivisionError, ValueError):
            return None

    with Timer() as t:
        while stack:
            a, b = stack.pop()
            leaves += 1
            if run(_box_params(branch, a, b)):
                continue
            m = 0.5 * (a + b)
            if run(_box_params(branch, m, m)) is False:
                witness = m
                break
            if b - a <= floor:
                pending = pending or (a, b)
                continue
            stack.append((m, b))
            stack.append((a, m))
    if witness is not None:
        verdict = FAILED
    else:
        verdict = INCONCLUSIVE if pending else CERTIFIED
    return Certificate(claim, (lo, hi), verdict, witness=witness, subinterval=None if witness else pending,
                       subdivisions=leaves, wall_time_ms=t.ms)


def _own_boundary(block: str, branch: str, direction: str) -> str | None:
    lo_block, hi_block = CONE_BLOCKS[(branch, direction)]
    if block == lo_block:
        return "lo"
    if block == hi_block:
        return "hi"
    return None


def mobius(m: Mat2, g):
    """Gradient of M(1, g)."""
    return (m.c + m.d * g) / (m.a + m.b * g)


def invariance_leaf(blocks: Sequence[str], direction: str, p: Params):
    """True when every block maps the cone strictly inside itself at every parameter in p.

    A block's own eigen boundary is fixed by that block; only the opposite
    boundary must land strictly inside. The pole of the gradient action must
    lie outside the cone so that the image of the interval is the interval
    between the boundary images.
    """
    g_lo, g_hi = cone_bounds(p.branch, direction, p.value)
    decided = True
    for block in blocks:
        m = block_matrix(block, p)
        d_lo, d_hi = m.a + m.b * g_lo, m.a + m.b * g_hi
        if not ((d_lo.lo > 0 and d_hi.lo > 0) or (d_lo.hi < 0 and d_hi.hi < 0)):
            if p.value.is_point() and (d_lo.hi < 0 < d_hi.lo or d_hi.hi < 0 < d_lo.lo):
                return False
            decided = False
            continue
        own = _own_boundary(block, p.branch, direction)
        for tag, g in (("lo", g_lo), ("hi", g_hi)):
            if tag == own:
                continue
            img = mobius(m, g)
            if img.lo > g_lo.hi and img.hi < g_hi.lo:
                continue
            if p.value.is_point() and (img.hi < g_lo.lo or img.lo > g_hi.hi):
                return False
            decided = False
    return True if decided else None


def _block_parts(block: str, branch: str, value):
    eta = fold_of(branch, value)
    m = projective_block(block, eta)
    sgn, root = hyperbolic_parts(m, projective_scale(block, eta) ** 2)
    return m, sgn, root


def _cross(g, v):
    """Cross product of (1, g) with v."""
    return v[1] - g * v[0]


def invariance_claims(block: str, direction: str, branch: str, route: str) -> dict:
    """Margins (functions of the parameter) whose positivity proves invariance of the cone under ``block``.

    ``route`` is "fixed" or "direct". The fixed-point route uses that the
    action on directions (determinant > 0, distinct real fixed points)
    moves every direction strictly toward the unstable one along the arc
    that avoids the stable one. With the stable direction outside the cone
    and the unstable direction in it (on a boundary for the blocks that
    bound the cone, strictly inside otherwise), the cone maps into itself
    and every boundary that is not fixed lands strictly inside. The direct
    route checks the images of both boundaries and that the pole of the
    action lies outside the cone.
    """
    own = _own_boundary(block, branch, direction)

    def bounds(v):
        return cone_bounds(branch, direction, v)

    claims = {"cone_width": lambda v: bounds(v)[1] - bounds(v)[0]}
    if route == "fixed":
        def stable_outside(v):
            m, sgn, root = _block_parts(block, branch, v)
            g_lo, g_hi = bounds(v)
            w = stable_vector(m, sgn, root)
            return _cross(g_lo, w) * _cross(g_hi, w)

        claims["stable_outside"] = stable_outside
        if own != "lo":
            claims["unstable_above_lower"] = lambda v: eigen_gradient(block, branch, v) - bounds(v)[0]
        if own != "hi":
            claims["unstable_below_upper"] = lambda v: bounds(v)[1] - eigen_gradient(block, branch, v)
        return claims

    def image(v, side):
        m, _, _ = _block_parts(block, branch, v)
        return mobius(m, bounds(v)[side])

    def pole(v):
        m, _, _ = _block_parts(block, branch, v)
        g_lo, g_hi = bounds(v)
        return (m.a + m.b * g_lo) * (m.a + m.b * g_hi)

    claims["pole_outside"] = pole
    for side, name in ((0, "lower"), (1, "upper")):
        claims[f"{name}_image_above_lower"] = lambda v, side=side: image(v, side) - bounds(v)[0]
        claims[f"{name}_image_below_upper"] = lambda v, side=side: bounds(v)[1] - image(v, side)
    return claims


def invariance_route(block: str, direction: str, branch: str, lo: float, hi: float, samples: int = 9) -> str:
    """Fixed-point route when the unstable direction sits in the cone at every sample."""
    if _own_boundary(block, branch, direction) is not None:
        return "fixed"
    for i in range(samples):
        v = lo + (hi - lo) * i / (samples - 1)
        g = eigen_gradient(block, branch, v)
        g_lo, g_hi = cone_bounds(branch, direction, v)
        if not g_lo < g < g_hi:
            return "direct"
    return "fixed"


def verify_invariance(blocks: Iterable[str], direction: str, branch: str, lo: float, hi: float) -> Certificate:
    from .certify import certify_positive, combine

    blocks = tuple(blocks)
    parts = []
    routes = {}
    with Timer() as t:
        for block in blocks:
            route = invariance_route(block, direction, branch, lo, hi)
            routes[block] = route
            for name, f in invariance_claims(block, direction, branch, route).items():
                parts.append(certify_positive(f"{block}:{name}", f, lo, hi))
    cert = combine(f"cone_invariance_{branch}_{direction}", (lo, hi), parts, blocks=list(blocks),
                   routes={k: routes[k] for k in sorted(routes)})
    cert.wall_time_ms = t.ms
    return cert


def verify_expansion(blocks: Iterable[str], direction: str, branch: str, lo: float, hi: float) -> Certificate:
    blocks = tuple(blocks)
    worst = [math.inf]

    def test(p):
        cone = minimal_cone(direction, p)
        result = True
        for block in blocks:
            k = min_expansion(block, cone, p)
            if k.lo > 1.0:
                worst[0] = min(worst[0], k.lo)
                continue
            if p.value.is_point() and k.hi <= 1.0:
                return False
            result = None
        return result

    cert = _subdivide(f"cone_expansion_{branch}_{direction}", branch, lo, hi, test)
    cert.bound_values["blocks"] = list(blocks)
    cert.bound_values["min_expansion_lower"] = worst[0] if math.isfinite(worst[0]) else None
    return cert


def verify_dominance(lo: float, hi: float, dominant: str = "MF4", others=("MF1", "MF2", "MF3")) -> Certificate:
    """The dominant block expands strictly more than every other block on the window."""

    def test(p):
        cone = minimal_cone(BWD, p)
        k_dom = min_expansion(dominant, cone, p)
        highest = max(min_expansion(b, cone, p).hi for b in others)
        if k_dom.lo > highest:
            return True
        if p.value.is_point() and k_dom.hi <= min(min_expansion(b, cone, p).lo for b in others):
            return False
        return None

    return _subdivide(f"dominance_{dominant}", EPS, lo, hi, test)
