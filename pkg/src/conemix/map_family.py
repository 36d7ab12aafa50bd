"""The toral map family H = V o F and its derivative data.

F(x, y) = (x + f(y), y) is a horizontal shear whose profile f is a tent:
slope 1/(1-eta) on [0, 1-eta] and slope -1/eta on [1-eta, 1].
V(x, y) = (x, x + y) is the vertical cat-map shear.
As eta -> 0 the map tends to the cat map; eta = 1/2 is the Cerbelli-Giona map.
The epsilon family is eta = 1/2 - epsilon.

The lift of H to the plane is continuous, so orbits of lifted points need
no case splitting for translation bookkeeping; only the derivative jumps.
Regions used by itineraries:

* forward:  A = {y in [0, 1-eta]}, B = H(A) n (complement of A), C = the rest
* backward: a = H(A) = {(y - x) mod 1 in [0, 1-eta]}, b = A minus a, c = the rest
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .interval import IScalar, as_interval

FWD = "fwd"
BWD = "bwd"
ETA = "eta"
EPS = "eps"

SINGULAR_TOL = 2.0 ** -30


class SingularPoint(ValueError):
    """A point lies on a branch boundary of the map (within tolerance)."""


class SingularOrbit(ValueError):
    """Some orbit point lies on a region boundary (within tolerance)."""


class ParameterOutOfWindow(ValueError):
    pass


# ---------------------------------------------------------------------------
# parameters
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _eps2_upper() -> float:
    from .inequality_verifier import solve_eps2

    return solve_eps2().hi


@dataclass(frozen=True)
class Params:
    """Parameter of one of the two branches, held as an interval."""

    branch: str
    value: IScalar
    checked: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "value", as_interval(self.value))
        if self.branch not in (ETA, EPS):
            raise ValueError(f"unknown branch {self.branch!r}")
        if not self.checked:
            return
        v = self.value
        if self.branch == ETA:
            if not (v.lo > 0.0 and v.hi < 1.0 / 3.0):
                raise ParameterOutOfWindow(f"eta must lie in (0, 1/3), got {v!r}")
        else:
            if not (v.lo > 0.0 and v.hi <= _eps2_upper()):
                raise ParameterOutOfWindow(f"epsilon must lie in (0, eps2], got {v!r}")

    @classmethod
    def eta_branch(cls, value) -> "Params":
        return cls(ETA, as_interval(value))

    @classmethod
    def eps_branch(cls, value) -> "Params":
        return cls(EPS, as_interval(value))

    @classmethod
    def unchecked(cls, branch: str, value) -> "Params":
        return cls(branch, as_interval(value), checked=False)

    @property
    def eta(self) -> IScalar:
        """Fold parameter of the shear profile (1/2 - epsilon on the eps branch)."""
        return self.value if self.branch == ETA else 0.5 - self.value

    @property
    def eta_f(self) -> float:
        return self.eta.mid()

    @property
    def value_f(self) -> float:
        return self.value.mid()

    def with_value(self, value) -> "Params":
        return Params(self.branch, as_interval(value), checked=self.checked)


def fold_of(branch: str, value):
    """Fold parameter for a raw branch value (generic number type)."""
    return value if branch == ETA else 0.5 - value


# ---------------------------------------------------------------------------
# points and matrices
# ---------------------------------------------------------------------------

def reduce_unit(v: float) -> float:
    r = v - math.floor(v)
    return 0.0 if r >= 1.0 else r


@dataclass(frozen=True)
class TorusPoint:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", reduce_unit(float(self.x)))
        object.__setattr__(self, "y", reduce_unit(float(self.y)))

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class Mat2:
    """Row-major 2x2 matrix over any number type."""

    a: object
    b: object
    c: object
    d: object

    def __matmul__(self, o):
        if isinstance(o, Mat2):
            return Mat2(
                self.a * o.a + self.b * o.c,
                self.a * o.b + self.b * o.d,
                self.c * o.a + self.d * o.c,
                self.c * o.b + self.d * o.d,
            )
        x, y = o
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def unimodular_inverse(self) -> "Mat2":
        """Inverse of a determinant-one matrix (the adjugate)."""
        return Mat2(self.d, -self.b, -self.c, self.a)

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def to_float(self) -> "Mat2":
        return Mat2(*(float(e) for e in self.entries()))

    @staticmethod
    def identity(one=1.0) -> "Mat2":
        return Mat2(one, 0.0 * one, 0.0 * one, one)


def shear_slopes(eta):
    """Slopes of the two tent pieces: (1/(1-eta), -1/eta)."""
    return 1 / (1 - eta), -1 / eta


def dh_rising(eta) -> Mat2:
    """Derivative of H on A (rising part of the tent)."""
    s, _ = shear_slopes(eta)
    return Mat2(1, s, 1, 1 + s)


def dh_falling(eta) -> Mat2:
    """Derivative of H off A (falling part of the tent)."""
    _, s = shear_slopes(eta)
    return Mat2(1, s, 1, 1 + s)


# Jacobian words in time order; 1 = rising branch, 0 = falling branch.
BLOCK_WORDS = {
    "M1": (FWD, (1,)),
    "M2": (FWD, (0, 1)),
    "M3": (FWD, (0, 0, 1)),
    "M4": (FWD, (0, 1, 1)),
    "MF1": (BWD, (1,)),
    "MF2": (BWD, (0, 1)),
    "MF3": (BWD, (0, 0, 1)),
    "MF4": (BWD, (0, 1, 1)),
}

BLOCK_ITINERARY = {
    "M1": "A",
    "M2": "BA",
    "M3": "BCA",
    "M4": "BAA",
    "MF1": "a",
    "MF2": "ba",
    "MF3": "bca",
    "MF4": "baa",
}


def block_from_eta(block: str, eta) -> Mat2:
    """Composite derivative of one return, for a generic fold parameter."""
    direction, word = BLOCK_WORDS[block]
    rise, fall = dh_rising(eta), dh_falling(eta)
    if direction == BWD:
        rise, fall = rise.unimodular_inverse(), fall.unimodular_inverse()
    out = None
    for sym in word:
        step = rise if sym == 1 else fall
        out = step if out is None else step @ out
    return out


def projective_block(block: str, eta) -> Mat2:
    """A positive multiple of the block with polynomial entries in eta.

    Each rising factor is scaled by (1 - eta) and each falling factor by eta,
    which clears every denominator. The action on directions is unchanged,
    and the entries stay of order one as eta -> 0, so gradient computations
    built on it keep their precision there.
    """
    direction, word = BLOCK_WORDS[block]
    rise = Mat2(1 - eta, 1 + 0 * eta, 1 - eta, 2 - eta)
    fall = Mat2(eta, -1 + 0 * eta, eta, eta - 1)
    if direction == BWD:
        rise, fall = rise.unimodular_inverse(), fall.unimodular_inverse()
    out = None
    for sym in word:
        step = rise if sym == 1 else fall
        out = step if out is None else step @ out
    return out


def projective_scale(block: str, eta):
    """The factor k with projective_block = k * block (so its determinant is k**2)."""
    _, word = BLOCK_WORDS[block]
    k = 1 + 0 * eta
    for sym in word:
        k = k * ((1 - eta) if sym == 1 else eta)
    return k


def block_matrix(block: str, params: Params) -> Mat2:
    """Interval enclosure of the block matrix at ``params``."""
    if block not in BLOCK_WORDS:
        raise KeyError(f"unknown block {block!r}")
    return block_from_eta(block, params.eta)


# ---------------------------------------------------------------------------
# the map on floats
# ---------------------------------------------------------------------------

def tent(y: float, eta: float) -> float:
    """Shear profile on [0, 1)."""
    return y / (1.0 - eta) if y <= 1.0 - eta else (1.0 - y) / eta


def lift_forward(x: float, y: float, eta: float) -> tuple[float, float]:
    u = x + tent(reduce_unit(y), eta)
    return u, u + y


def lift_inverse(x: float, y: float, eta: float) -> tuple[float, float]:
    v = y - x
    return x - tent(reduce_unit(v), eta), v


def apply_forward(p: TorusPoint, params: Params) -> TorusPoint:
    return TorusPoint(*lift_forward(p.x, p.y, params.eta_f))


def apply_inverse(p: TorusPoint, params: Params) -> TorusPoint:
    return TorusPoint(*lift_inverse(p.x, p.y, params.eta_f))


def step(p: TorusPoint, params: Params, direction: str) -> TorusPoint:
    return apply_forward(p, params) if direction == FWD else apply_inverse(p, params)


def _circ_dist(u: float, targets: Sequence[float]) -> float:
    u = reduce_unit(u)
    return min(min(abs(u - t), 1.0 - abs(u - t)) for t in targets)


def _on_rising(p: TorusPoint, eta: float, direction: str) -> bool:
    """Whether the derivative at p uses the rising tent piece; raises on boundaries."""
    if direction == FWD:
        u, scale = p.y, 1.0
    else:
        u, scale = p.y - p.x, math.sqrt(0.5)
    if _circ_dist(u, (0.0, 1.0 - eta)) * scale < SINGULAR_TOL:
        raise SingularPoint(f"{p} lies on a branch boundary")
    return reduce_unit(u) < 1.0 - eta


def jacobian_at(p: TorusPoint, params: Params, direction: str = FWD) -> Mat2:
    eta = params.eta
    m = dh_rising(eta) if _on_rising(p, params.eta_f, direction) else dh_falling(eta)
    return m if direction == FWD else m.unimodular_inverse()


def region_symbol(p: TorusPoint, eta: float, direction: str) -> str:
    """Forward label in {A, B, C} or backward label in {a, b, c}."""
    in_rect = reduce_unit(p.y) < 1.0 - eta
    in_band = reduce_unit(p.y - p.x) < 1.0 - eta
    d_rect = _circ_dist(p.y, (0.0, 1.0 - eta))
    d_band = _circ_dist(p.y - p.x, (0.0, 1.0 - eta)) * math.sqrt(0.5)
    if direction == FWD:
        if d_rect < SINGULAR_TOL or (not in_rect and d_band < SINGULAR_TOL):
            raise SingularOrbit(f"{p} lies on a forward region boundary")
        if in_rect:
            return "A"
        return "B" if in_band else "C"
    if d_band < SINGULAR_TOL or (not in_band and d_rect < SINGULAR_TOL):
        raise SingularOrbit(f"{p} lies on a backward region boundary")
    if in_band:
        return "a"
    return "b" if in_rect else "c"


def itinerary(p: TorusPoint, params: Params, steps: int, direction: str = FWD) -> list[str]:
    """Region labels of p, H(p), ... (or of p, H^-1(p), ... backwards)."""
    eta = params.eta_f
    out = []
    q = p
    for _ in range(steps):
        out.append(region_symbol(q, eta, direction))
        q = step(q, params, direction)
    return out


def return_time(p: TorusPoint, params: Params, direction: str = BWD, limit: int = 64) -> int:
    """First k >= 1 with H^-k(p) in A (bwd) or H^k(p) in H(A) (fwd)."""
    eta = params.eta_f
    q = p
    for k in range(1, limit + 1):
        q = step(q, params, direction)
        sym = region_symbol(q, eta, FWD if direction == BWD else BWD)
        if sym == ("A" if direction == BWD else "a"):
            return k
    raise RuntimeError("no return within limit")


def orbit_jacobian(p: TorusPoint, params: Params, steps: int, direction: str) -> Mat2:
    """Ordered product of pointwise Jacobians along ``steps`` iterates."""
    out = Mat2.identity(IScalar(1.0))
    q = p
    for _ in range(steps):
        out = jacobian_at(q, params, direction) @ out
        q = step(q, params, direction)
    return out


def lyapunov_estimate(p: TorusPoint, params: Params, steps: int = 10000) -> float:
    """Empirical forward expansion rate of a tangent vector along an orbit."""
    eta = params.eta_f
    rise, fall = dh_rising(eta), dh_falling(eta)
    v = (1.0, 0.0)
    total = 0.0
    x, y = p.x, p.y
    for _ in range(steps):
        m = rise if reduce_unit(y) < 1.0 - eta else fall
        v = m @ v
        n = math.hypot(*v)
        total += math.log(n)
        v = (v[0] / n, v[1] / n)
        x, y = lift_forward(x, y, eta)
        x, y = reduce_unit(x), reduce_unit(y)
    return total / steps
