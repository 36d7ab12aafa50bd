"""Certified root enclosure, positivity proofs and maximisation over intervals.

All routines take a generic function ``f`` written with ordinary arithmetic
(and :func:`conemix.interval.sqrt`), so the same code is evaluated on
``IScalar`` boxes, ``IDual`` derivative boxes and plain floats.
"""

from __future__ import annotations

import heapq
import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .interval import IDual, IScalar, value_of

CERTIFIED = "Certified"
FAILED = "Failed"
INCONCLUSIVE = "Inconclusive"

DEFAULT_FLOOR_EXPONENT = 20


def subdivision_floor() -> float:
    """Smallest interval width the branch-and-bound routines will split.

    ``CONEMIX_SUBDIV_FLOOR`` holds the exponent ``n`` of the floor ``2**-n``.
    """
    raw = os.environ.get("CONEMIX_SUBDIV_FLOOR")
    n = DEFAULT_FLOOR_EXPONENT if raw in (None, "") else int(raw)
    return 2.0 ** -n


class NoRootBracketed(ValueError):
    pass


@dataclass
class Certificate:
    """Outcome of checking one claim over a parameter window."""

    claim: str
    window: tuple[float, float]
    verdict: str
    witness: Optional[float] = None
    subinterval: Optional[tuple[float, float]] = None
    bound_values: dict = field(default_factory=dict)
    subdivisions: int = 0
    log: list = field(default_factory=list)
    wall_time_ms: Optional[float] = None

    @property
    def certified(self) -> bool:
        return self.verdict == CERTIFIED

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "window": [self.window[0], self.window[1]],
            "verdict": self.verdict,
            "witness": self.witness,
            "subinterval": None if self.subinterval is None else list(self.subinterval),
            "bound_values": {k: self.bound_values[k] for k in sorted(self.bound_values)},
            "subdivisions": self.subdivisions,
            "log": list(self.log),
            "wall_time_ms": self.wall_time_ms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        return cls(
            claim=d["claim"],
            window=(d["window"][0], d["window"][1]),
            verdict=d["verdict"],
            witness=d["witness"],
            subinterval=None if d["subinterval"] is None else tuple(d["subinterval"]),
            bound_values=dict(d["bound_values"]),
            subdivisions=d["subdivisions"],
            log=list(d["log"]),
            wall_time_ms=d["wall_time_ms"],
        )


def combine(claim: str, window, parts: list[Certificate], **bounds) -> Certificate:
    """Conjunction of certificates: Failed beats Inconclusive beats Certified."""
    verdict = CERTIFIED
    witness = sub = None
    for p in parts:
        if p.verdict == FAILED:
            verdict, witness, sub = FAILED, p.witness, p.subinterval
            break
        if p.verdict == INCONCLUSIVE and verdict == CERTIFIED:
            verdict, sub = INCONCLUSIVE, p.subinterval
    log = [f"{p.claim}: {p.verdict}" for p in parts]
    return Certificate(
        claim=claim,
        window=(float(window[0]), float(window[1])),
        verdict=verdict,
        witness=witness,
        subinterval=sub,
        bound_values=dict(bounds),
        subdivisions=sum(p.subdivisions for p in parts),
        log=log,
    )


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.ms = 1000.0 * (time.perf_counter() - self.t0)


# ---------------------------------------------------------------------------
# positivity
# ---------------------------------------------------------------------------

@dataclass
class Positivity:
    verdict: str
    leaves: int
    min_lower: float
    witness: Optional[float] = None
    subinterval: Optional[tuple[float, float]] = None


def _safe(f, x):
    try:
        return value_of(f(x))
    except (ZeroDivisionError, ValueError):
        return None


def prove_positive(
    f: Callable,
    lo: float,
    hi: float,
    *,
    floor: Optional[float] = None,
    use_derivative: bool = True,
    strict: bool = True,
) -> Positivity:
    """Certify ``f(x) > 0`` (or ``>= 0`` when ``strict`` is false) on ``[lo, hi]``.

    A leaf is accepted when its interval image is positive, or when the
    derivative enclosure has fixed sign and the value at the lower end of
    the image is positive. A point evaluation that is certainly on the wrong
    side yields a failure witness.
    """
    floor = subdivision_floor() if floor is None else floor
    stack = [(lo, hi)]
    leaves = 0
    min_lower = math.inf
    pending: Optional[tuple[float, float]] = None

    def ok(v: IScalar) -> bool:
        return v.lo > 0.0 if strict else v.lo >= 0.0

    while stack:
        a, b = stack.pop()
        leaves += 1
        box = IScalar(a, b)
        v = _safe(f, box)
        if v is not None and ok(v):
            min_lower = min(min_lower, v.lo)
            continue
        m = box.mid()
        pv = _safe(f, IScalar(m))
        if pv is not None and (pv.hi <= 0.0 if strict else pv.hi < 0.0):
            return Positivity(FAILED, leaves, min(min_lower, pv.lo), witness=m)
        if use_derivative:
            d = None
            try:
                d = f(IDual.variable(box))
            except (ZeroDivisionError, ValueError):
                pass
            if isinstance(d, IDual) and isinstance(d.der, IScalar):
                # centred form: f(m) + f'(box) (box - m)
                if pv is not None:
                    half = IScalar(a - m, b - m)
                    centred = pv + d.der * half
                    if ok(centred):
                        min_lower = min(min_lower, centred.lo)
                        continue
                end = None
                if d.der.lo > 0.0:
                    end = a
                elif d.der.hi < 0.0:
                    end = b
                if end is not None:
                    ev = _safe(f, IScalar(end))
                    if ev is not None and ok(ev):
                        min_lower = min(min_lower, ev.lo)
                        continue
        if b - a <= floor:
            if pending is None:
                pending = (a, b)
            continue
        stack.append((m, b))
        stack.append((a, m))
    if pending is not None:
        return Positivity(INCONCLUSIVE, leaves, min_lower, subinterval=pending)
    return Positivity(CERTIFIED, leaves, min_lower)


def certify_positive(claim: str, f: Callable, lo: float, hi: float, **kw) -> Certificate:
    with Timer() as t:
        out = prove_positive(f, lo, hi, **kw)
    return Certificate(
        claim=claim,
        window=(float(lo), float(hi)),
        verdict=out.verdict,
        witness=out.witness,
        subinterval=out.subinterval,
        bound_values={"min_lower_bound": out.min_lower if math.isfinite(out.min_lower) else None},
        subdivisions=out.leaves,
        wall_time_ms=t.ms,
    )


# ---------------------------------------------------------------------------
# roots
# ---------------------------------------------------------------------------

def _sign_at(f, x: float) -> int:
    v = value_of(f(IScalar(x)))
    if v.lo > 0.0:
        return 1
    if v.hi < 0.0:
        return -1
    return 0


def bisect_root(f: Callable, lo: float, hi: float, tol: float = 1e-8) -> IScalar:
    """Enclose a root of ``f`` in ``[lo, hi]`` by certified sign changes."""
    sa, sb = _sign_at(f, lo), _sign_at(f, hi)
    if sa == 0 or sb == 0 or sa == sb:
        raise NoRootBracketed(f"no certified sign change on [{lo}, {hi}]")
    a, b = lo, hi
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        sm = _sign_at(f, m)
        if sm == 0:
            break
        if sm == sa:
            a = m
        else:
            b = m
    return IScalar(a, b)


def newton_root(f: Callable, box: IScalar, tol: float = 1e-12, max_iter: int = 80) -> tuple[IScalar, bool]:
    """Interval Newton contraction; returns (enclosure, uniqueness proven)."""
    unique = False
    x = box
    for _ in range(max_iter):
        d = f(IDual.variable(x)).der
        if d.contains_zero():
            break
        m = x.mid()
        fm = value_of(f(IScalar(m)))
        n = IScalar(m) - fm / d
        if x.lo < n.lo and n.hi < x.hi:
            unique = True
        nx = x.intersect(n)
        if nx is None:
            raise NoRootBracketed(f"interval Newton excluded every root in {box!r}")
        stalled = nx == x
        x = nx
        if stalled or x.width() <= tol:
            break
    return x, unique


@dataclass
class RootResult:
    enclosure: IScalar
    unique: bool
    bisection: IScalar
    newton: Optional[IScalar]


def solve_root(f: Callable, lo: float, hi: float, tol: float = 1e-8) -> RootResult:
    """Bisection to a coarse bracket, then interval Newton refinement."""
    coarse = bisect_root(f, lo, hi, tol=max(tol, 1e-4 * (hi - lo)))
    try:
        refined, unique = newton_root(f, coarse, tol=tol * 1e-3)
    except NoRootBracketed:
        refined, unique = None, False
    fine = bisect_root(f, coarse.lo, coarse.hi, tol=tol)
    enc = fine if refined is None else (fine.intersect(refined) or fine)
    return RootResult(enclosure=enc, unique=unique, bisection=fine, newton=refined)


# ---------------------------------------------------------------------------
# maximisation
# ---------------------------------------------------------------------------

@dataclass
class MaxResult:
    lower: float
    upper: float
    argmax: float
    leaves: int


def bnb_maximize(f: Callable, lo: float, hi: float, tol: float = 1e-9, floor: Optional[float] = None) -> MaxResult:
    """Bracket ``max f`` on ``[lo, hi]``: interval upper bounds, point lower bounds."""
    floor = subdivision_floor() if floor is None else floor
    best_lo = -math.inf
    arg = lo
    for x in (lo, hi, 0.5 * (lo + hi)):
        v = value_of(f(IScalar(x)))
        if v.lo > best_lo:
            best_lo, arg = v.lo, x
    def upper_bound(a, b):
        v = _safe(f, IScalar(a, b))
        best = math.inf if v is None else v.hi
        # a certified monotone leaf is bounded by its value at one end
        try:
            d = f(IDual.variable(IScalar(a, b))).der
        except (ZeroDivisionError, ValueError):
            return best
        end = b if d.lo > 0 else (a if d.hi < 0 else None)
        if end is not None:
            e = _safe(f, IScalar(end))
            if e is not None:
                best = min(best, e.hi)
        return best

    heap = [(-upper_bound(lo, hi), lo, hi)]
    leaves = 1
    while heap:
        neg_u, a, b = heapq.heappop(heap)
        u = -neg_u
        if u - best_lo <= tol or b - a <= floor:
            heapq.heappush(heap, (neg_u, a, b))
            break
        m = 0.5 * (a + b)
        pv = value_of(f(IScalar(m)))
        if pv.lo > best_lo:
            best_lo, arg = pv.lo, m
        for c, d in ((a, m), (m, b)):
            leaves += 1
            ub = upper_bound(c, d)
            if ub > best_lo:
                heapq.heappush(heap, (-ub, c, d))
    upper = max((-h[0] for h in heap), default=best_lo)
    upper = max(upper, best_lo)
    return MaxResult(lower=best_lo, upper=upper, argmax=arg, leaves=leaves)
