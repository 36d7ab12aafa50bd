"""Measured A4 share of cone-aligned curves crossing the lower A4 into A5.

Curves are built geometrically: a crossing point on the A4/A5 boundary, a
polyline back through A4 until it leaves, and a straight run forward through
A5 until it leaves. Shares use x-extents (the backward diameter).
"""

from __future__ import annotations

import math

from conemix.map_family import BWD, Params
from conemix.cone_engine import minimal_cone
from conemix.partition_geometry import a2_subdivision


def _exit_length(p, d, poly):
    """Largest s >= 0 with p + s d still in the convex polygon (Cyrus-Beck)."""
    n = len(poly)
    area = sum(poly[k][0] * poly[(k + 1) % n][1] - poly[(k + 1) % n][0] * poly[k][1] for k in range(n))
    sgn = 1.0 if area > 0 else -1.0
    s_max = math.inf
    for k in range(n):
        a, b = poly[k], poly[(k + 1) % n]
        ex, ey = b[0] - a[0], b[1] - a[1]
        # inside when sgn * cross(e, q - a) >= 0
        c0 = sgn * (ex * (p[1] - a[1]) - ey * (p[0] - a[0]))
        c1 = sgn * (ex * d[1] - ey * d[0])
        if c1 < 0:
            s_max = min(s_max, -c0 / c1 if c0 > 0 else 0.0)
    return max(0.0, s_max)


def lower_pieces(params: Params):
    a4, a5 = a2_subdivision(params)
    pick = lambda rs: next(r for r in rs if r.part == "lower").float_lift()  # noqa: E731
    return pick(a4), pick(a5)


def measured_shares(params: Params, rng, count: int = 1000) -> list[float]:
    a4, a5 = lower_pieces(params)
    q1 = next(p for p in a5 if abs(p[1]) < 1e-15 and p[0] < params.eta_f - 1e-12)
    q2 = next(p for p in a5 if p[1] > 1e-12)
    cone = minimal_cone(BWD, params)
    g_lo, g_hi = cone.g_lo.mid(), cone.g_hi.mid()

    def gradient():
        u = rng.random()
        if u < 0.35:
            return g_lo
        if u < 0.7:
            return g_hi
        return g_lo + (g_hi - g_lo) * rng.random()

    shares = []
    while len(shares) < count:
        z = rng.random()
        x = (q2[0] + z * (q1[0] - q2[0]), q2[1] + z * (q1[1] - q2[1]))
        # forward through A5 (x increasing)
        g5 = gradient()
        d5 = (1.0, g5)
        run5 = _exit_length(x, d5, a5)
        # back through A4 (x decreasing), possibly bending once
        g4a, g4b = gradient(), gradient()
        d4a = (-1.0, -g4a)
        full_a = _exit_length(x, d4a, a4)
        first = full_a * rng.random() if rng.random() < 0.5 else full_a
        bend = (x[0] + first * d4a[0], x[1] + first * d4a[1])
        run4 = first
        if first < full_a:
            run4 += _exit_length(bend, (-1.0, -g4b), a4)
        if run4 <= 0 or run5 <= 0:
            continue
        shares.append(run4 / (run4 + run5))
    return shares
