"""High-precision reference values built directly from the map definition.

Nothing here imports the package numerics: Jacobians come from the tent
slopes, eigenvectors from the characteristic polynomial, cone minima from
exhaustive kink enumeration, and roots from mpmath.findroot.
"""

from __future__ import annotations

import math

import mpmath as mp

mp.mp.dps = 40

FWD, BWD = "fwd", "bwd"

# time-ordered branch words: 1 = rising piece of the tent, 0 = falling piece
WORDS = {1: (1,), 2: (0, 1), 3: (0, 0, 1), 4: (0, 1, 1)}

# blocks whose unstable directions bound the minimal cone (lower, upper)
CONE = {
    ("eta", FWD): (3, 1),
    ("eta", BWD): (1, 3),
    ("eps", FWD): (2, 3),
    ("eps", BWD): (3, 2),
}


def fold(branch: str, value):
    value = mp.mpf(value)
    return value if branch == "eta" else mp.mpf(1) / 2 - value


def step_matrix(rising: int, t):
    s = 1 / (1 - t) if rising else -1 / t
    # H = V o F with F(x, y) = (x + f(y), y), V(x, y) = (x, x + y)
    return mp.matrix([[1, 0], [1, 1]]) * mp.matrix([[1, s], [0, 1]])


def block(j: int, t, direction: str):
    out = mp.eye(2)
    for sym in WORDS[j]:
        m = step_matrix(sym, t)
        if direction == BWD:
            m = m ** -1
        out = m * out
    return out


def unstable_gradient(m):
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    tr, det = a + d, a * d - b * c
    disc = mp.sqrt(tr * tr - 4 * det)
    lam = (tr + disc) / 2 if abs((tr + disc) / 2) > 1 else (tr - disc) / 2
    return (lam - a) / b


def stable_gradient(m):
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    tr, det = a + d, a * d - b * c
    disc = mp.sqrt(tr * tr - 4 * det)
    lam = (tr + disc) / 2 if abs((tr + disc) / 2) < 1 else (tr - disc) / 2
    return (lam - a) / b


def sup_ratio(m, g):
    vx, vy = mp.mpf(1), g
    wx, wy = m[0, 0] * vx + m[0, 1] * vy, m[1, 0] * vx + m[1, 1] * vy
    return max(abs(wx), abs(wy)) / max(abs(vx), abs(vy))


def cone(branch: str, value, direction: str):
    t = fold(branch, value)
    lo, hi = CONE[(branch, direction)]
    return unstable_gradient(block(lo, t, direction)), unstable_gradient(block(hi, t, direction))


def min_stretch(j: int, branch: str, value, direction: str):
    """Exact minimum of the sup-norm stretch over the closed cone."""
    t = fold(branch, value)
    m = block(j, t, direction)
    g_lo, g_hi = cone(branch, value, direction)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    cands = [g_lo, g_hi]
    for num, den in ((-a, b), (-c, d), (c - a, b - d), (-(a + c), b + d)):
        if den != 0:
            cands.append(num / den)
    cands += [mp.mpf(1), mp.mpf(-1)]
    return min(sup_ratio(m, g) for g in cands if g_lo <= g <= g_hi)


def boundary_stretch(j: int, branch: str, value, direction: str):
    t = fold(branch, value)
    m = block(j, t, direction)
    return min(sup_ratio(m, g) for g in cone(branch, value, direction))


def share(k):
    return 1 / (1 - 1 / k)


def eps0():
    f = lambda e: boundary_stretch(2, "eps", e, BWD) - share(boundary_stretch(1, "eps", e, BWD))  # noqa: E731
    return mp.findroot(f, (mp.mpf("0.005"), mp.mpf("0.02")), solver="anderson")


def eps3():
    f = lambda e: boundary_stretch(3, "eps", e, BWD) - share(boundary_stretch(1, "eps", e, BWD))  # noqa: E731
    return mp.findroot(f, (mp.mpf("0.086"), mp.mpf("0.091")), solver="anderson")


def eta1():
    def f(n):
        k = [boundary_stretch(j, "eta", n, BWD) for j in (1, 2, 3)]
        return 1 - sum(1 / x for x in k)

    return mp.findroot(f, (mp.mpf("0.3"), mp.mpf("0.333")), solver="anderson")


# double-precision twin for bulk sampling ------------------------------------

def _fmul(p, q):
    return (p[0] * q[0] + p[1] * q[2], p[0] * q[1] + p[1] * q[3],
            p[2] * q[0] + p[3] * q[2], p[2] * q[1] + p[3] * q[3])


def fblock(j: int, t: float, direction: str):
    out = (1.0, 0.0, 0.0, 1.0)
    for sym in WORDS[j]:
        s = 1 / (1 - t) if sym else -1 / t
        m = (1.0, s, 1.0, 1.0 + s)
        if direction == BWD:
            m = (m[3], -m[1], -m[2], m[0])
        out = _fmul(m, out)
    return out


def funstable(m):
    a, b, c, d = m
    tr, det = a + d, a * d - b * c
    disc = (tr * tr - 4 * det) ** 0.5
    lam = (tr + disc) / 2 if abs((tr + disc) / 2) > 1 else (tr - disc) / 2
    return (lam - a) / b


def fboundary_stretch(j: int, branch: str, value: float, direction: str) -> float:
    t = value if branch == "eta" else 0.5 - value
    lo, hi = CONE[(branch, direction)]
    m = fblock(j, t, direction)
    out = math.inf
    for g in (funstable(fblock(lo, t, direction)), funstable(fblock(hi, t, direction))):
        out = min(out, max(abs(m[0] + m[1] * g), abs(m[2] + m[3] * g)) / max(1.0, abs(g)))
    return out
