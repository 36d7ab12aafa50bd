"""Certified constants and inequalities behind the growth and segment arguments.

Every function of the parameter below is written with generic arithmetic so
it evaluates on floats, ``IScalar`` boxes and ``IDual`` derivative boxes.
Window constants are cached: they are pure and used everywhere.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from .certify import (
    CERTIFIED,
    FAILED,
    Certificate,
    RootResult,
    Timer,
    bnb_maximize,
    certify_positive,
    prove_positive,
    combine,
    solve_root,
)
from .cone_engine import (
    BLOCK_SETS,
    boundary_ratios,
    eigen_gradient,
    min_boundary_expansion,
    verify_dominance,
    verify_expansion,
    verify_invariance,
)
from .geometry import line_intersection
from .interval import IDual, IScalar, as_interval, sqrt, value_of
from .map_family import BWD, EPS, ETA, FWD
from .partition_geometry import (
    k1_of,
    k2_of,
    k5_of,
    q1_x,
    x_prime_backward,
    x_prime_forward,
    x_star_backward,
    x_star_forward,
)

ETA_MAX = 1.0 / 3.0


# ---------------------------------------------------------------------------
# expansion factors as functions of the parameter
# ---------------------------------------------------------------------------

def script_k(j: int, e):
    """Minimal expansion of MF_j over the backward cone on the eps branch."""
    return min_boundary_expansion(f"MF{j}", EPS, BWD, e)


def script_k_forward(j: int, e):
    return min_boundary_expansion(f"M{j}", EPS, FWD, e)


def eta_k(j: int, eta, direction: str = FWD):
    block = f"M{j}" if direction == FWD else f"MF{j}"
    return min_boundary_expansion(block, ETA, direction, eta)


def share_threshold(k1):
    """1 / (1 - 1/K1): the expansion a complementary piece must beat."""
    return 1 / (1 - 1 / k1)


def k2_margin(e):
    return script_k(2, e) - share_threshold(script_k(1, e))


def k3_margin(e):
    return script_k(3, e) - share_threshold(script_k(1, e))


def eta_pair_margin(eta):
    """K3 > 1/(1 - 1/K1) for the forward blocks."""
    return eta_k(3, eta) - share_threshold(eta_k(1, eta))


def eta_triple_margin(eta, direction: str = FWD):
    k1, k2, k3 = (eta_k(j, eta, direction) for j in (1, 2, 3))
    return k3 - 1 / (1 - 1 / k1 - 1 / k2)


def mf3_boundary_gap(e):
    """Difference of the MF3 stretch on the two cone boundaries."""
    lo, hi = boundary_ratios("MF3", EPS, BWD, e)
    return lo - hi


def eps2_cubic(e):
    return ((8 * e + 20) * e + 10) * e - 1


def h_backward(e):
    """Gradient of the chord that would join the two parts of A2 through A3."""
    return -(1 - 6 * e) / (4 * e)


def h_forward(e):
    return (0.5 - e) / (2 * e)


# ---------------------------------------------------------------------------
# window constants
# ---------------------------------------------------------------------------

ROOT_TOL = 1e-9


@lru_cache(maxsize=None)
def eps2_root() -> RootResult:
    return solve_root(eps2_cubic, 0.05, 0.1, tol=ROOT_TOL)


def solve_eps2() -> IScalar:
    return eps2_root().enclosure


@lru_cache(maxsize=None)
def eps0_root() -> RootResult:
    return solve_root(k2_margin, 0.005, 0.02, tol=ROOT_TOL)


def solve_eps0() -> IScalar:
    return eps0_root().enclosure


@lru_cache(maxsize=None)
def eps3_root() -> RootResult:
    # MF3 loses hyperbolicity near 0.092, so the bracket stays below it.
    return solve_root(k3_margin, 0.086, 0.091, tol=ROOT_TOL)


def solve_eps3() -> IScalar:
    return eps3_root().enclosure


@lru_cache(maxsize=None)
def eps_star_root() -> RootResult:
    return solve_root(mf3_boundary_gap, 0.06, 0.085, tol=ROOT_TOL)


def solve_eps_star() -> IScalar:
    return eps_star_root().enclosure


def eta0_exact() -> IScalar:
    return 1 - 1 / sqrt(IScalar(2.0))


@lru_cache(maxsize=None)
def eta1_root() -> RootResult:
    return solve_root(lambda n: eta_triple_margin(n, BWD), 0.3, 0.333, tol=ROOT_TOL)


def solve_eta_windows() -> tuple[IScalar, IScalar]:
    return eta0_exact(), eta1_root().enclosure


@lru_cache(maxsize=None)
def eta_thresholds() -> tuple[IScalar, IScalar]:
    """Upper limits of the two forward growth cases (pair and triple splits)."""
    pair = solve_root(eta_pair_margin, 0.3, 0.3333, tol=ROOT_TOL).enclosure
    triple = solve_root(eta_triple_margin, 0.3, 0.3333, tol=ROOT_TOL).enclosure
    return pair, triple


def eps_window() -> tuple[float, float]:
    """Float window from just above eps0 up to (and covering) eps2."""
    return solve_eps0().hi, solve_eps2().hi


@dataclass
class SupResult:
    value: IScalar
    argmax: float
    k1_slope_sign: int  # certified sign of dK1/de on the sub-window ending at the argmax side


SLOPE_PROBE = 0.01


@lru_cache(maxsize=None)
def _c_result() -> SupResult:
    """K1 is not monotone on the window (it peaks near 0.03); the sup sits at an end."""
    lo, hi = eps_window()
    res = bnb_maximize(lambda e: share_threshold(script_k(1, e)), lo, hi, tol=1e-10)
    slope = _derivative(lambda e: script_k(1, e))
    a, b = (res.argmax - SLOPE_PROBE, res.argmax) if res.argmax > 0.5 * (lo + hi) else (res.argmax, res.argmax + SLOPE_PROBE)
    if prove_positive(slope, a, b, use_derivative=False).verdict == CERTIFIED:
        sign = 1
    elif prove_positive(lambda e: -slope(e), a, b, use_derivative=False).verdict == CERTIFIED:
        sign = -1
    else:
        sign = 0
    return SupResult(IScalar(res.lower, res.upper), res.argmax, sign)


def compute_c() -> IScalar:
    """Enclosure of sup 1/(1 - 1/K1) over the eps window."""
    return _c_result().value


def c_location() -> SupResult:
    return _c_result()


def k5_plus() -> IScalar:
    """Least steep unstable MF2 gradient on the window, attained at eps0."""
    return as_interval(k5_of(solve_eps0()))


def k5_minus() -> IScalar:
    return as_interval(k5_of(solve_eps2()))


def k4_minus() -> IScalar:
    """Steepest unstable MF3 gradient on the window, attained at eps2."""
    return as_interval(eigen_gradient("MF3", EPS, solve_eps2()))


def k6() -> IScalar:
    """Slope of the chord of k5 across the window."""
    return (k5_minus() - k5_plus()) / (solve_eps2() - solve_eps0())


@dataclass(frozen=True)
class WindowConstants:
    eps0: IScalar
    eps2: IScalar
    eps3: IScalar
    eps_star: IScalar
    eta0: IScalar
    eta1: IScalar
    c: IScalar
    k5_plus: IScalar
    k4_minus: IScalar
    k6: IScalar

    def ordered(self) -> bool:
        return (
            self.eps0.hi < self.eps_star.lo
            and self.eps_star.hi < self.eps2.lo
            and self.eps2.hi < self.eps3.lo
            and self.eta0.hi < self.eta1.lo
            and self.eta1.hi < ETA_MAX
            and self.c.lo > 1.0
        )

    def to_dict(self) -> dict:
        return {name: [getattr(self, name).lo, getattr(self, name).hi] for name in sorted(self.__dataclass_fields__)}


@lru_cache(maxsize=None)
def window_constants() -> WindowConstants:
    eta0, eta1 = solve_eta_windows()
    return WindowConstants(
        eps0=solve_eps0(),
        eps2=solve_eps2(),
        eps3=solve_eps3(),
        eps_star=solve_eps_star(),
        eta0=eta0,
        eta1=eta1,
        c=compute_c(),
        k5_plus=k5_plus(),
        k4_minus=k4_minus(),
        k6=k6(),
    )


# ---------------------------------------------------------------------------
# the B1 / B2 bounds
# ---------------------------------------------------------------------------

def chord_k5(e):
    """Linear interpolation of k5 between the window ends."""
    return (e - solve_eps0()) * k6() + k5_plus()


def k4_closed_form(e, k5):
    """Closed form of the MF4 stretch on the direction (1, k5)."""
    return (3 + 46 * e + 52 * e * e + 8 * e ** 3) / (1 + 2 * e - 4 * e * e - 8 * e ** 3) - (
        12 * e + 14
    ) / (1 - 4 * e * e) * k5


def b1(e):
    """Lower bound on the A4 share of a cone-aligned curve crossing A4 into A5."""
    k5p, k4m = k5_plus(), k4_minus()
    top = (2 * e + 1) * (2 * e + 1 - 2 * k5p)
    bottom = (2 * e + 1) * (-k4m * (2 * e + 3) - k5p * (2 * e + 5)) + 12 * e * e + 16 * e + 1
    return top / bottom


def q3_prime(e):
    """Where the A5 segment of gradient k5+ through (1/2 - e, 0) meets L1."""
    k1, x0, k5p = k1_of(e), q1_x(e), k5_plus()
    t = 0.5 - e
    x = (k1 * x0 - k5p * t) / (k1 - k5p)
    return x, k1 * (x - x0)


def b1_raw(e):
    """The same bound before expansion, built from Q3' and the boundary gradients."""
    k2, k4m = k2_of(e), k4_minus()
    x, y = q3_prime(e)
    return (k2 * x - y) / ((0.5 - e) * (k2 - k4m) + k4m * x)


def b1_numerator_raw(e, k4, k5):
    k1 = k1_of(e)
    return (
        k5 * (2 * e - 1) ** 2 * (2 * e + 5)
        - (1 - 2 * e) ** 2 * (1 + 2 * e)
        + (2 * e + 1) ** 2 * (2 * e + 5) * (k1 - k5)
    )


def b1_denominator_raw(e, k4, k5):
    k1 = k1_of(e)
    return k4 * (2 * e + 1) * (2 * e + 5) * (-k5 * (2 * e + 5) + 1 + 2 * e) + (2 * e + 5) ** 2 * (k1 - k5) * (
        4 * e - k4 * (2 * e + 1)
    )


def b1_numerator_factored(e, k4, k5):
    return (2 * e + 5) * (4 * e * (2 * e + 1) - 8 * e * k5)


def b1_denominator_factored(e, k4, k5):
    return (2 * e + 5) * (
        -4 * e * k4 * (2 * e + 3) - 4 * e * k5 * (2 * e + 5) + 4 * e / (2 * e + 1) * (12 * e * e + 16 * e + 1)
    )


def b2(e):
    """Lower bound on the MF4 stretch using the chord in place of k5."""
    return k4_closed_form(e, chord_k5(e))


def b1b2(e):
    return b1(e) * b2(e)


def p_num(e):
    k5p = k5_plus()
    return (2 * e + 1 - 2 * k5p) * (3 + 46 * e + 52 * e * e + 8 * e ** 3 - (24 * e * e + 40 * e + 14) * chord_k5(e))


def p_num_prime(e):
    k5p, slope, big_l = k5_plus(), k6(), chord_k5(e)
    return (
        6 + 92 * e + 104 * e * e + 16 * e ** 3
        - (48 * e * e + 80 * e + 28) * big_l
        + (2 * e + 1 - 2 * k5p) * (46 + 104 * e + 24 * e * e - (48 * e + 40) * big_l - slope * (24 * e * e + 40 * e + 14))
    )


def q_den(e):
    k5p, k4m = k5_plus(), k4_minus()
    return (8 * e ** 3 + 4 * e * e - 2 * e - 1) * (k4m * (2 * e + 3) + k5p * (2 * e + 5)) + (1 - 4 * e * e) * (
        12 * e * e + 16 * e + 1
    )


def q_den_prime(e):
    k5p, k4m = k5_plus(), k4_minus()
    return (
        (24 * e * e + 8 * e - 2) * (k4m * (2 * e + 3) + k5p * (2 * e + 5))
        + (8 * e ** 3 + 4 * e * e - 2 * e - 1) * (2 * k4m + 2 * k5p)
        - 8 * e * (12 * e * e + 16 * e + 1)
        + (1 - 4 * e * e) * (24 * e + 16)
    )


def _derivative(f: Callable) -> Callable:
    def d(e):
        return f(IDual.variable(as_interval(e))).der

    return d


def monotonicity_bound() -> IScalar:
    """P'(eps0) Q(eps0) - P(eps2) Q'(eps0)."""
    e0, e2 = solve_eps0(), solve_eps2()
    return p_num_prime(e0) * q_den(e0) - p_num(e2) * q_den_prime(e0)


# ---------------------------------------------------------------------------
# segment-bound chain
# ---------------------------------------------------------------------------

def s4_diameter(point, k4, k2):
    """x-extent of the segment of gradient k4 from ``point`` back to the line y = k2 x."""
    x1, _ = point
    xi, _ = line_intersection(point, (1.0, k4), (0.0, 0.0), (1.0, k2))
    return x1 - xi


def q3_actual(e):
    k1, x0, k5 = k1_of(e), q1_x(e), k5_of(e)
    t = 0.5 - e
    x = (k1 * x0 - k5 * t) / (k1 - k5)
    return x, k1 * (x - x0)


def segment_share(point, e, k4):
    """diam(S4) / (diam(S4) + diam(S5)) for the A5 segment ending on y = x - (1/2 - e)."""
    s4 = s4_diameter(point, k4, k2_of(e))
    s5 = (0.5 - e) - point[0]
    return s4 / (s4 + s5)


def segment_bound_gap(e):
    """Share through Q3 minus share through Q3' (non-negative, zero at eps0)."""
    k4m = k4_minus()
    return segment_share(q3_actual(e), e, k4m) - segment_share(q3_prime(e), e, k4m)


def delta_ratio(e):
    """Delta4 / Delta5 predicted from the gradients alone."""
    k1, k2, k4m = k1_of(e), k2_of(e), k4_minus()
    return (k1 - k2) / (k2 - k4m)


def segment_reduced_margin(e):
    """k1 x0 - (k1 - k2)(1/2 - e): the reduced form of the segment claim."""
    k1, k2 = k1_of(e), k2_of(e)
    return k1 * q1_x(e) - (k1 - k2) * (0.5 - e)


def segment_final_margin(e):
    return (1 + 2 * e) ** 2 - (1 - 4 * e + 4 * e * e)


def segment_ratio_margin(e):
    """diam(S4')/diam(S5') - Delta4/Delta5."""
    k2, k4m = k2_of(e), k4_minus()
    p = q3_prime(e)
    s4 = s4_diameter(p, k4m, k2)
    return s4 / ((0.5 - e) - p[0]) - delta_ratio(e)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def _window(window) -> tuple[float, float]:
    return eps_window() if window is None else (float(window[0]), float(window[1]))


def k_inequality_certificates(window=None) -> list[Certificate]:
    """K2 and K3 beat the share threshold on the eps window.

    The K2 margin vanishes at eps0. On the default window positivity just
    above the root is obtained from the margin increasing across a box that
    contains the root enclosure, then ordinary positivity takes over.
    """
    lo, hi = _window(window)
    parts = []
    k2_lo = lo
    if window is None:
        e0 = solve_eps0()
        k2_lo = e0.hi + 1e-6
        parts.append(certify_positive("k2_margin_increasing_at_eps0", _derivative(k2_margin), e0.lo, k2_lo,
                                      use_derivative=False))
    parts.append(certify_positive("k2_exceeds_share_threshold", k2_margin, k2_lo, hi))
    parts.append(certify_positive("k3_exceeds_share_threshold", k3_margin, lo, hi))
    return parts


def verify_k_inequalities(window=None) -> Certificate:
    lo, hi = _window(window)
    return combine("growth_share_inequalities", (lo, hi), k_inequality_certificates(window))


def verify_expanded_b1_identity(window=None, samples: int = 200) -> Certificate:
    """Raw and expanded forms of B1 agree; N and D match their factorisations."""
    lo, hi = _window(window)
    k4m, k5p = k4_minus(), k5_plus()
    worst = worst_nd = 0.0
    disagree = None
    with Timer() as timer:
        for i in range(samples):
            e = IScalar(lo + (hi - lo) * i / (samples - 1))
            raw, expanded = b1_raw(e), b1(e)
            gap = max(abs(raw.mid() - expanded.mid()), 0.0)
            worst = max(worst, gap)
            n_raw, n_fac = b1_numerator_raw(e, k4m, k5p), b1_numerator_factored(e, k4m, k5p)
            d_raw, d_fac = b1_denominator_raw(e, k4m, k5p), b1_denominator_factored(e, k4m, k5p)
            nd = max(abs(n_raw.mid() - n_fac.mid()), abs(d_raw.mid() - d_fac.mid()))
            worst_nd = max(worst_nd, nd)
            ratio_gap = abs((n_raw / d_raw).mid() - expanded.mid())
            if gap > 1e-10 or nd > 1e-10 or ratio_gap > 1e-10:
                disagree = e.mid()
                break
    parts = [
        certify_positive("b1_raw_positive", b1_raw, lo, hi),
        certify_positive("b1_expanded_positive", b1, lo, hi),
    ]
    cert = combine("b1_expanded_identity", (lo, hi), parts, max_form_gap=worst, max_factorisation_gap=worst_nd)
    if disagree is not None:
        cert.verdict, cert.witness = FAILED, disagree
    cert.subdivisions += samples
    cert.wall_time_ms = timer.ms
    return cert


def verify_segment_bound(window=None) -> Certificate:
    lo, hi = _window(window)
    e0 = solve_eps0()
    parts = [
        certify_positive("final_polynomial_margin", segment_final_margin, lo, hi),
        certify_positive("reduced_segment_margin", segment_reduced_margin, lo, hi),
        certify_positive("ratio_segment_margin", segment_ratio_margin, lo, hi),
        certify_positive("b1_numerator_positive", lambda e: k2_of(e) * q3_prime(e)[0] - q3_prime(e)[1], lo, hi),
        certify_positive("b1_denominator_positive",
                         lambda e: (0.5 - e) * (k2_of(e) - k4_minus()) + k4_minus() * q3_prime(e)[0], lo, hi),
    ]
    gap_at_e0 = segment_bound_gap(e0)
    cert = combine(
        "segment_bound",
        (lo, hi),
        parts,
        gap_at_eps0=[gap_at_e0.lo, gap_at_e0.hi],
        final_margin_at_eps2=segment_final_margin(solve_eps2()).lo,
    )
    if not gap_at_e0.contains_zero() and cert.verdict == CERTIFIED:
        cert.verdict, cert.witness = FAILED, e0.mid()
    return cert


SIGN_CLAIMS = {
    "P": (p_num, 1),
    "P'": (p_num_prime, 1),
    "P''": (_derivative(p_num_prime), 1),
    "Q": (q_den, 1),
    "Q'": (q_den_prime, 1),
    "Q''": (_derivative(q_den_prime), -1),
}


def verify_b1b2_monotone(window=None) -> Certificate:
    lo, hi = _window(window)
    parts = []
    for name, (f, sign) in SIGN_CLAIMS.items():
        g = f if sign > 0 else (lambda e, f=f: -f(e))
        label = f"{name} {'>' if sign > 0 else '<'} 0"
        parts.append(certify_positive(label, g, lo, hi, use_derivative=False))
    bound = monotonicity_bound()
    value = b1b2(solve_eps0())
    cert = combine(
        "b1b2_monotone",
        (lo, hi),
        parts,
        monotonicity_bound=[bound.lo, bound.hi],
        b1b2_at_eps0=[value.lo, value.hi],
        c_upper=compute_c().hi,
    )
    if cert.verdict == CERTIFIED and not (bound.lo > 0 and value.lo > compute_c().hi):
        cert.verdict, cert.witness = FAILED, solve_eps0().mid()
    return cert


def _increasing(claim, f, lo, hi):
    return certify_positive(claim, _derivative(f), lo, hi, use_derivative=False)


def _decreasing(claim, f, lo, hi):
    d = _derivative(f)
    return certify_positive(claim, lambda e: -d(e), lo, hi, use_derivative=False)


def g3_backward(e):
    return eigen_gradient("MF3", EPS, e)


def g3_forward(e):
    return eigen_gradient("M3", EPS, e)


def eta_g3_forward(n):
    return eigen_gradient("M3", ETA, n)


def eta_g3_backward(n):
    return eigen_gradient("MF3", ETA, n)


def x_star_eta(n):
    return x_star_forward(n, eta_g3_forward(n))


def x_star_eta_backward(n):
    return x_star_backward(n, eta_g3_backward(n))


def _ordered(claim: str, left: IScalar, right: IScalar, at: float) -> Certificate:
    ok = left.hi < right.lo
    return Certificate(claim, (at, at), CERTIFIED if ok else FAILED, witness=None if ok else at,
                       bound_values={"left": [left.lo, left.hi], "right": [right.lo, right.hi]}, subdivisions=1)


def verify_geometric_exclusions(window=None) -> Certificate:
    lo, hi = _window(window)
    e2 = solve_eps2()
    eta0, eta1 = solve_eta_windows()
    a, b = eta0.lo, eta1.hi
    eps_back = combine("eps_backward_h_exclusion", (lo, hi), [
        _decreasing("g3u_backward_decreasing", g3_backward, lo, hi),
        _increasing("h_backward_increasing", h_backward, lo, hi),
        _ordered("g3u_backward(eps2) > h_backward(eps2)", h_backward(e2), g3_backward(e2), e2.mid()),
        certify_positive("g3u_backward_above_h", lambda e: g3_backward(e) - h_backward(e), lo, hi),
    ])
    eps_fwd = combine("eps_forward_v_exclusion", (lo, hi), [
        _increasing("g3u_forward_increasing", g3_forward, lo, hi),
        _decreasing("h_forward_decreasing", h_forward, lo, hi),
        _ordered("g3u_forward(eps2) < h_forward(eps2)", g3_forward(e2), h_forward(e2), e2.mid()),
        certify_positive("h_forward_above_g3u", lambda e: h_forward(e) - g3_forward(e), lo, hi),
    ])
    eta_fwd = combine("eta_forward_xstar_exclusion", (a, b), [
        _increasing("xstar_increasing", x_star_eta, a, b),
        _decreasing("xprime_decreasing", x_prime_forward, a, b),
        _ordered("xstar(eta1) < xprime(eta1)", x_star_eta(eta1), x_prime_forward(eta1), eta1.mid()),
    ])
    eta_bwd = combine("eta_backward_xstar_exclusion", (a, b), [
        _increasing("xprime_b_increasing", x_prime_backward, a, b),
        _decreasing("xstar_b_decreasing", x_star_eta_backward, a, b),
        _ordered("xprime_b(eta1) < xstar_b(eta1)", x_prime_backward(eta1), x_star_eta_backward(eta1), eta1.mid()),
    ])
    values = {
        "h_backward_eps2": h_backward(e2).mid(),
        "g3u_backward_eps2": g3_backward(e2).mid(),
        "g3u_forward_eps2": g3_forward(e2).mid(),
        "h_forward_eps2": h_forward(e2).mid(),
        "xstar_eta1": x_star_eta(eta1).mid(),
        "xprime_eta1": x_prime_forward(eta1).mid(),
        "xstar_b_eta1": x_star_eta_backward(eta1).mid(),
        "xprime_b_eta1": x_prime_backward(eta1).mid(),
    }
    return combine("geometric_exclusions", (lo, hi), [eps_back, eps_fwd, eta_fwd, eta_bwd], **values)


def verify_cones(branch: str, window=None) -> list[Certificate]:
    if branch == EPS:
        lo, hi = _window(window)
        lo = max(lo, solve_eps0().hi + 1e-4) if window is None else lo
    else:
        lo, hi = (1e-4, ETA_MAX - 1e-4) if window is None else (float(window[0]), float(window[1]))
    out = []
    for direction in (FWD, BWD):
        blocks = BLOCK_SETS[(branch, direction)]
        out.append(verify_invariance(blocks, direction, branch, lo, hi))
        out.append(verify_expansion(blocks, direction, branch, lo, hi))
    if branch == EPS:
        out.append(verify_dominance(lo, hi))
    return out


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

@dataclass
class VerificationReport:
    branch: str
    window: Optional[tuple[float, float]]
    constants: WindowConstants
    extras: dict
    certificates: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        verdicts = {c.verdict for c in self.certificates}
        if FAILED in verdicts:
            return FAILED
        if verdicts - {CERTIFIED}:
            return "Inconclusive"
        return CERTIFIED

    def to_dict(self) -> dict:
        return {
            "branch": self.branch,
            "certificates": [c.to_dict() for c in self.certificates],
            "constants": self.constants.to_dict(),
            "extras": {k: self.extras[k] for k in sorted(self.extras)},
            "verdict": self.verdict,
            "window": None if self.window is None else list(self.window),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        d = json.loads(text)
        consts = WindowConstants(**{k: IScalar(*v) for k, v in d["constants"].items()})
        report = cls(d["branch"], None if d["window"] is None else tuple(d["window"]), consts, d["extras"])
        report.certificates = [Certificate.from_dict(c) for c in d["certificates"]]
        return report


def _interval_list(x) -> list:
    x = as_interval(x)
    return [x.lo, x.hi]


def full_report(branch: str = "all", window=None, timings: bool = False) -> VerificationReport:
    """Every constant and certificate for one branch ("eps", "eta" or "all")."""
    consts = window_constants()
    pair, triple = eta_thresholds()
    extras = {
        "constants_ordered": consts.ordered(),
        "eta_pair_threshold": _interval_list(pair),
        "eta_triple_threshold": _interval_list(triple),
        "c_argmax": c_location().argmax,
        "k1_slope_sign": c_location().k1_slope_sign,
        "b1b2_eps0": _interval_list(b1b2(consts.eps0)),
        "monotonicity_bound": _interval_list(monotonicity_bound()),
    }
    certs: list[Certificate] = []
    if branch in (EPS, "all"):
        certs.extend(k_inequality_certificates(window))
        certs.append(verify_expanded_b1_identity(window))
        certs.append(verify_segment_bound(window))
        certs.append(verify_b1b2_monotone(window))
        certs.extend(verify_cones(EPS, window))
    if branch in (ETA, "all"):
        # The margin vanishes at eta1, so the certified window stops just short of it.
        lo, hi = (1e-4, consts.eta1.lo - 1e-7) if window is None or branch == "all" else window
        certs.append(combine("eta_growth_inequality", (lo, hi), [
            certify_positive("eta_triple_backward", lambda n: eta_triple_margin(n, BWD), lo, hi),
        ]))
        certs.extend(verify_cones(ETA, None if branch == "all" else window))
    certs.append(verify_geometric_exclusions(window if branch == EPS else None))
    if not consts.ordered():
        certs.append(Certificate("window_constant_order", (0.0, 0.0), FAILED))
    if not timings:
        for c in certs:
            c.wall_time_ms = None
    return VerificationReport(branch, None if window is None else tuple(map(float, window)), consts, extras, certs)
