import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conemix import geometry as geo
from conemix.interval import IScalar
from conemix.map_family import BWD, EPS, ETA, FWD, Params, SingularOrbit, TorusPoint, apply_forward, apply_inverse, return_time
from conemix.partition_geometry import (
    EPS_POINTS,
    ETA_POINTS,
    MissingCurveData,
    UnknownPoint,
    a1_lift,
    a2_subdivision,
    chain_inside,
    derive_curves,
    eps_regions,
    frak_b_lift,
    involution,
    load_curve_data,
    named_point,
    parse_curve_table,
    push_forward_branch,
    quads_at,
    region_at,
    region_b_lift,
    return_partition,
    special_quads,
)

ETA_VALUES = [0.05, 0.15, 0.25, 0.31, 0.33]
EPS_VALUES = [0.01, 0.03, 0.05, 0.07, 0.085]


@pytest.mark.parametrize("domain", ["backward_A", "forward_frak_a"])
@pytest.mark.parametrize("eta", ETA_VALUES)
def test_partition_areas(domain, eta):
    parts = return_partition(domain, Params(ETA, eta))
    total = sum(r.area() for r in parts)
    assert total == pytest.approx(1 - eta, abs=1e-12)
    a1 = [r for r in parts if r.label.upper() == "A1"]
    assert a1[0].area() == pytest.approx((1 - eta) ** 2, abs=1e-12)
    a2 = [r for r in parts if r.label.upper() == "A2"]
    assert len(a2) == 2 and a2[0].area() == pytest.approx(a2[1].area())


@pytest.mark.parametrize("eps", EPS_VALUES)
def test_a2_subdivision_tiles_a2(eps):
    p = Params(EPS, eps)
    a4, a5 = a2_subdivision(p)
    a2 = sum(r.area() for r in return_partition("backward_A", p) if r.label == "A2")
    assert sum(r.area() for r in a4 + a5) == pytest.approx(a2, abs=1e-12)
    assert all(r.area() > 0 for r in a4 + a5)


@given(st.floats(0.02, 0.32), st.floats(0, 1), st.floats(0, 1))
def test_labels_match_raw_return_times(eta, x, y):
    p = Params(ETA, eta)
    for domain, direction in (("backward_A", BWD), ("forward_frak_a", FWD)):
        region = region_at(TorusPoint(x, y), p, domain)
        if region is None:
            continue
        try:
            assert return_time(TorusPoint(x, y), p, direction) == region.return_time
        except SingularOrbit:
            pass


@given(st.floats(0.02, 0.32), st.floats(0, 1), st.floats(0, 1))
def test_involution_conjugates_the_map_to_its_inverse(eta, x, y):
    p = Params(ETA, eta)
    s = involution(eta)

    def s_torus(z):
        return TorusPoint(*s((z.x, z.y)))

    z = TorusPoint(x, y)
    lhs = s_torus(apply_forward(s_torus(z), p))
    rhs = apply_inverse(z, p)
    dx, dy = lhs.x - rhs.x, lhs.y - rhs.y
    assert abs(dx - round(dx)) < 1e-9 and abs(dy - round(dy)) < 1e-9


@pytest.mark.parametrize("eta", ETA_VALUES)
def test_named_points_sit_on_their_lines(eta):
    p = Params(ETA, eta)
    for pid in ETA_POINTS:
        for r in named_point(pid, p).residuals():
            assert abs(r.mid()) < 1e-12 and r.contains(0.0)


@pytest.mark.parametrize("eps", EPS_VALUES)
def test_eps_named_points(eps):
    p = Params(EPS, eps)
    for pid in EPS_POINTS:
        for r in named_point(pid, p).residuals():
            assert r.contains(0.0)
    q1 = named_point("Q1", p).coords
    q2 = named_point("Q2", p).coords
    e = eps
    assert q1[0].contains((-4 * e ** 3 - 2 * e ** 2 + e + 0.5) / (12 * e ** 2 + 16 * e + 1)) or \
        abs(q1[0].mid() - (-4 * e ** 3 - 2 * e ** 2 + e + 0.5) / (12 * e ** 2 + 16 * e + 1)) < 1e-14
    assert abs(q2[0].mid() - (1 + 2 * e) / (2 + 2 * e)) < 1e-14
    assert abs(q2[1].mid() - (3 * e + 2 * e * e) / (2 + 2 * e)) < 1e-14


def test_unknown_points_raise():
    with pytest.raises(UnknownPoint):
        named_point("Q1", Params(ETA, 0.2))
    with pytest.raises(UnknownPoint):
        named_point("R1", Params(EPS, 0.05))


def test_quadrilateral_selection_follows_eta0():
    assert {q.name for q in special_quads(Params(ETA, 0.25))} >= {"Q2_forward", "Q2_backward", "Q3_forward"}
    assert {q.name for q in special_quads(Params(ETA, 0.31))} >= {"Q2p_forward", "Q2p_backward"}
    with pytest.raises(ValueError):
        special_quads(Params(ETA, IScalar(0.29, 0.295)))
    with pytest.raises(ValueError):
        special_quads(Params(EPS, 0.05))


SIDE = {
    "lower": lambda p, t: p[1],
    "upper": lambda p, t: p[1] - (1 - t),
    "left": lambda p, t: p[1] - p[0] + t,
    "right": lambda p, t: p[1] - p[0] + 1,
}


@pytest.mark.parametrize("t", [Fraction(1, 4), Fraction(1, 10), Fraction(3, 10)])
def test_exact_quadrilateral_images_hit_a1_sides_exactly(t):
    """With rational eta the long sides' vertex images land on A1's boundary
    lines with zero residual (up to an integer translate)."""
    below = t < Fraction(2929, 10000)
    for quad in quads_at(t, below):
        corners = [(float(x), float(y)) for x, y in quad.corners]
        centre = geo.centroid(corners)
        images, word = push_forward_branch(quad.corners, centre, float(t), t, quad.direction, quad.power)
        assert len(word) == quad.power
        sides = ("lower", "upper") if quad.spans == "v" else ("left", "right")
        hit = []
        for i, j in quad.long_sides:
            found = [s for s in sides if all((SIDE[s](images[k], t) % 1) == 0 for k in (i, j))]
            assert len(found) == 1, (quad.name, i, j)
            hit.append(found[0])
        assert set(hit) == set(sides)


def test_curve_table_matches_branch_recipes():
    table = load_curve_data()
    for e in (Fraction(1, 50), Fraction(1, 20), Fraction(2, 25)):
        derived = derive_curves(e)
        for name in ("omega", "zeta", "alpha", "beta"):
            stored = table.curve(name, e).vertices
            numeric = derived[name].float_vertices()
            assert len(stored) == len(numeric) == 4
            for (x, y), (u, v) in zip(stored, numeric):
                assert abs(float(x) - u) < 1e-9 and abs(float(y) - v) < 1e-9


def test_curve_regions_sit_in_their_hosts():
    for eps in EPS_VALUES:
        p = Params(EPS, eps)
        frak_d, d = eps_regions(p)
        t = p.eta_f
        assert chain_inside(frak_d.float_polygon(), frak_b_lift(t), tol=1e-12)
        assert chain_inside(d.float_polygon(), region_b_lift(t), tol=1e-12)
        for curve in frak_d.curves + d.curves:
            xs = [v[0] for v in curve.float_vertices()]
            assert xs == sorted(xs)


def test_missing_and_malformed_curve_data(tmp_path):
    with pytest.raises(MissingCurveData):
        load_curve_data(tmp_path / "absent.csv")
    with pytest.raises(MissingCurveData):
        eps_regions(Params(EPS, 0.05), tmp_path / "absent.csv")
    with pytest.raises(ValueError):
        parse_curve_table("omega,1,1,1\n")
    empty = parse_curve_table("curve,index,x_num,x_den,y_num,y_den\n")
    with pytest.raises(MissingCurveData):
        empty.curve("omega", 0.05)


def test_sampling_stays_inside():
    rng = random.Random(2)
    p = Params(EPS, 0.05)
    for region in return_partition("backward_A", p):
        for q in region.sample(rng, 50):
            assert region.contains(q)


def test_a1_lift_is_the_a1_region():
    p = Params(ETA, 0.2)
    a1 = next(r for r in return_partition("backward_A", p) if r.label == "A1")
    assert set(a1.float_lift()) == set((float(x), float(y)) for x, y in a1_lift(0.2))
