import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conemix.growth_engine import (
    CurveTooLong,
    NonSimple,
    NotApplicable,
    PLCurve,
    PreconditionViolated,
    alignment_pull,
    check_aligned,
    detect_segment,
    diameter,
    edge_diameters,
    grow_step,
    grow_until_segment,
    growth_delta,
    growth_setup,
    in_a1,
    intersect,
    random_seed,
    stable_range,
    witness_intersection,
)
from conemix.interval import IScalar
from conemix.map_family import BWD, EPS, ETA, FWD, Params

ETA_QUARTER = Params(ETA, 0.25)
EPS_SMALL = Params(EPS, 0.05)


def _in_a4_backward():
    return PLCurve(((0.33, 0.043), (0.35, 0.037)), "x")


def _chord_through_a1():
    return PLCurve(((0.5, 0.7), (1.5, 0.3)), "x")


# diameter


def test_single_segment_diameter():
    assert diameter(PLCurve(((0.0, 0.0), (0.3, 0.1)), "x")) == pytest.approx(0.3, abs=1e-15)


@given(st.lists(st.tuples(st.floats(1e-4, 0.2), st.floats(-3, 3)), min_size=1, max_size=12))
def test_diameter_is_sum_of_edge_projections(steps):
    pts = [(0.0, 0.0)]
    for dx, g in steps:
        pts.append((pts[-1][0] + dx, pts[-1][1] + g * dx))
    curve = PLCurve(tuple(pts), "x")
    assert abs(diameter(curve) - sum(edge_diameters(curve))) <= 2.0 ** -40
    assert diameter(curve.reversed()) == pytest.approx(diameter(curve), abs=1e-15)


def test_doubling_back_is_rejected():
    with pytest.raises(PreconditionViolated):
        PLCurve(((0.0, 0.0), (0.3, 0.1), (0.2, 0.2)), "x")
    loose = PLCurve(((0.0, 0.0), (0.3, 0.1), (0.2, 0.2)), "x", strict=False)
    assert diameter(loose) == pytest.approx(0.3)


# intersect


def test_segment_inside_one_region():
    a4 = growth_setup(BWD, EPS_SMALL).element("A4")
    comps, simple = intersect(_in_a4_backward(), a4)
    assert simple and len(comps) == 1
    assert diameter(comps[0]) == pytest.approx(0.02)


def test_empty_intersection():
    a1 = growth_setup(BWD, EPS_SMALL).element("A1")
    comps, simple = intersect(_in_a4_backward(), a1)
    assert comps == [] and simple


def test_chord_meets_a1_twice():
    a1 = growth_setup(BWD, ETA_QUARTER).element("A1")
    comps, simple = intersect(_chord_through_a1(), a1)
    assert len(comps) == 2 and not simple
    with pytest.raises(NonSimple):
        grow_step(_chord_through_a1(), BWD, ETA_QUARTER)


# grow_step


def test_a4_piece_expands_by_its_bound():
    setup = growth_setup(BWD, EPS_SMALL)
    out, report = grow_step(_in_a4_backward(), BWD, EPS_SMALL)
    assert report.element == "A4" and report.iterates == 3
    assert report.factor >= setup.element("A4").expansion
    assert check_aligned(out, setup)


def test_split_between_first_two_forward_elements_grows():
    curve = PLCurve(((0.38, 0.97), (0.38 + 0.06 / 1.4, 1.03)), "y")
    out, report = grow_step(curve, FWD, ETA_QUARTER)
    assert report.shares["a1"] == pytest.approx(0.5)
    assert report.shares["a2"] == pytest.approx(0.5)
    setup = growth_setup(FWD, ETA_QUARTER)
    assert setup.element("a1").expansion > 2 and setup.element("a2").expansion > 2
    assert diameter(out) > diameter(curve)


@pytest.mark.parametrize("params", [ETA_QUARTER, Params(ETA, 0.1), EPS_SMALL, Params(EPS, 0.01)])
@pytest.mark.parametrize("direction", [FWD, BWD])
def test_random_steps_respect_certified_factor(params, direction):
    rng = random.Random(11)
    setup = growth_setup(direction, params)
    delta = growth_delta(direction, params)
    assert delta > 0
    done = 0
    for _ in range(120):
        seed = random_seed(rng, direction, params, hug=0.7)
        try:
            out, report = grow_step(seed, direction, params)
        except NonSimple:
            continue
        assert report.bound >= (1 + delta) * (1 - 1e-9)
        assert report.factor >= report.bound * (1 - 1e-9)
        assert out.strict and check_aligned(out, setup)
        done += 1
    assert done >= 100


def test_wrong_axis_is_rejected():
    with pytest.raises(PreconditionViolated):
        grow_step(PLCurve(((0.33, 0.043), (0.35, 0.037)), "y"), BWD, EPS_SMALL)


def test_gradient_outside_cone_is_rejected():
    with pytest.raises(PreconditionViolated):
        grow_step(PLCurve(((0.33, 0.04), (0.35, 0.04)), "x"), BWD, EPS_SMALL)


def test_vertex_outside_domain_is_rejected():
    with pytest.raises(PreconditionViolated):
        grow_step(PLCurve(((0.5, 0.9), (0.52, 0.892)), "x"), BWD, ETA_QUARTER)


def test_vertex_limit():
    n = 10_001
    pts = tuple((0.33 + 0.02 * k / n, 0.043 - 0.006 * k / n) for k in range(n + 1))
    with pytest.raises(CurveTooLong):
        grow_step(PLCurve(pts, "x"), BWD, EPS_SMALL)


# segments and traces


def test_simple_curve_has_no_segment_to_detect():
    with pytest.raises(NotApplicable):
        detect_segment(_in_a4_backward(), BWD, EPS_SMALL)


def test_chord_already_holds_an_h_segment():
    witness = detect_segment(_chord_through_a1(), BWD, ETA_QUARTER)
    assert witness is not None
    assert witness.iterates == 0 and witness.source == "A1"


def test_witness_intersection_of_crossing_segments():
    h = PLCurve(((0.0, 0.5), (1.0, 0.3)), "x")
    v = PLCurve(((0.5, 0.0), (0.6, 1.0)), "y")
    p = witness_intersection(h, v)
    assert p is not None
    assert p[1] == pytest.approx(0.5 - 0.2 * p[0])
    assert p[0] == pytest.approx(0.5 + 0.1 * p[1])
    assert witness_intersection(h, PLCurve(((2.0, 0.0), (2.1, 1.0)), "y")) is None


@pytest.mark.parametrize("direction", [FWD, BWD])
def test_traces_grow_then_stop_at_a_segment(direction):
    rng = random.Random(5)
    for _ in range(10):
        trace = grow_until_segment(random_seed(rng, direction, EPS_SMALL), direction, EPS_SMALL)
        assert trace.terminal == ("VSegment" if direction == FWD else "HSegment")
        d = trace.diameters()
        assert all(b >= (1 + trace.delta) * a * (1 - 1e-9) for a, b in zip(d, d[1:]))
        assert trace.to_dict()["steps"] == [s.to_dict() for s in trace.steps]


def test_paired_witnesses_meet_in_a1():
    rng = random.Random(8)
    t = EPS_SMALL.eta_f
    for _ in range(5):
        h = grow_until_segment(random_seed(rng, BWD, EPS_SMALL), BWD, EPS_SMALL).witness.curve
        v = grow_until_segment(random_seed(rng, FWD, EPS_SMALL), FWD, EPS_SMALL).witness.curve
        found = None
        for i in range(-2, 3):
            for j in range(-2, 3):
                found = found or witness_intersection(h.translated(i, j), v)
        assert found is not None and in_a1(found, t)


# alignment


@pytest.mark.parametrize("params", [ETA_QUARTER, Params(ETA, 0.1), EPS_SMALL])
@pytest.mark.parametrize("direction", [FWD, BWD])
def test_pull_of_stable_range_is_the_minimal_cone(params, direction):
    setup = growth_setup(direction, params)
    loc = tuple(sum(c) / len(c) for c in zip(*setup.elements[0].polygons[0]))
    rng_ = stable_range(direction, params)
    image = alignment_pull(rng_, loc, direction, params)
    assert image.lo == pytest.approx(setup.cone[0], abs=1e-12)
    assert image.hi == pytest.approx(setup.cone[1], abs=1e-12)
    ends = sorted([alignment_pull(IScalar(rng_.lo), loc, direction, params).mid(),
                   alignment_pull(IScalar(rng_.hi), loc, direction, params).mid()])
    assert ends[0] == pytest.approx(setup.cone[0], abs=1e-12)
    assert ends[1] == pytest.approx(setup.cone[1], abs=1e-12)
    rng = random.Random(3)
    for _ in range(100):
        g = rng_.lo + (rng_.hi - rng_.lo) * rng.random()
        pulled = alignment_pull(g, loc, direction, params)
        assert setup.cone[0] - 1e-12 <= pulled.lo and pulled.hi <= setup.cone[1] + 1e-12


def test_pull_outside_domain_is_rejected():
    with pytest.raises(PreconditionViolated):
        alignment_pull(0.0, (0.5, 0.9), BWD, ETA_QUARTER)


def test_delta_positive_across_both_windows():
    for v in (0.01, 0.1, 0.2, 0.3):
        for d in (FWD, BWD):
            assert growth_delta(d, Params(ETA, v)) > 0
    for v in (0.02, 0.05, 0.08):
        for d in (FWD, BWD):
            assert growth_delta(d, Params(EPS, v)) > 0
    assert math.isfinite(growth_delta(FWD, EPS_SMALL))
