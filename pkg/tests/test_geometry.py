from hypothesis import given
from hypothesis import strategies as st

from conemix import geometry as geo

SQUARE = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))


def test_area_orientation_and_centroid():
    assert geo.signed_area(SQUARE) == 1.0
    assert geo.signed_area(tuple(reversed(SQUARE))) == -1.0
    assert geo.ccw(tuple(reversed(SQUARE)))[0] in SQUARE
    assert geo.centroid(SQUARE) == (0.5, 0.5)


def test_point_in_polygon_three_way():
    assert geo.point_in_polygon((0.5, 0.5), SQUARE) is True
    assert geo.point_in_polygon((1.5, 0.5), SQUARE) is False
    assert geo.point_in_polygon((1.0, 0.5), SQUARE) is None


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_clip_convex_of_overlapping_squares(dx, dy):
    moved = geo.translate(SQUARE, dx, dy)
    overlap = geo.clip_convex(SQUARE, moved)
    assert abs(abs(geo.signed_area(overlap)) - (1 - dx) * (1 - dy)) < 1e-12


def test_segment_crossings_and_lines():
    hits = geo.segment_crossings((-1.0, 0.5), (2.0, 0.5), SQUARE)
    assert len(hits) == 2
    p = geo.line_intersection((0.0, 0.0), (1.0, 1.0), (0.0, 1.0), (1.0, -1.0))
    assert abs(p[0] - 0.5) < 1e-15 and abs(p[1] - 0.5) < 1e-15


def test_affine_inverse_round_trip():
    from conemix.map_family import Mat2

    f = geo.Affine(Mat2(2.0, 1.0, 1.0, 1.0), (0.5, -1.0))
    g = f.inverse()
    x, y = g(f((0.3, 0.7)))
    assert abs(x - 0.3) < 1e-12 and abs(y - 0.7) < 1e-12
