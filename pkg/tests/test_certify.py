import math

import pytest

from conemix.certify import (
    CERTIFIED,
    FAILED,
    INCONCLUSIVE,
    Certificate,
    NoRootBracketed,
    bisect_root,
    bnb_maximize,
    certify_positive,
    combine,
    newton_root,
    prove_positive,
    solve_root,
    subdivision_floor,
)
from conemix.interval import IScalar, sqrt


def test_positive_polynomial_is_certified():
    res = prove_positive(lambda x: x * x - x + 1, -2.0, 3.0)
    assert res.verdict == CERTIFIED
    assert 0 < res.min_lower <= 0.75


def test_negative_somewhere_fails_with_witness():
    f = lambda x: (x - 0.3) ** 2 - 0.01  # noqa: E731
    res = prove_positive(f, 0.0, 1.0)
    assert res.verdict == FAILED
    assert 0.2 <= res.witness <= 0.4


def test_touching_zero_is_inconclusive_not_certified():
    res = prove_positive(lambda x: (x - 0.5) ** 2, 0.0, 1.0, floor=2.0 ** -12)
    assert res.verdict == INCONCLUSIVE
    lo, hi = res.subinterval
    assert lo <= 0.5 <= hi


def test_nonstrict_accepts_a_zero_lower_bound():
    f = abs
    assert prove_positive(f, 0.0, 1.0, strict=False).verdict == CERTIFIED
    assert prove_positive(f, 0.0, 1.0, floor=2.0 ** -12).verdict == INCONCLUSIVE


def test_derivative_rescues_a_monotone_leaf():
    f = lambda x: sqrt(x) - 0.999  # noqa: E731
    with_d = prove_positive(f, 1.0, 4.0)
    assert with_d.verdict == CERTIFIED


def test_floor_reads_environment(monkeypatch):
    monkeypatch.setenv("CONEMIX_SUBDIV_FLOOR", "10")
    assert subdivision_floor() == 2.0 ** -10
    monkeypatch.delenv("CONEMIX_SUBDIV_FLOOR")
    assert subdivision_floor() == 2.0 ** -20


def test_roots_of_quadratic():
    f = lambda x: x * x - 2  # noqa: E731
    enc = bisect_root(f, 1.0, 2.0, tol=1e-10)
    assert enc.contains(math.sqrt(2)) and enc.width() <= 1e-10
    box, unique = newton_root(f, IScalar(1.0, 2.0))
    assert unique and box.contains(math.sqrt(2)) and box.width() < 1e-14
    res = solve_root(f, 1.0, 2.0)
    assert res.unique and res.enclosure.contains(math.sqrt(2))


def test_unbracketed_root_raises():
    with pytest.raises(NoRootBracketed):
        bisect_root(lambda x: x * x + 1, -1.0, 1.0)


def test_branch_and_bound_maximum():
    res = bnb_maximize(lambda x: -(x - 0.3) ** 2 + 2, 0.0, 1.0, tol=1e-9)
    assert res.lower <= 2.0 <= res.upper
    assert res.upper - res.lower <= 1e-8
    assert abs(res.argmax - 0.3) < 1e-3


def test_certificate_round_trip_and_combination():
    a = certify_positive("a", lambda x: x + 1, 0.0, 1.0)
    b = Certificate("b", (0.0, 1.0), FAILED, witness=0.5)
    assert Certificate.from_dict(a.to_dict()).to_dict() == a.to_dict()
    both = combine("both", (0.0, 1.0), [a, b])
    assert both.verdict == FAILED
    assert combine("ok", (0.0, 1.0), [a, a]).verdict == CERTIFIED
