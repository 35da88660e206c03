from __future__ import annotations

import numpy as np
import pytest

from core.elliptic_curve import INFINITY, CurvePoint, EllipticCurve
from core.exact_field import I, ExactScalar
from core.exceptions import PoleError, SingularCurveError


@pytest.mark.parametrize("t", [0, 1, ExactScalar(1), 1e-14 + 0j])
def test_singular_parameters_rejected(t):
    with pytest.raises(SingularCurveError):
        EllipticCurve(t)


def test_curve_through_rational_point(point_t4):
    curve, p = EllipticCurve.through_point(point_t4.x, point_t4.y)
    assert curve.t == 4
    assert curve.on_curve(p)


def test_t4_doubling_chain(curve_t4, point_t4):
    doubled = curve_t4.double(point_t4)
    assert doubled == CurvePoint(ExactScalar(0), ExactScalar(0))
    assert curve_t4.add(doubled, curve_t4.two_torsion()["1"]) == CurvePoint(4, 0)
    assert curve_t4.multiply(4, point_t4) == INFINITY


def test_printed_doubling_disagrees(curve_t4, point_t4):
    printed = curve_t4.printed_double(point_t4)
    assert printed.x == -10
    assert not curve_t4.points_close(printed, curve_t4.double(point_t4))


def test_two_torsion_points_are_their_own_inverses(curve_t4):
    for label, q in curve_t4.two_torsion().items():
        assert curve_t4.on_curve(q), label
        assert curve_t4.add(q, q) == INFINITY


def test_group_laws_numeric(curve_t2, rng):
    p, q, r = (curve_t2.sample_point(rng=rng) for _ in range(3))
    left = curve_t2.add(curve_t2.add(p, q), r)
    right = curve_t2.add(p, curve_t2.add(q, r))
    assert curve_t2.points_close(left, right, 1e-8)
    assert curve_t2.points_close(curve_t2.add(p, q), curve_t2.add(q, p), 1e-10)
    assert curve_t2.add(p, curve_t2.neg(p)) == INFINITY
    assert curve_t2.on_curve(curve_t2.add(p, q), 1e-9)


def test_sum_of_points(curve_t4, point_t4):
    torsion = curve_t4.two_torsion()
    assert curve_t4.sum([torsion["0"], torsion["1"]]) == torsion["t"]
    assert curve_t4.sum([]) == INFINITY
    assert curve_t4.sub(point_t4, point_t4) == INFINITY


def test_x_doubling_formula_matches_group_law(curve_t2, rng):
    p = curve_t2.sample_point(rng=rng)
    assert np.isclose(complex(curve_t2.x_double_formula(p.x, p.y)), complex(curve_t2.double(p).x), rtol=1e-9)


def test_x_doubling_formula_pole(curve_t2):
    with pytest.raises(PoleError):
        curve_t2.x_double_formula(1 + 0j, 0j)


def test_exact_sample_point(curve_t4):
    p = curve_t4.sample_point(ExactScalar(2))
    assert p.is_exact
    assert p.y == 2 * I
