from __future__ import annotations

import numpy as np
import pytest

from core.elliptic_curve import INFINITY, CurvePoint
from core.exact_field import I, ExactScalar
from core.moebius import INF
from geometry.minimal_sections import (
    CONSTANT,
    DIAGONAL,
    GENERIC,
    SectionParam,
    SectionWeb,
    self_intersection_update,
)
from geometry.riccati_foliation import slope_z0


@pytest.fixture
def web_t4(curve_t4) -> SectionWeb:
    return SectionWeb(curve_t4)


@pytest.mark.parametrize(
    "self_int, passes, expected",
    [
        (4, (True, True, True), 1),
        (4, (False, False, False), 7),
        (0, (False, False, False), 3),
        (4, (True, False, True), 3),
    ],
)
def test_self_intersection_bookkeeping(self_int, passes, expected):
    assert self_intersection_update(self_int, passes) == expected


def test_self_intersection_needs_three_centers():
    with pytest.raises(ValueError):
        self_intersection_update(4, (True, False))


def test_exact_solve_on_the_diagonal_fiber(web_t4, point_t4):
    # z = u: the Diagonal plus the section with x₀ = t(u−1)/(u−t)
    solved = web_t4.sections_through(point_t4.x, point_t4.y, ExactScalar(2))
    diagonal, partner = solved.sections
    assert diagonal.kind == DIAGONAL
    assert partner.kind == GENERIC
    assert partner.point == CurvePoint(ExactScalar(-2), 6 * I)
    assert solved.graph_residuals == (0.0, 0.0)
    assert solved.curve_residuals == (0.0, 0.0)


def test_exact_section_value(web_t4, point_t4):
    q = SectionParam.generic(CurvePoint(ExactScalar(-2), 6 * I))
    assert web_t4.section_value(q, point_t4) == 2
    assert web_t4.section_value(SectionParam.diagonal(), point_t4) == point_t4.x
    assert web_t4.section_value(SectionParam.constant_section(1), point_t4) == 1


def test_exact_intersection_base_point(web_t4, point_t4):
    q = SectionParam.generic(CurvePoint(ExactScalar(-2), 6 * I))
    assert web_t4.intersection_base_point(SectionParam.diagonal(), q) == point_t4


def test_intersection_needs_distinct_sections(web_t4):
    with pytest.raises(ValueError):
        web_t4.intersection_base_point(SectionParam.diagonal(), SectionParam.diagonal())


def test_sections_through_needs_nonzero_v(web_t2):
    with pytest.raises(ValueError):
        web_t2.sections_through(1 + 0j, 0j, 0.5)


def test_numeric_solver_recovers_a_section(web_t2):
    curve = web_t2.curve
    p = curve.sample_point(0.4 + 0.6j)
    q = SectionParam.generic(curve.sample_point(-1.3 + 0.2j))
    z = web_t2.section_value(q, p)
    solved = web_t2.sections_through(p.x, p.y, z)
    assert max(solved.graph_residuals) < 1e-9
    assert max(solved.curve_residuals) < 1e-9
    found = [s.point for s in solved.sections if s.kind == GENERIC]
    assert any(curve.points_close(f, q.point, 1e-7) for f in found)


def test_section_partners_sum_to_t_torsion(web_t2):
    curve = web_t2.curve
    p = curve.sample_point(0.7 + 0.9j)
    q = SectionParam.generic(curve.sample_point(2.2 - 0.4j))
    offset = web_t2.calibrate_intersection_offset(q, p)
    assert curve.points_close(offset, curve.two_torsion()["t"], 1e-6)


def test_constant_sections_are_two_torsion(web_t2):
    mapping = web_t2.calibrate_constant_sections(web_t2.curve.sample_point(0.3 + 0.4j))
    torsion = web_t2.curve.two_torsion()
    assert web_t2.curve.points_close(mapping[0], torsion["1"])
    assert web_t2.curve.points_close(mapping[1], torsion["0"])
    assert web_t2.curve.points_close(mapping["inf"], torsion["t"])


def test_parameter_labels_round_trip(web_t2):
    curve = web_t2.curve
    for s in (SectionParam.diagonal(), SectionParam.constant_section(0),
              SectionParam.constant_section(1), SectionParam.constant_section(INF)):
        assert web_t2.from_parameter(web_t2.parameter_point(s)) == s
    assert web_t2.parameter_point(SectionParam.diagonal()) == INFINITY
    assert web_t2.from_parameter(curve.two_torsion()["1"]).kind == CONSTANT


def test_web_slopes_solve_the_two_web_equation(web_t2):
    p = web_t2.curve.sample_point(0.6 + 0.5j)
    z = -0.2 + 0.7j
    z0 = slope_z0(p.x, z)
    for m in web_t2.web_slopes(p.x, p.y, z):
        scale = max(1.0, abs(m) ** 2, abs(z0 * m))
        assert abs(web_t2.two_web_ode_residual(p.x, z, m)) / scale < 1e-8


def test_printed_constant_fails_the_two_web_equation(web_t2):
    p = web_t2.curve.sample_point(0.6 + 0.5j)
    z = -0.2 + 0.7j
    m = web_t2.web_slopes(p.x, p.y, z)[0]
    assert abs(web_t2.two_web_ode_residual(p.x, z, m, printed=True)) > 1e-6


def test_delta_roots_lie_on_the_level_t_leaf(web_t2):
    for u in (0.4 + 0.3j, -1.1 + 0.8j, 2.6 - 0.2j):
        assert web_t2.delta_leaf_residual(u) < 1e-8
        roots = web_t2.delta_roots(u)
        assert len(roots) == 4
        for r in roots:
            assert abs(web_t2.discriminant_delta(u, r)) < 1e-8 * max(1.0, abs(r)) ** 4


def test_delta_is_tangency_of_the_section_equation(web_t2):
    u = 0.4 + 0.3j
    t = web_t2.curve.t
    for z in (0.5 + 0.1j, -0.7 + 1.2j):
        assert np.isclose(web_t2.section_discriminant(u, z), (t - u) * web_t2.discriminant_delta(u, z))
