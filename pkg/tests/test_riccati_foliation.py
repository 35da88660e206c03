from __future__ import annotations

import numpy as np
import pytest

from core.elliptic_curve import EllipticCurve
from core.exceptions import PoleError
from core.moebius import INF, chordal_distance, is_infinite
from error_handler import ErrorHandler
from geometry.riccati_foliation import (
    analyze_singularities,
    first_integral,
    first_integral_gradient,
    first_integral_invariance_residual,
    leaf_graph_residual,
    ode_double_star_residual,
    psi_frame,
    psi_map,
    pulled_back_integral,
    relative_invariance_residual,
    slope_z0,
)
from geometry.web_geometry import pulled_back_slopes
from geometry.minimal_sections import SectionWeb
from pullback_handler import PullbackHandler

T = 2 + 0j
X = 0.5 + 0.5j


@pytest.fixture
def base_point():
    return EllipticCurve(T).sample_point(X)


def test_zero_section_is_the_base_coordinate():
    for x in (0.3 + 0.1j, 2 - 1j, -1.5 + 0.5j):
        assert first_integral(x, 0) == pytest.approx(x)
        assert first_integral(x, INF) == x


def test_special_leaves_take_levels_zero_one_infinity():
    x = 0.3 + 0.7j
    assert abs(first_integral(x, 1 + np.sqrt(1 - x))) < 1e-12
    assert first_integral(x, np.sqrt(x)) == pytest.approx(1)
    assert is_infinite(first_integral(x, x + np.sqrt(x * x - x)))


def test_first_integral_is_constant_along_leaves():
    x, z = 0.4 + 0.9j, -0.3 + 0.6j
    fx, fz = first_integral_gradient(x, z)
    scale = np.hypot(abs(fx), abs(fz))
    assert abs(first_integral_invariance_residual(x, z)) / scale < 1e-6


@pytest.mark.parametrize("point", [(0.4 + 0.9j, -0.3 + 0.6j), (2.5 - 0.4j, 3.0 + 1.0j), (-1.2 + 0.3j, 0.05 - 0.02j)])
def test_invariance_residual_is_relative_to_the_gradient(point):
    x, z = point
    assert relative_invariance_residual(x, z) < 1e-6
    # a transverse direction is far from tangent
    assert relative_invariance_residual(x, z, direction_shift=0.5) > 1e-3


def test_gradient_matches_a_plain_difference():
    x, z, h = 0.4 + 0.9j, -0.3 + 0.6j, 1e-6
    fx, fz = first_integral_gradient(x, z)
    plain_x = (first_integral(x + h, z) - first_integral(x - h, z)) / (2 * h)
    plain_z = (first_integral(x, z + h) - first_integral(x, z - h)) / (2 * h)
    assert abs(fx - plain_x) < 1e-6 * max(1.0, abs(fx))
    assert abs(fz - plain_z) < 1e-6 * max(1.0, abs(fz))


def test_riccati_slope_pole():
    with pytest.raises(PoleError):
        slope_z0(1, 0.5)


def test_singularity_table():
    records = analyze_singularities()
    assert len(records) == 6
    tags = sorted(r.tag for r in records)
    assert tags == ["dicritical_node"] * 3 + ["saddle"] * 3
    for r in records:
        if r.tag == "dicritical_node":
            assert r.ratio == pytest.approx(2)
            assert r.ramified_tag == "radial"
        else:
            assert r.ratio == pytest.approx(-2)


def test_singularity_check_record():
    record = PullbackHandler(ErrorHandler()).check_singularities()
    assert record.passed
    assert record.samples == 6


def test_psi_pulls_the_integral_back(base_point):
    for Z in (0.3 + 0.7j, -1.2 + 0.4j, 2.5 - 0.5j):
        x, z = psi_map(X, base_point.y, Z, T)
        value = first_integral(x, z)
        target = pulled_back_integral(Z)
        assert abs(value - target) / max(1.0, abs(target)) < 1e-8


def test_psi_normalization_points(base_point):
    frame = psi_frame(X, base_point.y, T)
    assert chordal_distance(psi_map(X, base_point.y, 0, T)[1], frame.z0) < 1e-12
    assert psi_map(X, base_point.y, INF, T)[1] == frame.z1
    assert chordal_distance(psi_map(X, base_point.y, 1, T)[1], frame.z2) < 1e-12
    assert chordal_distance(first_integral(frame.x, frame.z2), 1) < 1e-9


def test_pulled_back_integral_pole():
    with pytest.raises(PoleError):
        pulled_back_integral(2)


@pytest.mark.parametrize("which", ["z0", "z1", "z2"])
def test_leaf_graphs(base_point, which):
    assert leaf_graph_residual(X, base_point.y, which, T) < 1e-6


def test_pulled_back_web_solves_double_star(base_point):
    web = SectionWeb(EllipticCurve(T))
    Z = 0.4 + 0.8j
    for slope in pulled_back_slopes(X, base_point.y, Z, web):
        residual = ode_double_star_residual(X, Z, slope, T)
        assert abs(residual) / max(1.0, abs(slope) ** 2) < 1e-6
