from __future__ import annotations

import pytest

from core.models import SuiteConfig
from core.moebius import HARMONIC_ORBIT
from curvature_handler import CONTROL_PROBE, WEB_PROBE, CurvatureHandler
from error_handler import ErrorHandler
from geometry.web_geometry import (
    CHARTS,
    HEXAGONAL_ORDER,
    assemble_web_point,
    blaschke_curvature,
    control_curvature,
    control_fields,
    cross_ratio_at,
    cross_ratio_orbit,
    fitted_closure_order,
    hexagon_closure_defect,
    harmonic_residual,
    parallel_fields,
    sample_web_points,
    web_fields,
)


@pytest.fixture
def web_point(web_t2):
    p = web_t2.curve.sample_point(0.6 + 0.5j)
    return assemble_web_point(web_t2, p.x, p.y, -0.2 + 0.7j)


def test_riccati_slope_is_the_harmonic_mean(web_point):
    assert harmonic_residual(web_point) < 1e-9
    assert cross_ratio_at(web_point) == pytest.approx(-1, abs=1e-8)


def test_cross_ratio_orbit_is_harmonic(web_point):
    for value in cross_ratio_orbit(web_point).values():
        assert min(abs(value - h) for h in HARMONIC_ORBIT) < 1e-8


def test_web_fields_match_the_section_slopes(web_t2, web_point):
    fields = web_fields(web_t2, web_point.x, web_point.z)
    branches = sorted((fields["web1"](web_point.x, web_point.z), fields["web2"](web_point.x, web_point.z)),
                      key=lambda s: (s.real, s.imag))
    expected = sorted((complex(s) for s in web_point.branches), key=lambda s: (s.real, s.imag))
    for got, want in zip(branches, expected):
        assert abs(got - want) < 1e-8 * max(1.0, abs(want))


def test_parallel_web_is_flat():
    assert blaschke_curvature(parallel_fields(), *CONTROL_PROBE).is_zero()


def test_control_web_curvature_matches_closed_form():
    estimate = blaschke_curvature(control_fields(), *CONTROL_PROBE)
    expected = control_curvature(*CONTROL_PROBE)
    assert abs(estimate.value - expected) / max(1.0, abs(expected)) < 1e-5
    assert not estimate.is_zero()


def test_control_web_does_not_close_hexagons():
    _, order = fitted_closure_order(control_fields(), *CONTROL_PROBE)
    assert order < HEXAGONAL_ORDER


def test_parallel_web_closes_hexagons():
    _, order = fitted_closure_order(parallel_fields(), *CONTROL_PROBE)
    assert order >= HEXAGONAL_ORDER


def test_hexagon_defect_shrinks_with_step():
    control = hexagon_closure_defect(control_fields(), *CONTROL_PROBE, h=1e-2)
    parallel = hexagon_closure_defect(parallel_fields(), *CONTROL_PROBE, h=1e-2)
    assert control.defect > control.defect_half > 0
    assert parallel.defect < control.defect


def test_charts_are_invertible():
    x, z = 0.3 - 0.2j, 1.1 + 0.4j
    for chart in CHARTS:
        X, Z = chart.to_chart(x, z)
        back = chart.from_chart(X, Z)
        assert back == pytest.approx((x, z))


def test_fibration_subweb_is_flat(web_t2):
    u, w = WEB_PROBE
    fields = web_fields(web_t2, u, w)
    trio = [fields["fibration"], fields["riccati"], fields["web1"]]
    assert blaschke_curvature(trio, u, w).is_zero()


def test_sampled_points_avoid_singular_fibers(web_t2, rng):
    points, excluded = sample_web_points(web_t2, rng, 6, (-2.0, 3.0, -2.0, 2.0))
    assert len(points) == 6
    for p in points:
        assert min(abs(p.x), abs(p.x - 1), abs(p.x - 2)) >= 1e-2
        assert not p.on_delta
    assert all(count >= 0 for count in excluded.values())


def test_sampling_covers_the_whole_region(web_t2, rng):
    points, _ = sample_web_points(web_t2, rng, 40, (-2.0, 3.0, -2.0, 2.0))
    xs = [complex(p.x) for p in points]
    zs = [complex(p.z) for p in points]
    assert all(-2.0 <= x.real <= 3.0 and abs(x.imag) <= 2.5 for x in xs)
    assert all(-2.0 <= z.real <= 2.0 and abs(z.imag) <= 2.0 for z in zs)
    assert min(x.imag for x in xs) < -0.5 < 0.5 < max(x.imag for x in xs)
    assert min(z.imag for z in zs) < -0.5 < 0.5 < max(z.imag for z in zs)


def test_calibration_records_pass():
    handler = CurvatureHandler(ErrorHandler())
    config = SuiteConfig()
    assert handler.check_calibration(config).passed
    assert handler.check_chart_independence(config).passed
