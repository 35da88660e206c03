from __future__ import annotations

import numpy as np
import pytest

from core.exceptions import ClearanceError, ConfigError, OpenLoopError
from core.models import Status, SuiteConfig
from core.moebius import IDENTITY, OTHER, PHI_0, PHI_1, PHI_T
from error_handler import ErrorHandler
from geometry.leaf_transport import (
    PathSpec,
    FIT_TOL,
    battery_paths,
    battery_task,
    continue_y,
    default_base,
    integrate_leaf,
    loop_monodromy,
    predicted_label,
    special_leaf,
)
from monodromy_handler import MonodromyHandler, drift_path

T = 2 + 0j


def test_parse_lassos():
    path = PathSpec.parse("0.5+2i; lasso(0); lasso(1)", t=T)
    assert path.is_closed
    assert path.encircled(T) == {"0": 1, "1": 1, "t": 0}
    assert path.closes_on_curve(T)
    assert predicted_label(path, T) == PHI_T


def test_parse_branch_label_needs_t():
    with pytest.raises(ConfigError):
        PathSpec.parse("0.5+2i; lasso(t)")
    assert PathSpec.parse("0.5+2i; lasso(t)", t=T).encircled(T)["t"] == 1


@pytest.mark.parametrize("text", ["", "   ;  ", "0.5+2i; nowhere"])
def test_parse_rejects_bad_notation(text):
    with pytest.raises(ConfigError):
        PathSpec.parse(text, t=T)


def test_open_path_has_no_winding_number():
    path = PathSpec.polyline([0.5 + 2j, 3 + 1j])
    assert not path.is_closed
    with pytest.raises(OpenLoopError):
        path.winding_number(0)


@pytest.mark.parametrize(
    "centers, label",
    [((), IDENTITY), ((0j,), PHI_0), ((1 + 0j,), PHI_1), ((0j, 1 + 0j), PHI_T), ((0j, 0j), IDENTITY)],
)
def test_predicted_label_from_parities(centers, label):
    path = PathSpec.lassos(default_base(T), centers)
    assert predicted_label(path, T) == label


def test_single_lasso_does_not_close_on_the_curve():
    path = PathSpec.lasso(default_base(T), 0j)
    assert not path.closes_on_curve(T)
    with pytest.raises(OpenLoopError):
        loop_monodromy(path, T)


def test_path_through_a_singular_fiber():
    with pytest.raises(ClearanceError):
        integrate_leaf(PathSpec.polyline([1 - 1j, 1 + 1j]), 0.5)


def test_transport_along_the_level_one_leaf():
    # z² = x is a leaf
    start, end = 0.5 + 0.5j, 2.0 + 1.0j
    result = integrate_leaf(PathSpec.polyline([start, end]), np.sqrt(start))
    assert abs(result.end - np.sqrt(end)) < 1e-8
    assert result.drift < 1e-8
    assert result.leaf == "f1"
    assert result.leaf_distance < 1e-8


def test_transport_along_the_level_zero_leaf():
    start, end = 0.5 + 0.5j, 2.0 + 1.0j
    result = integrate_leaf(PathSpec.polyline([start, end]), 1 + np.sqrt(1 - start))
    assert result.leaf == "f0"
    assert abs(result.end - (1 + np.sqrt(1 - end))) < 1e-8
    assert result.leaf_distance < 1e-8


def test_special_leaf_detection():
    x = 0.3 + 0.7j
    assert special_leaf(x, np.sqrt(x)) == "f1"
    assert special_leaf(x, 1 - np.sqrt(1 - x)) == "f0"
    assert special_leaf(x, x + np.sqrt(x * x - x)) == "ft"
    assert special_leaf(x, 0.3 + 0.2j) is None


def test_generic_drift_over_a_long_path():
    path = drift_path(T)
    assert 9 < path.length <= 10
    result = integrate_leaf(path, 0.3 + 0.2j, T)
    assert result.leaf is None
    assert result.drift < 1e-8


def test_transport_check_passes():
    record = MonodromyHandler(ErrorHandler()).check_transport(SuiteConfig())
    assert record.status == Status.PASS
    assert record.details["leaf_distance"] < 1e-8


def test_y_continuation_returns_to_the_start_after_an_even_loop():
    base = default_base(T)
    path = PathSpec.lassos(base, [0j, T])
    y0 = np.sqrt(base * (base - 1) * (base - T))
    assert abs(continue_y(path, T, y0) - y0) < 1e-8


def test_y_continuation_flips_sign_around_one_branch_point():
    base = default_base(T)
    path = PathSpec.lasso(base, 1 + 0j)
    y0 = np.sqrt(base * (base - 1) * (base - T))
    assert abs(continue_y(path, T, y0) + y0) < 1e-8


def test_double_lasso_has_trivial_monodromy():
    path = PathSpec.lassos(default_base(T), [0j, 0j])
    result = loop_monodromy(path, T)
    assert result.label == IDENTITY
    assert result.fit_residual < 1e-8


def test_lasso_pair_monodromy_is_in_the_klein_group():
    path = PathSpec.lassos(default_base(T), [0j, T])
    result = loop_monodromy(path, T)
    assert result.label != OTHER
    assert result.distance < 1e-6


def test_battery_has_twelve_closed_loops():
    paths = battery_paths(T)
    assert len(paths) == 12
    assert all(path.closes_on_curve(T) for _, path in paths)


@pytest.mark.slow
@pytest.mark.parametrize("t", [2 + 0j, 4 + 0j, 1 + 1j, -3 + 0j])
def test_whole_battery_classifies(t):
    for name, path in battery_paths(t):
        _, result = battery_task((t, name, path))
        assert not isinstance(result, str), f"{name}: {result}"
        assert result.fit_residual < FIT_TOL
        assert result.label != OTHER
