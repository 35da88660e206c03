from __future__ import annotations

import numpy as np
import pytest

from core.exceptions import DegenerateFiberError, DegenerateQuadrupleError
from core.moebius import (
    IDENTITY,
    INF,
    OTHER,
    PHI_0,
    PHI_1,
    PHI_T,
    MoebiusMap,
    chordal_distance,
    classify_moebius,
    cross_ratio,
    fiber_monodromy_maps,
    gamma_orbit,
    is_klein_four,
    klein_table,
    same_point,
)


def test_cross_ratio_values():
    assert cross_ratio(INF, 0, -1, 1) == pytest.approx(-1)
    assert cross_ratio(0, 1, 2, 3) == pytest.approx(4 / 3)


def test_harmonic_quadruple_permutation():
    # (∞, Z₁, Z₀, Z₂) with Z₁ + Z₂ = 2Z₀
    assert cross_ratio(INF, -1, 0, 1) == pytest.approx(2)


def test_cross_ratio_repeated_point():
    with pytest.raises(DegenerateQuadrupleError):
        cross_ratio(1, 1, 2, 3)


@pytest.mark.parametrize("z, size", [(1, 2), (1j, 2), (0, 2), (INF, 2), (2 + 0.5j, 4)])
def test_gamma_orbit_sizes(z, size):
    assert len(gamma_orbit(z)) == size


def test_from_three_points_maps_sources_to_targets():
    sources, targets = (0, 1, INF), (2, 1j, -1)
    m = MoebiusMap.from_three_points(sources, targets)
    for s, d in zip(sources, targets):
        assert same_point(m(s), d, 1e-12)
    assert m.compose(m.inverse()).equals(MoebiusMap.identity())


@pytest.mark.parametrize("x0", [0.5 + 0j, 2.5 - 1j, -3 + 0.25j])
def test_fiber_maps_form_klein_group(x0):
    table = klein_table(x0)
    assert is_klein_four(table)
    maps = fiber_monodromy_maps(x0)
    assert maps["0"].compose(maps["1"]).equals(maps["t"])
    for key in ("0", "1", "t"):
        assert maps[key].compose(maps[key]).equals(maps["inf"])


def test_phi0_fixed_points():
    x0 = 0.5 + 0j
    fixed = fiber_monodromy_maps(x0)["0"].fixed_points()
    expected = [1 - np.sqrt(1 - x0), 1 + np.sqrt(1 - x0)]
    for e in expected:
        assert any(abs(f - e) < 1e-12 for f in fixed)


def test_classification():
    x0 = 0.3 + 0.2j
    maps = fiber_monodromy_maps(x0)
    assert classify_moebius(maps["0"], x0) == PHI_0
    assert classify_moebius(maps["1"], x0) == PHI_1
    assert classify_moebius(maps["t"], x0) == PHI_T
    assert classify_moebius(maps["inf"], x0) == IDENTITY
    assert classify_moebius(MoebiusMap.from_entries(2, 0, 0, 1), x0) == OTHER


@pytest.mark.parametrize("x0", [0, 1])
def test_singular_fibers_rejected(x0):
    with pytest.raises(DegenerateFiberError):
        fiber_monodromy_maps(x0)


def test_chordal_distance_at_infinity():
    assert chordal_distance(INF, INF) == 0
    assert chordal_distance(0, INF) == pytest.approx(1)
