from __future__ import annotations

import numpy as np
import pytest

from core.elliptic_curve import CurvePoint, EllipticCurve
from core.exact_field import I, ExactScalar
from geometry.minimal_sections import SectionWeb


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


@pytest.fixture
def curve_t2() -> EllipticCurve:
    return EllipticCurve(2 + 0j)


@pytest.fixture
def curve_t4() -> EllipticCurve:
    """Exact curve t = 4 with the rational point (2, 2i)."""
    return EllipticCurve(ExactScalar(4))


@pytest.fixture
def point_t4() -> CurvePoint:
    return CurvePoint(ExactScalar(2), 2 * I)


@pytest.fixture
def web_t2(curve_t2) -> SectionWeb:
    return SectionWeb(curve_t2)


@pytest.fixture
def small_config(tmp_path):
    """Key=value file with low sample counts for end-to-end runs."""
    path = tmp_path / "verifier.cfg"
    path.write_text(
        "\n".join(
            [
                "samples=8",
                "curvature_points=2",
                "delta_samples=5",
                "group_triples=5",
                "pullback_samples=5",
                "sweep_samples=3",
                "t_sweep=2",
                "region=-1.5,2.5,-1.5,1.5",
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    return path
