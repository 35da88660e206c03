from __future__ import annotations

import numpy as np
import pytest
import sympy as sp

from core.identity_catalog import (
    IDENTITIES,
    TYPO_PROBES,
    delta_quartic,
    find_witness,
    identity_check,
    leaf_f0,
    leaf_f1,
    leaf_ft,
    riccati_slope_numerator,
    sampling_vanishes,
    section_slope_sum,
)
from core.elliptic_curve import EllipticCurve
from core.multipoly import variables
from geometry.minimal_sections import SectionWeb
from geometry.riccati_foliation import slope_z0

x, z, t = variables("x", "z", "t")


@pytest.mark.parametrize("identity_id", sorted(IDENTITIES))
def test_catalog_identity_vanishes(identity_id):
    result = identity_check(identity_id)
    assert result.is_zero
    assert result.passed
    assert result.witness is None


@pytest.mark.parametrize("identity_id", sorted(TYPO_PROBES))
def test_printed_variants_do_not_vanish(identity_id):
    result = identity_check(identity_id)
    assert not result.is_zero
    assert result.sampled_zero is False
    assert result.passed
    assert result.witness is not None
    assert result.notes


def test_unknown_identity():
    with pytest.raises(KeyError):
        identity_check("I42")


def test_sampling_agrees_with_canonical_form():
    assert sampling_vanishes((x + z) ** 2 - x * x - 2 * x * z - z * z)
    assert not sampling_vanishes(x * z * (x - 1))


def test_witness_is_a_nonzero_point():
    p = (x - 1) * (z - 1)
    witness = find_witness(p)
    assert witness is not None
    assert p.evaluate(witness) != 0


def _sympy_symbols():
    return sp.symbols("x z t")


def test_leaf_relation_matches_sympy():
    sx, sz, _ = _sympy_symbols()
    f0 = -sz ** 2 + 2 * sz - sx
    f1 = -sz ** 2 + sx
    ft = sz ** 2 - 2 * sx * sz + sx
    assert sp.expand(sx * f0 ** 2 - (sx - 1) * f1 ** 2 - ft ** 2) == 0
    assert x * leaf_f0() ** 2 - (x - 1) * leaf_f1() ** 2 == leaf_ft() ** 2


def test_discriminant_relation_matches_sympy():
    sx, sz, st = _sympy_symbols()
    f0 = -sz ** 2 + 2 * sz - sx
    ft = sz ** 2 - 2 * sx * sz + sx
    delta = (
        (st - sx) * sz ** 4
        - 4 * (st - 1) * sx * sz ** 3
        + 2 * sx * (2 * st * sx + st - sx - 2) * sz ** 2
        - 4 * sx ** 2 * (st - 1) * sz
        + sx ** 2 * (st - sx)
    )
    assert sp.expand(sx * f0 ** 2 - st * ft ** 2 + delta) == 0
    assert x * leaf_f0() ** 2 - t * leaf_ft() ** 2 == -delta_quartic(x)


def test_linear_web_coefficient_is_built_from_the_sections():
    total, den = section_slope_sum()
    assert not total.is_zero()
    # twice the printed coefficient must not survive the same comparison
    doubled = 2 * riccati_slope_numerator() * den - total * (2 * x * (x - 1))
    assert not doubled.is_zero()


@pytest.mark.parametrize("point", [(-1 + 0.5j, 0.3 - 0.2j), (0.4 + 1.1j, 1.7 + 0.6j), (3.2 - 0.7j, -0.8 + 0.1j)])
def test_section_slopes_add_up_to_twice_the_riccati_slope(point):
    web = SectionWeb(EllipticCurve(2 + 0j))
    xv, zv = point
    roots = np.roots([complex(c) for c in web.coefficients(xv, zv)])
    total = sum(web.slope_formula(a, xv, zv) for a in roots)
    expected = 2 * slope_z0(xv, zv)
    assert abs(total - expected) < 1e-9 * max(1.0, abs(expected))
