from __future__ import annotations

import pytest

from core.exact_field import ExactScalar
from core.exceptions import UnassignedVariableError
from core.multipoly import MultiPoly, from_terms, variables

x, y, z, t = variables("x", "y", "z", "t")


def test_zero_polynomial_is_empty():
    p = (x + z) ** 2 - (x * x + 2 * x * z + z * z)
    assert p.is_zero()
    assert p == MultiPoly.zero()
    assert p.terms == {}


def test_canonical_form_ignores_construction_order():
    a = (x - 1) * (z + 2)
    b = z * x + 2 * x - z - 2
    assert a == b
    assert hash(a) == hash(b)


def test_derivative_and_degree():
    p = x ** 3 * z - 4 * x * z ** 2 + 7
    assert p.derivative("x") == 3 * x ** 2 * z - 4 * z ** 2
    assert p.degree("z") == 2
    assert p.total_degree() == 4


def test_substitute_polynomial():
    p = z ** 2 + x
    assert p.substitute("z", x + 1) == x ** 2 + 3 * x + 1


def test_reduce_mod_curve_lowers_y_degree():
    p = y ** 3
    reduced = p.reduce_mod_curve()
    assert reduced.degree("y") == 1
    assert reduced == y * (x ** 3 - (1 + t) * x ** 2 + t * x)


def test_exact_evaluation():
    p = x ** 2 - 2 * z
    value = p.evaluate({"x": ExactScalar(0, 1), "z": 3})
    assert value == ExactScalar(-7)


def test_evaluation_needs_every_variable():
    with pytest.raises(UnassignedVariableError):
        (x + z).evaluate({"x": 1})


def test_univariate_coefficients():
    p = 3 * z ** 2 - 1
    assert p.univariate_coefficients("z") == [3, 0, -1]
    with pytest.raises(ValueError):
        (z + x).univariate_coefficients("z")


def test_from_terms_merges_duplicates():
    p = from_terms([({"x": 1}, 2), ({"x": 1}, 3), ({}, 1)])
    assert p == 5 * x + 1
