from __future__ import annotations

from fractions import Fraction

import pytest

from core.exact_field import I, ExactScalar, format_scalar, parse_scalar
from core.exceptions import ConfigError


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2", ExactScalar(2)),
        ("-3", ExactScalar(-3)),
        ("1+i", ExactScalar(1, 1)),
        ("2+0i", ExactScalar(2)),
        ("1/2-3/4i", ExactScalar(Fraction(1, 2), Fraction(-3, 4))),
        ("3i", ExactScalar(0, 3)),
        ("-i", ExactScalar(0, -1)),
    ],
)
def test_parse_exact_literals(text, expected):
    value = parse_scalar(text)
    assert isinstance(value, ExactScalar)
    assert value == expected


def test_decimal_literal_is_complex():
    value = parse_scalar("0.5+1.25i")
    assert isinstance(value, complex)
    assert value == 0.5 + 1.25j


@pytest.mark.parametrize("text", ["", "abc", "1+2k", "1//2"])
def test_bad_literals_raise_config_error(text):
    with pytest.raises(ConfigError):
        parse_scalar(text)


def test_format_scalar():
    assert format_scalar(ExactScalar(2)) == "2+0i"
    assert format_scalar(ExactScalar(Fraction(1, 2), -3)) == "1/2-3i"


def test_field_arithmetic():
    a = ExactScalar(1, 2)
    b = ExactScalar(3, -1)
    assert a * b == ExactScalar(5, 5)
    assert (a / b) * b == a
    assert I * I == -1
    assert a - a == 0
    assert a ** -2 * a ** 2 == 1


def test_mixing_with_complex_falls_back_to_complex():
    result = ExactScalar(1, 1) + 0.5j
    assert isinstance(result, complex)
    assert result == 1 + 1.5j


def test_sqrt_of_perfect_squares():
    assert ExactScalar(-4).sqrt() == ExactScalar(0, 2)
    assert ExactScalar(3, 4).sqrt() == ExactScalar(2, 1)
    assert ExactScalar(Fraction(9, 4)).sqrt() == ExactScalar(Fraction(3, 2))
    assert ExactScalar(2).sqrt() is None


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ExactScalar(1) / ExactScalar(0)
