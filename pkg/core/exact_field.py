"""
exact_field.py – Gaussian rationals
------------------------------------
• ExactScalar = re + im·i with both parts held as fractions.Fraction, so the
  canonical form (reduced, positive denominator) comes for free.
• Mixed arithmetic with int / Fraction promotes to ExactScalar; mixing with
  complex or float promotes to complex (numeric mode).
• parse_scalar() reads the "a+bi" literal format used by the CLI.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from .exceptions import ConfigError

Number = Union[int, Fraction, "ExactScalar", complex, float]


class ExactScalar:
    """Exact element of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re: int | Fraction = 0, im: int | Fraction = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    # ────────────────────────────── coercion ──────────────────────────────
    @classmethod
    def coerce(cls, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        raise TypeError(f"cannot coerce {value!r} to ExactScalar")

    @staticmethod
    def is_exact(value) -> bool:
        return isinstance(value, (ExactScalar, int, Fraction)) and not isinstance(value, bool)

    # ────────────────────────────── arithmetic ────────────────────────────
    def __add__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) + other
        o = ExactScalar.coerce(other)
        return ExactScalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.re, -self.im)

    def __sub__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) - other
        o = ExactScalar.coerce(other)
        return ExactScalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) * other
        o = ExactScalar.coerce(other)
        return ExactScalar(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("ExactScalar division by zero")
        return ExactScalar(self.re / norm, -self.im / norm)

    def __truediv__(self, other):
        if isinstance(other, (complex, float)):
            return complex(self) / other
        return self * ExactScalar.coerce(other).inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (complex, float)):
            return other / complex(self)
        return ExactScalar.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "ExactScalar":
        if not isinstance(exponent, int):
            raise TypeError("ExactScalar only supports integer powers")
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result, base = ExactScalar(1), self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # ────────────────────────────── queries ───────────────────────────────
    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def sqrt(self) -> "ExactScalar | None":
        """Principal square root when it is Gaussian rational, else None.

        Principal means real part > 0, or real part 0 and imaginary part >= 0.
        """
        if self.is_zero():
            return ExactScalar(0)
        modulus = _fraction_sqrt(self.norm())
        if modulus is None:
            return None
        p = _fraction_sqrt((modulus + self.re) / 2)
        q = _fraction_sqrt((modulus - self.re) / 2)
        if p is None or q is None:
            return None
        if self.im < 0:
            q = -q
        root = ExactScalar(p, q)
        if root * root != self:
            return None
        return root

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __abs__(self) -> float:
        return abs(complex(self))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (complex, float)):
            return complex(self) == other
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self) -> str:
        return f"ExactScalar({self})"

    def __str__(self) -> str:
        return format_scalar(self)


I = ExactScalar(0, 1)

#-----------------------------------------------------------------------------------------
def _fraction_sqrt(value: Fraction) -> Fraction | None:
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return Fraction(rn, rd)


# ────────────────────────────── literals ──────────────────────────────
_REAL = r"[+-]?(?:\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+)(?:/\d+)?"


def parse_scalar(text: str, *, exact: bool | None = None) -> ExactScalar | complex:
    """
    Parse "a+bi" literals: 2, -3, 1+i, 2+0i, 1/2-3/4i, 0.5+1.25i, 3i.

    Rational/integer literals give an ExactScalar; any decimal point
    forces complex unless `exact` says otherwise.
    """
    s = text.strip().replace(" ", "").replace("j", "i")
    if not s:
        raise ConfigError("empty complex literal")

    re_part, im_part = _split_complex(s)
    try:
        re_val = _parse_real(re_part) if re_part else Fraction(0)
        im_val = _parse_real(im_part) if im_part is not None else Fraction(0)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"invalid complex literal {text!r}") from exc

    decimal = "." in s or "e" in s.lower()
    want_exact = (not decimal) if exact is None else exact
    if want_exact:
        return ExactScalar(re_val, im_val)
    return complex(float(re_val), float(im_val))


def _split_complex(s: str) -> tuple[str, str | None]:
    """Return (real text, imaginary coefficient text or None)."""
    if not s.endswith("i"):
        return s, None
    body = s[:-1]
    # find the sign that starts the imaginary part (not an exponent sign, not index 0)
    cut = -1
    for k in range(len(body) - 1, 0, -1):
        if body[k] in "+-" and body[k - 1] not in "eE":
            cut = k
            break
    if cut == -1:
        coeff = body if body not in ("", "+", "-") else body + "1"
        return "", coeff
    real, coeff = body[:cut], body[cut:]
    if coeff in ("+", "-"):
        coeff += "1"
    return real, coeff


def _parse_real(token: str) -> Fraction:
    if not re.fullmatch(_REAL, token):
        raise ValueError(token)
    return Fraction(token)


def format_scalar(value) -> str:
    """Print a scalar in the "a+bi" format (exact parts as fractions)."""
    if isinstance(value, ExactScalar):
        re_s, im = str(value.re), value.im
        sign = "-" if im < 0 else "+"
        return f"{re_s}{sign}{abs(im)}i"
    z = complex(value)
    sign = "-" if z.imag < 0 or (z.imag == 0 and math.copysign(1.0, z.imag) < 0) else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def to_complex(value) -> complex:
    return complex(value)


__all__ = ["ExactScalar", "I", "Number", "parse_scalar", "format_scalar", "to_complex"]
