from __future__ import annotations
"""
elliptic_curve.py – the curve y² = x(x−1)(x−t) and its group law
-----------------------------------------------------------------
• CurvePoint is either affine (x, y) or the point at infinity (the zero).
• EllipticCurve works in exact mode when t and the coordinates are Gaussian
  rationals and in complex floating point otherwise; equality dispatch in
  add() uses exact comparison or a relative tolerance accordingly.
• Doubling uses the tangent formula x̃ = λ² + (1+t) − 2x, ỹ = λ(x − x̃) − y;
  printed_double() keeps the misprinted variant for the typo probe.
"""

import logging
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .exact_field import ExactScalar
from .exceptions import PoleError, SingularCurveError

logger = logging.getLogger(__name__)

PUISEUX_THRESHOLD = 1e6


@dataclass(frozen=True)
class CurvePoint:
    x: object = None
    y: object = None
    infinite: bool = False

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls(None, None, True)

    @property
    def is_exact(self) -> bool:
        return self.infinite or (ExactScalar.is_exact(self.x) and ExactScalar.is_exact(self.y))

    def as_complex(self) -> "CurvePoint":
        if self.infinite:
            return self
        return CurvePoint(complex(self.x), complex(self.y))

    def __str__(self) -> str:
        return "inf" if self.infinite else f"({self.x}, {self.y})"


INFINITY = CurvePoint.infinity()


def _is_exact(*values) -> bool:
    return all(ExactScalar.is_exact(v) for v in values)


class EllipticCurve:
    """Legendre-form curve with parameter t ∉ {0, 1}."""

    def __init__(self, t, tol: float = 1e-12):
        if (_is_exact(t) and (t == 0 or t == 1)) or (
            not _is_exact(t) and (abs(complex(t)) < tol or abs(complex(t) - 1) < tol)
        ):
            raise SingularCurveError(f"t = {t} makes the curve singular")
        self.t = t
        self.tol = tol
        self.logger = logging.getLogger(self.__class__.__name__)

    @classmethod
    def through_point(cls, u, v, tol: float = 1e-12) -> tuple["EllipticCurve", CurvePoint]:
        """The Legendre curve through (u, v): t = u − v²/(u(u−1))."""
        if u == 0 or u == 1:
            raise SingularCurveError("u must avoid 0 and 1")
        t = u - v * v / (u * (u - 1))
        return cls(t, tol), CurvePoint(u, v)

    @property
    def exact(self) -> bool:
        return _is_exact(self.t)

    def __repr__(self) -> str:
        return f"EllipticCurve(t={self.t})"

    # ────────────────────────────── helpers ──────────────────────────────
    def cubic(self, x):
        return x * (x - 1) * (x - self.t)

    def cubic_derivative(self, x):
        return 3 * x * x - 2 * (1 + self.t) * x + self.t

    def close(self, a, b) -> bool:
        if _is_exact(a, b):
            return a == b
        a, b = complex(a), complex(b)
        return abs(a - b) <= self.tol * max(1.0, abs(a), abs(b))

    def is_zero(self, a) -> bool:
        return self.close(a, 0)

    # ────────────────────────────── membership ───────────────────────────
    def on_curve(self, p: CurvePoint, tol: float | None = None) -> bool:
        if p.infinite:
            return True
        lhs, rhs = p.y * p.y, self.cubic(p.x)
        if _is_exact(p.x, p.y, self.t):
            return lhs == rhs
        tol = self.tol if tol is None else tol
        scale = max(1.0, abs(complex(lhs)), abs(complex(p.x)) ** 3)
        return abs(complex(lhs) - complex(rhs)) <= tol * scale

    def puiseux_point(self, s) -> CurvePoint:
        """Chart s ↦ (1/s², 1/s³) around the point at infinity (leading order)."""
        return CurvePoint(1 / (s * s), 1 / (s * s * s))

    def puiseux_residual(self, s) -> float:
        p = self.puiseux_point(complex(s))
        lhs = p.y * p.y
        return abs(lhs - self.cubic(p.x)) / abs(lhs)

    # ────────────────────────────── group law ────────────────────────────
    def neg(self, p: CurvePoint) -> CurvePoint:
        if p.infinite:
            return p
        return CurvePoint(p.x, -p.y)

    def add(self, p: CurvePoint, q: CurvePoint) -> CurvePoint:
        if p.infinite:
            return q
        if q.infinite:
            return p
        if self.close(p.x, q.x):
            if self.close(p.y, q.y):
                return self.double(p)
            return INFINITY
        lam = (q.y - p.y) / (q.x - p.x)
        x3 = lam * lam + (1 + self.t) - p.x - q.x
        y3 = lam * (p.x - x3) - p.y
        return CurvePoint(x3, y3)

    def sub(self, p: CurvePoint, q: CurvePoint) -> CurvePoint:
        return self.add(p, self.neg(q))

    def double(self, p: CurvePoint) -> CurvePoint:
        if p.infinite or self.is_zero(p.y):
            return INFINITY
        lam = self.cubic_derivative(p.x) / (2 * p.y)
        x2 = lam * lam + (1 + self.t) - 2 * p.x
        y2 = lam * (p.x - x2) - p.y
        return CurvePoint(x2, y2)

    def printed_double(self, p: CurvePoint) -> CurvePoint:
        """Doubling with the misprinted signs (x̃ = λ² − (1+t) − 2x, ỹ = λx − x̃ − y)."""
        if p.infinite or self.is_zero(p.y):
            return INFINITY
        lam = self.cubic_derivative(p.x) / (2 * p.y)
        x2 = lam * lam - (1 + self.t) - 2 * p.x
        y2 = lam * p.x - x2 - p.y
        return CurvePoint(x2, y2)

    def multiply(self, n: int, p: CurvePoint) -> CurvePoint:
        if n < 0:
            return self.multiply(-n, self.neg(p))
        result, addend = INFINITY, p
        while n:
            if n & 1:
                result = self.add(result, addend)
            addend = self.double(addend)
            n >>= 1
        return result

    def sum(self, points: Iterable[CurvePoint]) -> CurvePoint:
        total = INFINITY
        for p in points:
            total = self.add(total, p)
        return total

    def two_torsion(self) -> dict[str, CurvePoint]:
        zero = ExactScalar(0) if self.exact else 0j
        return {
            "inf": INFINITY,
            "0": CurvePoint(zero, zero),
            "1": CurvePoint(zero + 1, zero),
            "t": CurvePoint(self.t, zero),
        }

    def points_close(self, p: CurvePoint, q: CurvePoint, tol: float | None = None) -> bool:
        """Equality up to tolerance; far out it compares in the chart s = x/y."""
        if p.infinite or q.infinite:
            if p.infinite and q.infinite:
                return True
            other = q if p.infinite else p
            return abs(complex(other.x)) > 1 / (tol or self.tol)
        if p.is_exact and q.is_exact:
            return p.x == q.x and p.y == q.y
        tol = self.tol if tol is None else tol
        if max(abs(complex(p.x)), abs(complex(q.x))) > PUISEUX_THRESHOLD:
            sp, sq = complex(p.x) / complex(p.y), complex(q.x) / complex(q.y)
            return abs(sp - sq) <= tol * max(abs(sp), abs(sq))

        def near(a, b):
            a, b = complex(a), complex(b)
            return abs(a - b) <= tol * max(1.0, abs(a), abs(b))

        return near(p.x, q.x) and near(p.y, q.y)

    # ────────────────────────────── sampling / M₂ ────────────────────────
    def sample_point(self, x=None, rng: np.random.Generator | None = None, box: float = 3.0) -> CurvePoint:
        """On-curve point above x (principal square root); random x from rng if omitted."""
        if x is None:
            if rng is None:
                raise ValueError("sample_point needs either x or rng")
            x = complex(rng.uniform(-box, box), rng.uniform(-box, box))
        value = self.cubic(x)
        if _is_exact(x, self.t):
            root = ExactScalar.coerce(value).sqrt()
            if root is not None:
                return CurvePoint(x, root)
            value = complex(value)
            x = complex(x)
        return CurvePoint(x, complex(np.sqrt(complex(value))))

    def x_double_formula(self, x, y):
        """pr₁ of multiplication by 2: (3x²−2(t+1)x+t)²/(4x(x−1)(x−t)) + (1+t) − 2x."""
        denom = 4 * self.cubic(x)
        if self.is_zero(y) or self.is_zero(denom):
            raise PoleError(f"x_double_formula pole at x={x}")
        return self.cubic_derivative(x) ** 2 / denom + (1 + self.t) - 2 * x


# ────────────────────────────── module-level API ─────────────────────────
def on_curve(p: CurvePoint, t, tol: float = 1e-12) -> bool:
    return EllipticCurve(t, tol).on_curve(p)


def two_torsion(t) -> dict[str, CurvePoint]:
    return EllipticCurve(t).two_torsion()


__all__ = [
    "CurvePoint",
    "INFINITY",
    "EllipticCurve",
    "on_curve",
    "two_torsion",
    "PUISEUX_THRESHOLD",
]
