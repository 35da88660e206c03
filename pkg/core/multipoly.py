"""
multipoly.py – sparse polynomials over Q(i) in the variables (x, y, z, t, u)
-----------------------------------------------------------------------------
• terms: exponent tuple -> ExactScalar, zero coefficients are never stored,
  so the empty dict *is* the zero polynomial (canonical-form identity test).
• reduce_mod_curve() rewrites y² as x³ − (1+t)x² + tx until the y-degree
  is at most one.
• evaluate() is exact for exact inputs and falls back to complex otherwise.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .exact_field import ExactScalar
from .exceptions import UnassignedVariableError

VARIABLES: tuple[str, ...] = ("x", "y", "z", "t", "u")
_INDEX = {name: k for k, name in enumerate(VARIABLES)}
_ZERO_EXP = (0,) * len(VARIABLES)

Monomial = tuple[int, int, int, int, int]


class MultiPoly:
    """Immutable sparse multivariate polynomial."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        clean: dict[Monomial, ExactScalar] = {}
        for exp, coeff in (terms or {}).items():
            if len(exp) != len(VARIABLES) or any(e < 0 for e in exp):
                raise ValueError(f"bad exponent vector {exp!r}")
            c = ExactScalar.coerce(coeff)
            if not c.is_zero():
                clean[tuple(exp)] = c
        self.terms = clean

    # ────────────────────────────── constructors ──────────────────────────
    @classmethod
    def const(cls, value) -> "MultiPoly":
        return cls({_ZERO_EXP: value})

    @classmethod
    def var(cls, name: str) -> "MultiPoly":
        exp = [0] * len(VARIABLES)
        exp[_INDEX[name]] = 1
        return cls({tuple(exp): 1})

    @classmethod
    def zero(cls) -> "MultiPoly":
        return cls()

    # ────────────────────────────── ring operations ───────────────────────
    @staticmethod
    def _lift(other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.const(other)

    def __add__(self, other) -> "MultiPoly":
        o = MultiPoly._lift(other)
        out = dict(self.terms)
        for exp, c in o.terms.items():
            out[exp] = out[exp] + c if exp in out else c
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({exp: -c for exp, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-MultiPoly._lift(other))

    def __rsub__(self, other) -> "MultiPoly":
        return MultiPoly._lift(other) - self

    def __mul__(self, other) -> "MultiPoly":
        o = MultiPoly._lift(other)
        out: dict[Monomial, ExactScalar] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                prod = c1 * c2
                out[exp] = out[exp] + prod if exp in out else prod
        return MultiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("MultiPoly powers must be non-negative integers")
        result, base = MultiPoly.const(1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            try:
                other = MultiPoly._lift(other)
            except TypeError:
                return NotImplemented
        return (self - other).is_zero()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    # ────────────────────────────── queries ───────────────────────────────
    def is_zero(self) -> bool:
        return not self.terms

    def canonical_key(self) -> tuple:
        return tuple(sorted((exp, c.re, c.im) for exp, c in self.terms.items()))

    def variables(self) -> set[str]:
        used = set()
        for exp in self.terms:
            used.update(VARIABLES[k] for k, e in enumerate(exp) if e)
        return used

    def degree(self, name: str) -> int:
        k = _INDEX[name]
        return max((exp[k] for exp in self.terms), default=0)

    def total_degree(self) -> int:
        return max((sum(exp) for exp in self.terms), default=0)

    # ────────────────────────────── transformations ───────────────────────
    def derivative(self, name: str) -> "MultiPoly":
        k = _INDEX[name]
        out = {}
        for exp, c in self.terms.items():
            if exp[k]:
                new = list(exp)
                new[k] -= 1
                out[tuple(new)] = c * exp[k]
        return MultiPoly(out)

    def substitute(self, name: str, value) -> "MultiPoly":
        """Replace a variable by a polynomial (or constant)."""
        k = _INDEX[name]
        value = MultiPoly._lift(value)
        powers: dict[int, MultiPoly] = {0: MultiPoly.const(1)}
        result = MultiPoly()
        for exp, c in self.terms.items():
            e = exp[k]
            if e not in powers:
                powers[e] = value ** e
            rest = list(exp)
            rest[k] = 0
            result = result + MultiPoly({tuple(rest): c}) * powers[e]
        return result

    def reduce_mod_curve(self) -> "MultiPoly":
        """Rewrite modulo y² = x(x−1)(x−t); result has y-degree ≤ 1."""
        x, t = MultiPoly.var("x"), MultiPoly.var("t")
        cubic = x ** 3 - (1 + t) * x ** 2 + t * x
        ky = _INDEX["y"]
        cubic_powers: dict[int, MultiPoly] = {0: MultiPoly.const(1)}
        result = MultiPoly()
        for exp, c in self.terms.items():
            half, odd = divmod(exp[ky], 2)
            if half not in cubic_powers:
                cubic_powers[half] = cubic ** half
            rest = list(exp)
            rest[ky] = odd
            result = result + MultiPoly({tuple(rest): c}) * cubic_powers[half]
        return result

    def normalize(self) -> "MultiPoly":
        """Canonical copy (terms in sorted order, zeros already dropped)."""
        return MultiPoly(dict(sorted(self.terms.items())))

    # ────────────────────────────── evaluation ────────────────────────────
    def evaluate(self, assignment: Mapping[str, object]):
        """Value at `assignment`; exact iff every used value is exact."""
        needed = self.variables()
        missing = sorted(needed - set(assignment))
        if missing:
            raise UnassignedVariableError(f"unassigned variable(s): {', '.join(missing)}")

        values = [assignment.get(name, 0) for name in VARIABLES]
        exact = all(ExactScalar.is_exact(values[_INDEX[n]]) for n in needed)
        if exact:
            values = [ExactScalar.coerce(v) if ExactScalar.is_exact(v) else ExactScalar(0) for v in values]
            total = ExactScalar(0)
        else:
            values = [complex(v) for v in values]
            total = 0j

        for exp, c in self.terms.items():
            term = c if exact else complex(c)
            for k, e in enumerate(exp):
                if e:
                    term = term * values[k] ** e
            total = total + term
        return total

    def univariate_coefficients(self, name: str) -> list:
        """Coefficients (highest degree first) of a polynomial in one variable."""
        others = self.variables() - {name}
        if others:
            raise ValueError(f"polynomial still depends on {sorted(others)}")
        k = _INDEX[name]
        deg = self.degree(name)
        coeffs = [ExactScalar(0)] * (deg + 1)
        for exp, c in self.terms.items():
            coeffs[deg - exp[k]] = c
        return coeffs

    # ────────────────────────────── display ───────────────────────────────
    def __repr__(self) -> str:
        if not self.terms:
            return "MultiPoly(0)"
        parts = []
        for exp, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                f"{VARIABLES[k]}^{e}" if e > 1 else VARIABLES[k]
                for k, e in enumerate(exp) if e
            )
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return "MultiPoly(" + " + ".join(parts) + ")"


#-----------------------------------------------------------------------------------------
def variables(*names: str) -> tuple[MultiPoly, ...]:
    return tuple(MultiPoly.var(n) for n in names)


def poly_eval(p: MultiPoly, assignment: Mapping[str, object]):
    return p.evaluate(assignment)


def poly_normalize(p: MultiPoly) -> MultiPoly:
    return p.normalize()


def reduce_mod_curve(p: MultiPoly) -> MultiPoly:
    return p.reduce_mod_curve()


def rational(num: int, den: int = 1) -> ExactScalar:
    return ExactScalar(Fraction(num, den))


def from_terms(items: Iterable[tuple[dict[str, int], object]]) -> MultiPoly:
    """Build from ({'x': 2, 'z': 1}, coeff) pairs."""
    terms: dict[Monomial, ExactScalar] = {}
    for powers, coeff in items:
        exp = tuple(powers.get(name, 0) for name in VARIABLES)
        c = ExactScalar.coerce(coeff)
        terms[exp] = terms[exp] + c if exp in terms else c
    return MultiPoly(terms)


__all__ = [
    "VARIABLES",
    "MultiPoly",
    "variables",
    "poly_eval",
    "poly_normalize",
    "reduce_mod_curve",
    "rational",
    "from_terms",
]
