"""
identity_catalog.py – the named exact identities and the polynomials they use
------------------------------------------------------------------------------
• Builders for the leaf polynomials f₀, f₁, f_t, the discriminant quartic Δ,
  the coefficients A, B, C of the section equation and the 1-form Ω.
• IDENTITIES maps an id (I1 … I9) to a zero-expected difference polynomial;
  TYPO_PROBES holds printed variants that must NOT vanish.
• identity_check() decides by canonical form and cross-checks by grid
  sampling (a polynomial vanishing on a grid with more points per variable
  than its degree is zero).
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable

from .exact_field import ExactScalar, format_scalar
from .multipoly import MultiPoly, variables

logger = logging.getLogger(__name__)

x, y, z, t, u = variables("x", "y", "z", "t", "u")


# ────────────────────────────── building blocks ──────────────────────────────
def leaf_f0() -> MultiPoly:
    return -z ** 2 + 2 * z - x


def leaf_f1() -> MultiPoly:
    return -z ** 2 + x


def leaf_ft() -> MultiPoly:
    return z ** 2 - 2 * x * z + x


def delta_quartic(base: MultiPoly = u) -> MultiPoly:
    """Δ(base, z) with t symbolic."""
    b = base
    return (
        (t - b) * z ** 4
        - 4 * (t - 1) * b * z ** 3
        + 2 * b * (2 * t * b + t - b - 2) * z ** 2
        - 4 * b ** 2 * (t - 1) * z
        + b ** 2 * (t - b)
    )


def section_coefficients() -> tuple[MultiPoly, MultiPoly, MultiPoly]:
    """A, B, C of A·x₀² + B·x₀ + C = 0 (sections through (u, v, z))."""
    a = (u - z) ** 2
    b = (-t - u) * z ** 2 + 2 * u * (t + 1) * z - u * (t + u)
    c = t * u * (z - 1) ** 2
    return a, b, c


def omega_coefficients() -> tuple[MultiPoly, MultiPoly]:
    """Ω = A_Ω dx + B_Ω dz."""
    return -z ** 2 - 2 * (x - 1) * z + x, 4 * x * (x - 1)


def first_integral_parts() -> tuple[MultiPoly, MultiPoly]:
    """F = N / D with N = x f₀², D = f_t²."""
    return x * leaf_f0() ** 2, leaf_ft() ** 2


def riccati_slope_numerator() -> MultiPoly:
    """Z₀ = n / (4x(x−1)) with n = z² + 2(x−1)z − x."""
    return z ** 2 + 2 * (x - 1) * z - x


def web_constant_numerator() -> MultiPoly:
    """P = this / (4x²(x−1)²(t−x)), the derived constant coefficient."""
    return z * (z - 1) * ((2 * t * x - x ** 2 - t) * z - x ** 3 + 2 * x ** 2 - t * x)


def section_slope_sum() -> tuple[MultiPoly, MultiPoly]:
    """
    m₁ + m₂ = num / den for the two sections through (x, z), by Vieta.

    A section with parameter abscissa a has slope (α + βa)/(2·cubic·(x − a)) at
    (x, z). The abscissae solve A a² + B a + C = 0 with u := x.
    """
    cubic = x * (x - 1) * (x - t)
    g = 3 * x ** 2 - 2 * (1 + t) * x + t
    alpha = (1 - z) * (2 * cubic - x * g)
    beta = (x - z) * g - 2 * cubic
    a, b, c = (coef.substitute("u", x) for coef in section_coefficients())
    num = 2 * x * a * alpha + b * alpha - x * b * beta - 2 * c * beta
    den = 2 * cubic * (a * x ** 2 + b * x + c)
    return num, den


def printed_web_constant_numerator() -> MultiPoly:
    return z * (z - 1) * ((2 * t * x - x ** 2 - t) * z - x ** 3 + x ** 2 - t * x + 2)


def double_star_numerator(var: MultiPoly = z) -> MultiPoly:
    """N(Z) of the pulled-back ODE, written in `var`."""
    return (t - 1) * var ** 4 + (-4 * t + 4) * var ** 3 + (4 * t - 8) * var ** 2 + 8 * var - 4


# ────────────────────────────── catalog ──────────────────────────────
def _i1() -> MultiPoly:
    return x * leaf_f0() ** 2 - (x - 1) * leaf_f1() ** 2 - leaf_ft() ** 2


def _i2() -> MultiPoly:
    return x * leaf_f0() ** 2 - t * leaf_ft() ** 2 + delta_quartic(x)


def _i3() -> MultiPoly:
    a, b, c = section_coefficients()
    return b ** 2 - 4 * a * c - (t - u) * delta_quartic(u)


def _i4() -> MultiPoly:
    num, den = first_integral_parts()
    return (num - x * den).substitute("z", 0)


def _i5() -> MultiPoly:
    num, den = first_integral_parts()
    a_om, b_om = omega_coefficients()
    fx = num.derivative("x") * den - num * den.derivative("x")
    fz = num.derivative("z") * den - num * den.derivative("z")
    return (fx * b_om - fz * a_om).reduce_mod_curve()


def _i6() -> MultiPoly:
    # printed linear coefficient −n/(2x(x−1)) against −(m₁ + m₂), cross-multiplied
    total, den = section_slope_sum()
    return riccati_slope_numerator() * den - total * (2 * x * (x - 1))


def _i7() -> MultiPoly:
    return 4 * web_constant_numerator() - ((t - x) * riccati_slope_numerator() ** 2 - delta_quartic(x))


def _i8() -> MultiPoly:
    return double_star_numerator(z) - (t * z ** 2 * (z - 2) ** 2 - (z ** 2 - 2 * z + 2) ** 2)


def _i9() -> MultiPoly:
    slope_num = 3 * x ** 2 - 2 * (1 + t) * x + t
    return (slope_num ** 2 + 4 * y ** 2 * (1 + t - 2 * x) - (x ** 2 - t) ** 2).reduce_mod_curve()


def _t1() -> MultiPoly:
    # printed closed form x(z²−2z−x)² against the construction x f₀²
    return x * (z ** 2 - 2 * z - x) ** 2 - x * leaf_f0() ** 2


def _t2() -> MultiPoly:
    return printed_web_constant_numerator() - web_constant_numerator()


@dataclass(frozen=True)
class IdentityEntry:
    name: str
    description: str
    build: Callable[[], MultiPoly]
    expect_zero: bool = True


IDENTITIES: dict[str, IdentityEntry] = {
    entry.name: entry
    for entry in (
        IdentityEntry("I1", "x f0^2 - (x-1) f1^2 = ft^2", _i1),
        IdentityEntry("I2", "x f0^2 - t ft^2 = -Delta(u:=x, z)", _i2),
        IdentityEntry("I3", "B^2 - 4AC = (t-u) Delta(u, z)", _i3),
        IdentityEntry("I4", "numerator of F(x,0) - x vanishes", _i4),
        IdentityEntry("I5", "numerator of dF ^ Omega vanishes mod curve", _i5),
        IdentityEntry("I6", "2-web linear coefficient -(m1+m2) from the section slopes = -2 Z0", _i6),
        IdentityEntry("I7", "derived 2-web constant coefficient P = Z0^2 - Delta/(16x^2(x-1)^2(t-x))", _i7),
        IdentityEntry("I8", "N(Z) = t Z^2 (Z-2)^2 - (Z^2-2Z+2)^2", _i8),
        IdentityEntry("I9", "x(2P) = (x^2 - t)^2 / (4 y^2) mod curve", _i9),
    )
}

TYPO_PROBES: dict[str, IdentityEntry] = {
    entry.name: entry
    for entry in (
        IdentityEntry("T1", "printed closed form x(z^2-2z-x)^2 vs x f0^2", _t1, expect_zero=False),
        IdentityEntry("T2", "printed constant coefficient '-x^3+x^2-tx+2' vs derived", _t2, expect_zero=False),
    )
}


@dataclass
class IdentityResult:
    name: str
    description: str
    is_zero: bool
    expect_zero: bool
    term_count: int
    total_degree: int
    witness: dict[str, str] | None = None
    witness_value: str | None = None
    sampled_zero: bool | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        agrees = self.sampled_zero is None or self.sampled_zero == self.is_zero
        return agrees and self.is_zero == self.expect_zero


#-----------------------------------------------------------------------------------------
def find_witness(p: MultiPoly, max_value: int = 10) -> dict[str, int] | None:
    """First integer assignment (grid 1..max_value) where p is nonzero."""
    if p.is_zero():
        return None
    names = sorted(p.variables())
    if not names:
        return {}
    grid = range(1, max_value + 1)
    for point in itertools.product(grid, repeat=len(names)):
        assignment = dict(zip(names, point))
        if not p.evaluate(assignment).is_zero():
            return assignment
    return None


def sampling_vanishes(p: MultiPoly) -> bool:
    """
    Evaluate on the grid {0..deg_v} per variable.

    A nonzero polynomial of per-variable degree d_v cannot vanish on a
    product grid with d_v + 1 points per variable, so this agrees with
    the canonical-form test in both directions.
    """
    names = sorted(p.variables())
    if not names:
        return p.is_zero()
    ranges = [range(p.degree(n) + 1) for n in names]
    for point in itertools.product(*ranges):
        if not p.evaluate(dict(zip(names, point))).is_zero():
            return False
    return True


def identity_check(identity_id: str, *, cross_check: bool | None = None) -> IdentityResult:
    """
    Exact verdict for a catalog entry (I1 … I9 or a typo probe T1, T2).

    The grid cross-check runs by default on I1–I3 and the probes.
    """
    entry = IDENTITIES.get(identity_id) or TYPO_PROBES.get(identity_id)
    if entry is None:
        raise KeyError(f"unknown identity {identity_id!r}")

    poly = entry.build().normalize()
    result = IdentityResult(
        name=entry.name,
        description=entry.description,
        is_zero=poly.is_zero(),
        expect_zero=entry.expect_zero,
        term_count=len(poly.terms),
        total_degree=poly.total_degree(),
    )

    if cross_check is None:
        cross_check = identity_id in ("I1", "I2", "I3") or not entry.expect_zero
    if cross_check:
        result.sampled_zero = sampling_vanishes(poly)

    if not result.is_zero:
        witness = find_witness(poly)
        if witness is not None:
            result.witness = {k: str(v) for k, v in witness.items()}
            result.witness_value = format_scalar(poly.evaluate(witness))
        if not entry.expect_zero:
            result.notes.append(f"printed form differs from the construction: {entry.description}")

    logger.debug("identity %s: zero=%s terms=%d", entry.name, result.is_zero, result.term_count)
    return result


__all__ = [
    "leaf_f0",
    "leaf_f1",
    "leaf_ft",
    "delta_quartic",
    "section_coefficients",
    "omega_coefficients",
    "first_integral_parts",
    "riccati_slope_numerator",
    "web_constant_numerator",
    "printed_web_constant_numerator",
    "double_star_numerator",
    "IdentityEntry",
    "IdentityResult",
    "IDENTITIES",
    "TYPO_PROBES",
    "find_witness",
    "sampling_vanishes",
    "identity_check",
]
