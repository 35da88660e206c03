"""
minimal_sections.py – the 2-web of +4 sections in the trivialization
---------------------------------------------------------------------
• SectionParam labels a section by a curve point: generic (x₀, y₀), the
  diagonal z = x, or a constant section z ≡ c with c ∈ {0, 1, ∞}.
• sections_through() solves A·x₀² + B·x₀ + C = 0 for the two sections
  through (u, v, z), recovers y₀ from the graph equation and validates it.
• Web slopes, the derived 2-web ODE, the discriminant Δ, self-intersection
  bookkeeping and the group-law form of the intersection lemma.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from core.elliptic_curve import INFINITY, CurvePoint, EllipticCurve, PUISEUX_THRESHOLD
from core.exact_field import ExactScalar
from core.exceptions import InconsistentSectionError, NotExactError, PoleError
from core.moebius import INF, is_infinite
from geometry.riccati_foliation import first_integral, slope_z0

logger = logging.getLogger(__name__)

GENERIC, DIAGONAL, CONSTANT = "generic", "diagonal", "constant"
CONSTANT_VALUES = (0, 1, INF)


@dataclass(frozen=True)
class SectionParam:
    kind: str
    point: CurvePoint | None = None
    constant: object = None

    @classmethod
    def generic(cls, q: CurvePoint) -> "SectionParam":
        return cls(GENERIC, point=q)

    @classmethod
    def diagonal(cls) -> "SectionParam":
        return cls(DIAGONAL)

    @classmethod
    def constant_section(cls, c) -> "SectionParam":
        return cls(CONSTANT, constant=INF if is_infinite(c) else c)

    def __str__(self) -> str:
        if self.kind == GENERIC:
            return f"Generic{self.point}"
        if self.kind == DIAGONAL:
            return "Diagonal"
        return f"Constant({'inf' if is_infinite(self.constant) else self.constant})"


@dataclass
class WebSolveResult:
    sections: tuple[SectionParam, SectionParam]
    roots: tuple
    graph_residuals: tuple[float, float]
    curve_residuals: tuple[float, float]
    tangent: bool = False
    notes: list[str] = field(default_factory=list)


def _exact(*values) -> bool:
    return all(ExactScalar.is_exact(v) for v in values)


class SectionWeb:
    """Section solver for one curve; holds the calibrated constant-section labels."""

    def __init__(self, curve: EllipticCurve, tol: float = 1e-9):
        self.curve = curve
        self.tol = tol
        self.logger = logging.getLogger(self.__class__.__name__)

    #-----------------------------------------------------------------------------------------
    def _close(self, a, b, tol: float | None = None) -> bool:
        if _exact(a, b):
            return a == b
        tol = self.tol if tol is None else tol
        a, b = complex(a), complex(b)
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))

    # ────────────────────────────── labels ↔ parameters ───────────────────
    def parameter_point(self, s: SectionParam) -> CurvePoint:
        """Curve point labelling a section (Diagonal ↔ ∞, constants ↔ 2-torsion)."""
        if s.kind == GENERIC:
            return s.point
        if s.kind == DIAGONAL:
            return INFINITY
        torsion = self.curve.two_torsion()
        if is_infinite(s.constant):
            return torsion["t"]
        return torsion["1"] if s.constant == 0 else torsion["0"]

    def from_parameter(self, q: CurvePoint) -> SectionParam:
        if q.infinite:
            return SectionParam.diagonal()
        if self.curve.is_zero(q.y):
            if self.curve.is_zero(q.x):
                return SectionParam.constant_section(1)
            if self.curve.close(q.x, 1):
                return SectionParam.constant_section(0)
            return SectionParam.constant_section(INF)
        return SectionParam.generic(q)

    # ────────────────────────────── graph ────────────────────────────────
    def section_value(self, s: SectionParam, p: CurvePoint):
        if s.kind == CONSTANT:
            return s.constant
        if p.infinite:
            return INF
        if s.kind == DIAGONAL:
            return p.x
        x0, y0 = s.point.x, s.point.y
        x, y = p.x, p.y
        if self._close(x, x0, 1e-13):
            if self._close(y, y0, 1e-13):
                # value at q itself, the limit of the graph along the curve
                w = self.curve.cubic_derivative(x0) / (2 * (x0 - 1) * (x0 - self.curve.t))
                return (1 - x0) * (1 - w)
            return INF
        if not _exact(x) and abs(complex(x)) > PUISEUX_THRESHOLD:
            return (1 - x0) * (y0 - x0 * y / x) / (y0 * (1 - x0 / x))
        return (1 - x0) * (y0 * x - x0 * y) / (y0 * (x - x0))

    def section_slope(self, s: SectionParam, p: CurvePoint):
        if s.kind == CONSTANT:
            return 0
        if s.kind == DIAGONAL:
            return 1
        if p.infinite or self._close(p.x, s.point.x, 1e-13):
            raise PoleError("section slope is undefined over the parameter's x-coordinate")
        z = self.section_value(s, p)
        if is_infinite(z):
            raise PoleError("section slope at a pole of the graph")
        return self.slope_formula(s.point.x, p.x, z)

    def slope_formula(self, a, x, z):
        """dz/dx of the generic section with parameter abscissa a, at (x, z)."""
        t = self.curve.t
        w = (3 * x * x - 2 * (1 + t) * x + t) / (2 * x * (x - 1) * (x - t))
        return (1 - a - z) / (x - a) + (z + (a - 1) * x / (x - a)) * w

    # ────────────────────────────── solver ───────────────────────────────
    def coefficients(self, u, z) -> tuple:
        t = self.curve.t
        a = (u - z) ** 2
        b = (-t - u) * z * z + 2 * u * (t + 1) * z - u * (t + u)
        c = t * u * (z - 1) ** 2
        return a, b, c

    def _quadratic_roots(self, a, b, c) -> tuple:
        disc = b * b - 4 * a * c
        if _exact(a, b, c):
            root = ExactScalar.coerce(disc).sqrt()
            if root is None:
                raise NotExactError("section equation has no Gaussian-rational roots here")
            return (-b + root) / (2 * a), (-b - root) / (2 * a)
        a, b, c = complex(a), complex(b), complex(c)
        root = complex(np.sqrt(complex(disc)))
        if abs(b + root) < abs(b - root):
            root = -root
        q = -(b + root) / 2
        if q == 0:
            return 0j, 0j
        return q / a, c / q

    def sections_through(self, u, v, z) -> WebSolveResult:
        """The two +4 sections through (u, v, z)."""
        if self.curve.is_zero(v):
            raise ValueError("sections_through needs v ≠ 0")
        p = CurvePoint(u, v)
        t = self.curve.t

        if is_infinite(z):
            roots = (t, u)
            sections = (SectionParam.constant_section(INF), SectionParam.generic(CurvePoint(u, -v)))
            return self._result(p, z, sections, roots)

        a, b, c = self.coefficients(u, z)
        leading_vanishes = a == 0 if _exact(a) else abs(complex(a)) <= 1e-14 * max(1.0, abs(complex(b)))
        if leading_vanishes:
            root = -c / b
            sections = (SectionParam.diagonal(), self._label_root(root, u, v, z))
            return self._result(p, z, sections, (INF, root))

        roots = self._quadratic_roots(a, b, c)
        sections = tuple(self._label_root(r, u, v, z) for r in roots)
        result = self._result(p, z, sections, roots)
        disc = b * b - 4 * a * c
        result.tangent = disc == 0 if _exact(disc) else abs(complex(disc)) <= 1e-12 * max(1.0, abs(complex(b)) ** 2)
        return result

    def _label_root(self, x0, u, v, z) -> SectionParam:
        curve = self.curve
        if self._close(x0, 1, 1e-12):
            return SectionParam.constant_section(0)
        if self._close(x0, 0, 1e-12):
            return SectionParam.constant_section(1)
        if self._close(x0, curve.t, 1e-12):
            return SectionParam.constant_section(INF)
        denom = (1 - x0) * u - z * (u - x0)
        if self._close(denom, 0, 1e-12):
            return self._label_by_branch(x0, u, v, z)
        y0 = (1 - x0) * x0 * v / denom
        residual = y0 * y0 - curve.cubic(x0)
        if _exact(residual):
            ok = residual == 0
        else:
            ok = abs(complex(residual)) <= 1e-7 * max(1.0, abs(complex(y0)) ** 2)
        if not ok:
            raise InconsistentSectionError(f"recovered y0 = {y0} is off the curve at x0 = {x0}")
        return SectionParam.generic(CurvePoint(x0, y0))

    def _label_by_branch(self, x0, u, v, z) -> SectionParam:
        root = None
        if _exact(x0, self.curve.t):
            root = ExactScalar.coerce(self.curve.cubic(x0)).sqrt()
        if root is None:
            root = complex(np.sqrt(complex(self.curve.cubic(x0))))
        candidates = [SectionParam.generic(CurvePoint(x0, root)), SectionParam.generic(CurvePoint(x0, -root))]
        p = CurvePoint(u, v)

        def miss(s):
            value = self.section_value(s, p)
            return float("inf") if is_infinite(value) else abs(complex(value) - complex(z))

        return min(candidates, key=miss)

    def _result(self, p: CurvePoint, z, sections, roots) -> WebSolveResult:
        graph, curve_res = [], []
        for s in sections:
            value = self.section_value(s, p)
            if is_infinite(z) or is_infinite(value):
                graph.append(0.0 if is_infinite(z) and is_infinite(value) else float("inf"))
            else:
                graph.append(abs(complex(value) - complex(z)) / max(1.0, abs(complex(z))))
            if s.kind == GENERIC:
                q = s.point
                res = q.y * q.y - self.curve.cubic(q.x)
                curve_res.append(abs(complex(res)) / max(1.0, abs(complex(q.y)) ** 2))
            else:
                curve_res.append(0.0)
        return WebSolveResult(sections=tuple(sections), roots=tuple(roots),
                              graph_residuals=tuple(graph), curve_residuals=tuple(curve_res))

    # ────────────────────────────── slopes & ODE ─────────────────────────
    def web_slopes(self, u, v, z) -> tuple:
        solved = self.sections_through(u, v, z)
        p = CurvePoint(u, v)
        z1, z2 = (self.section_slope(s, p) for s in solved.sections)
        return z1, z2

    def web_constant(self, x, z, printed: bool = False):
        t = self.curve.t
        if any(self.curve.is_zero(d) for d in (x, x - 1, x - t)):
            raise PoleError(f"2-web ODE has a pole over x = {x}")
        tail = -x ** 3 + x * x - t * x + 2 if printed else -x ** 3 + 2 * x * x - t * x
        return z * (z - 1) * ((2 * t * x - x * x - t) * z + tail) / (4 * x * x * (x - 1) ** 2 * (t - x))

    def two_web_ode_residual(self, x, z, m, printed: bool = False):
        """m² − 2Z₀·m + P(x, z)."""
        return m * m - 2 * slope_z0(x, z) * m + self.web_constant(x, z, printed)

    # ────────────────────────────── discriminant ─────────────────────────
    def delta_coefficients(self, u) -> tuple:
        t = self.curve.t
        return (
            t - u,
            -4 * (t - 1) * u,
            2 * u * (2 * t * u + t - u - 2),
            -4 * u * u * (t - 1),
            u * u * (t - u),
        )

    def discriminant_delta(self, u, z):
        return sum(c * z ** (4 - k) for k, c in enumerate(self.delta_coefficients(u)))

    def delta_roots(self, u, polish: int = 3) -> list:
        """Four roots of Δ(u, ·); a dropped leading degree contributes ∞."""
        coeffs = [complex(c) for c in self.delta_coefficients(u)]
        missing = 0
        while coeffs and abs(coeffs[0]) <= 1e-14 * max(abs(c) for c in coeffs):
            coeffs.pop(0)
            missing += 1
        roots = list(np.roots(coeffs)) if len(coeffs) > 1 else []
        dcoeffs = np.polyder(coeffs)
        polished = []
        for r in roots:
            for _ in range(polish):
                d = np.polyval(dcoeffs, r)
                if d == 0:
                    break
                r = r - np.polyval(coeffs, r) / d
            polished.append(complex(r))
        return polished + [INF] * missing

    def delta_leaf_residual(self, u) -> float:
        """max |F(u, zᵢ) − t| / |t| over the finite roots of Δ(u, ·)."""
        t = complex(self.curve.t)
        worst = 0.0
        for root in self.delta_roots(u):
            if is_infinite(root):
                continue
            value = first_integral(u, root)
            worst = max(worst, float("inf") if is_infinite(value) else abs(value - t) / abs(t))
        return worst

    def section_discriminant(self, u, z):
        a, b, c = self.coefficients(u, z)
        return b * b - 4 * a * c

    # ────────────────────────────── intersections ────────────────────────
    def intersection_base_point(self, s1: SectionParam, s2: SectionParam) -> CurvePoint:
        """p with q₁ ⊕ q₂ ⊕ p = (t, 0)."""
        q1, q2 = self.parameter_point(s1), self.parameter_point(s2)
        if s1.kind == s2.kind and (
            (s1.kind == DIAGONAL)
            or (s1.kind == CONSTANT and s1.constant == s2.constant)
            or (s1.kind == GENERIC and self.curve.points_close(q1, q2))
        ):
            raise ValueError("intersection_base_point needs two distinct sections")
        target = self.curve.two_torsion()["t"]
        return self.curve.sub(self.curve.sub(target, q1), q2)

    def calibrate_intersection_offset(self, s: SectionParam, p: CurvePoint) -> CurvePoint:
        """q₁ ⊕ q₂ ⊕ p measured from the second section through (p, s(p))."""
        z = self.section_value(s, p)
        solved = self.sections_through(p.x, p.y, z)
        q_s = self.parameter_point(s)
        params = [self.parameter_point(o) for o in solved.sections]
        # drop the section we started from; what remains is the partner
        if self.curve.points_close(params[0], q_s, 1e-7):
            partner = params[1]
        else:
            partner = params[0]
        return self.curve.sum((q_s, partner, p))

    def calibrate_constant_sections(self, sample: CurvePoint) -> dict:
        """Torsion parameter read off the section equation at z ∈ {0, 1, ∞}."""
        mapping = {}
        for c in CONSTANT_VALUES:
            roots = (self.curve.t, sample.x) if is_infinite(c) else self._quadratic_roots(*self.coefficients(sample.x, c))
            for r in roots:
                for label, q in self.curve.two_torsion().items():
                    if not q.infinite and self._close(r, q.x, 1e-9):
                        mapping["inf" if is_infinite(c) else c] = q
        return mapping


def self_intersection_update(sigma_prime_self_int: int, passes: Sequence[bool]) -> int:
    """σ.σ = σ′.σ′ + Σ εᵢ with εᵢ = −1 through a center, +1 otherwise."""
    if len(passes) != 3:
        raise ValueError("expected three center incidences")
    return sigma_prime_self_int + sum(-1 if hit else 1 for hit in passes)


__all__ = [
    "GENERIC",
    "DIAGONAL",
    "CONSTANT",
    "CONSTANT_VALUES",
    "SectionParam",
    "WebSolveResult",
    "SectionWeb",
    "self_intersection_update",
]
