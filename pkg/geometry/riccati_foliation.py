"""
riccati_foliation.py – the trivialized Riccati foliation on C × P¹
-------------------------------------------------------------------
• Slope field Z₀ = (z² + 2(x−1)z − x) / (4x(x−1)) of the 1-form
  Ω = 4x(x−1)dz + (−z² − 2(x−1)z + x)dx.
• First integral F = x f₀² / f_t² (0 on f₀, 1 on f₁, pole on f_t, t on Δ).
• Singular points over x ∈ {0, 1, ∞} with their linear parts, also read in
  the ramified coordinate x = s² of the curve.
• The pullback ψ by multiplication by 2 and the pulled-back ODE (★★).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from core.elliptic_curve import EllipticCurve
from core.exceptions import IndeterminatePointError, PoleError
from core.moebius import INF, is_infinite
from core.multipoly import MultiPoly

logger = logging.getLogger(__name__)

POLE_TOL = 1e-14
LEAF_LEVELS = {"f0": 0, "f1": 1, "ft": INF}


def _near_zero(value, scale: float = 1.0) -> bool:
    if value == 0:
        return True
    return abs(complex(value)) <= POLE_TOL * max(1.0, scale)


# ────────────────────────────── leaf polynomials ──────────────────────────────
def f0(x, z):
    return -z * z + 2 * z - x


def f1(x, z):
    return -z * z + x


def ft(x, z):
    return z * z - 2 * x * z + x


def omega_coefficients(x, z) -> tuple:
    """(dx-coefficient, dz-coefficient) of Ω at (x, z)."""
    return -z * z - 2 * (x - 1) * z + x, 4 * x * (x - 1)


# ────────────────────────────── slope & first integral ────────────────────────
def slope_z0(x, z):
    if _near_zero(x) or _near_zero(x - 1):
        raise PoleError(f"Riccati slope has a pole over x = {x}")
    return (z * z + 2 * (x - 1) * z - x) / (4 * x * (x - 1))


def first_integral(x, z):
    """F(x, z) ∈ P¹; INF on f_t = 0."""
    if is_infinite(z):
        return x
    num = x * f0(x, z) ** 2
    den = ft(x, z) ** 2
    ax, az = abs(complex(x)), abs(complex(z))
    den_scale = (az * az + 2 * ax * az + ax) ** 2
    num_scale = max(1.0, ax) * (az * az + 2 * az + ax) ** 2
    if _near_zero(den, den_scale):
        if _near_zero(num, num_scale):
            raise IndeterminatePointError(f"F is indeterminate at ({x}, {z})")
        return INF
    return num / den


def first_integral_derivative(x, z, direction, h: float = 1e-5):
    """Central-difference derivative of F along (1, direction), Richardson (h, h/2)."""
    x, z, m = complex(x), complex(z), complex(direction)
    if h <= 1e-300:
        raise ValueError("finite-difference step underflow")

    def central(step):
        return (first_integral(x + step, z + step * m) - first_integral(x - step, z - step * m)) / (2 * step)

    coarse, fine = central(h), central(h / 2)
    return (4 * fine - coarse) / 3


def first_integral_gradient(x, z, h: float = 1e-5) -> tuple[complex, complex]:
    x, z = complex(x), complex(z)
    fx = (4 * (first_integral(x + h / 2, z) - first_integral(x - h / 2, z)) / h
          - (first_integral(x + h, z) - first_integral(x - h, z)) / (2 * h)) / 3
    fz = (4 * (first_integral(x, z + h / 2) - first_integral(x, z - h / 2)) / h
          - (first_integral(x, z + h) - first_integral(x, z - h)) / (2 * h)) / 3
    return fx, fz


def first_integral_invariance_residual(x, z, h: float = 1e-5, direction_shift: complex = 0):
    """Derivative of F along the leaf direction (1, Z₀ + shift)."""
    return first_integral_derivative(x, z, slope_z0(x, z) + direction_shift, h)


def relative_invariance_residual(x, z, h: float = 1e-5, direction_shift: complex = 0) -> float:
    """|dF·v| / (|∇F|·|v|) for v = (1, Z₀ + shift), with ∇F from the same differences."""
    direction = slope_z0(x, z) + direction_shift
    residual = abs(first_integral_derivative(x, z, direction, h))
    fx, fz = first_integral_gradient(x, z, h)
    scale = float(np.hypot(abs(fx), abs(fz)) * np.hypot(1.0, abs(direction)))
    return residual / scale if scale > 0 else residual


# ────────────────────────────── singular points ───────────────────────────────
@dataclass
class SingularityRecord:
    location: tuple[complex, complex]
    chart: str
    linear_part: np.ndarray
    eigenvalues: tuple[complex, complex]
    ratio: complex
    ramified_ratio: complex
    tag: str
    ramified_tag: str
    notes: list[str] = field(default_factory=list)


def _chart_forms() -> dict[str, tuple[MultiPoly, MultiPoly]]:
    """
    Ω in the four standard charts, as (coefficient of d base, coefficient of d fiber).

    The base coordinate is written x (x or u = 1/x) and the fiber coordinate
    z (z or w = 1/z) in every chart.
    """
    p, q = MultiPoly.var("x"), MultiPoly.var("z")
    return {
        "xz": (-q ** 2 - 2 * (p - 1) * q + p, 4 * p * (p - 1)),
        "xw": (-1 - 2 * (p - 1) * q + p * q ** 2, -4 * p * (p - 1)),
        "uz": (p * q ** 2 + 2 * q - 2 * p * q - 1, 4 * p * (1 - p)),
        "uw": (p + 2 * q - 2 * p * q - q ** 2, -4 * p * (1 - p)),
    }


def _classify(ratio: complex) -> str:
    if abs(ratio - 1) < 1e-9:
        return "radial"
    if abs(ratio.imag) < 1e-9:
        if ratio.real > 0:
            return "dicritical_node" if abs(ratio - 2) < 1e-9 or abs(ratio - 0.5) < 1e-9 else "node"
        return "saddle"
    return "focus"


def _record(chart: str, forms, base: complex, fiber: complex) -> SingularityRecord:
    a, b = forms
    point = {"x": base, "z": fiber}
    jac = np.array(
        [
            [complex(b.derivative("x").evaluate(point)), complex(b.derivative("z").evaluate(point))],
            [-complex(a.derivative("x").evaluate(point)), -complex(a.derivative("z").evaluate(point))],
        ]
    )
    eig = np.linalg.eigvals(jac)
    eig = tuple(sorted(eig, key=lambda v: (-abs(v), v.real, v.imag)))
    lam_base, lam_fiber = jac[0, 0], jac[1, 1]
    ratio = complex(lam_base / lam_fiber)
    ramified = complex((lam_base / 2) / lam_fiber)
    x_loc = base if chart[0] == "x" else (INF if base == 0 else 1 / base)
    z_loc = fiber if chart[1] == "z" else (INF if fiber == 0 else 1 / fiber)
    return SingularityRecord(
        location=(x_loc, z_loc),
        chart=chart,
        linear_part=jac,
        eigenvalues=eig,
        ratio=ratio,
        ramified_ratio=ramified,
        tag=_classify(ratio),
        ramified_tag=_classify(ramified),
    )


def analyze_singularities() -> list[SingularityRecord]:
    """All common zeros of Ω's coefficients over x ∈ {0, 1, ∞}."""
    forms = _chart_forms()
    records: list[SingularityRecord] = []
    fibers = (("xz", "xw", 0), ("xz", "xw", 1), ("uz", "uw", 0))
    for finite_chart, infinite_chart, base in fibers:
        a, b = forms[finite_chart]
        if not b.evaluate({"x": base, "z": 0}) == 0:
            continue
        coeffs = [complex(c) for c in a.substitute("x", base).univariate_coefficients("z")]
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
        roots = np.roots(coeffs) if len(coeffs) > 1 else []
        for root in sorted(roots, key=lambda r: (r.real, r.imag)):
            root = complex(round(root.real, 12), round(root.imag, 12))
            records.append(_record(finite_chart, forms[finite_chart], base, root))
        a_inf, _ = forms[infinite_chart]
        if a_inf.evaluate({"x": base, "z": 0}) == 0:
            records.append(_record(infinite_chart, forms[infinite_chart], base, 0))
    logger.debug("found %d singular points", len(records))
    return records


# ────────────────────────────── pullback ψ ────────────────────────────────────
@dataclass(frozen=True)
class PsiFrame:
    x: complex
    z0: complex
    z1: complex
    z2: complex
    third: complex
    mu: complex


def double_x(X, t):
    """pr₁ M₂ as a function of X alone: (X² − t)² / (4X(X−1)(X−t))."""
    d = 4 * X * (X - 1) * (X - t)
    if _near_zero(d):
        raise PoleError(f"multiplication by 2 has a pole over X = {X}")
    return (X * X - t) ** 2 / d


def double_x_derivative(X, t):
    n, dn = (X * X - t) ** 2, 4 * X * (X * X - t)
    d = 4 * (X ** 3 - (1 + t) * X ** 2 + t * X)
    dd = 4 * (3 * X ** 2 - 2 * (1 + t) * X + t)
    if _near_zero(d):
        raise PoleError(f"multiplication by 2 has a pole over X = {X}")
    return (dn * d - n * dd) / (d * d)


def psi_frame(X, Y, t, third: str = "z2") -> PsiFrame:
    """Leaf graphs z₀, z₁, z₂ over (X, Y) and the normalizing factor μ."""
    if _near_zero(Y) or _near_zero(X - t):
        raise PoleError(f"psi is undefined at X = {X}, Y = {Y}")
    curve = EllipticCurve(t)
    x = curve.x_double_formula(X, Y)
    z0 = (t - X * X) / (2 * (t - X))
    z1 = (t - X * X) / (2 * Y)
    z2 = -z1
    z3 = z2 if third == "z2" else x / z0
    if _near_zero(z3 - z1) or _near_zero(z3 - z0):
        raise PoleError("degenerate normalization: z3 coincides with z0 or z1")
    mu = (z3 - z0) / (z3 - z1)
    return PsiFrame(x=x, z0=z0, z1=z1, z2=z2, third=z3, mu=mu)


def psi_map(X, Y, Z, t, third: str = "z2") -> tuple[complex, complex]:
    frame = psi_frame(X, Y, t, third)
    if is_infinite(Z):
        return frame.x, frame.z1
    denom = Z * frame.mu - 1
    if _near_zero(denom):
        return frame.x, INF
    return frame.x, (Z * frame.mu * frame.z1 - frame.z0) / denom


def psi_fiber_derivative(frame: PsiFrame, Z):
    """∂z/∂Z of the fiber coordinate of ψ."""
    return frame.mu * (frame.z0 - frame.z1) / (Z * frame.mu - 1) ** 2


def pulled_back_integral(Z):
    if _near_zero(Z) or _near_zero(Z - 2):
        raise PoleError(f"pulled-back integral has a pole at Z = {Z}")
    return (Z * Z - 2 * Z + 2) ** 2 / (Z * Z * (Z - 2) ** 2)


def double_star_coefficients(t) -> tuple:
    """N(Z) coefficients, highest degree first."""
    return (t - 1, -4 * t + 4, 4 * t - 8, 8, -4)


def double_star_numerator_value(Z, t):
    return sum(c * Z ** (4 - k) for k, c in enumerate(double_star_coefficients(t)))


def ode_double_star_residual(X, Z, dZdX, t):
    d = 4 * X * (X - 1) * (X - t)
    if _near_zero(d):
        raise PoleError(f"(**) has a pole over X = {X}")
    return dZdX ** 2 + double_star_numerator_value(Z, t) / d


def continue_root(value, reference) -> complex:
    """Square root of `value` on the sheet nearest to `reference`."""
    root = complex(np.sqrt(complex(value)))
    return root if abs(root - reference) <= abs(root + reference) else -root


def leaf_graph_residual(X, Y, which: str, t, h: float = 1e-5) -> float:
    """Relative defect of dz_i/dX − Z₀(x, z_i)·x′(X) for z_i ∈ {z0, z1, z2}."""
    X, Y = complex(X), complex(Y)
    curve = EllipticCurve(t)
    dY = curve.cubic_derivative(X) / (2 * Y)

    def graph(step):
        Xs = X + step
        Ys = continue_root(curve.cubic(Xs), Y + step * dY)
        return getattr(psi_frame(Xs, Ys, t), which)

    derivative = (graph(h) - graph(-h)) / (2 * h)
    frame = psi_frame(X, Y, t)
    expected = slope_z0(frame.x, getattr(frame, which)) * double_x_derivative(X, t)
    return abs(derivative - expected) / max(1.0, abs(expected))


__all__ = [
    "LEAF_LEVELS",
    "f0",
    "f1",
    "ft",
    "omega_coefficients",
    "slope_z0",
    "first_integral",
    "first_integral_derivative",
    "first_integral_gradient",
    "first_integral_invariance_residual",
    "relative_invariance_residual",
    "SingularityRecord",
    "analyze_singularities",
    "PsiFrame",
    "double_x",
    "double_x_derivative",
    "psi_frame",
    "psi_map",
    "psi_fiber_derivative",
    "pulled_back_integral",
    "double_star_coefficients",
    "double_star_numerator_value",
    "ode_double_star_residual",
    "continue_root",
    "leaf_graph_residual",
]
