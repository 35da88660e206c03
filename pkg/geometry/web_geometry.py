"""
web_geometry.py – the 4-web (fibration, Riccati, two section branches)
----------------------------------------------------------------------
• WebPoint: the ordered slope quadruple (∞, Z₀, Z₁, Z₂) at (x, y, z).
• Harmonic test Z₁ + Z₂ = 2Z₀ and the cross-ratio (∞, Z₀, Z₁, Z₂) = −1.
• Blaschke curvature of planar 3-webs by nested central differences with a
  Richardson pair (h, h/2); subwebs containing the fibration are evaluated
  in a linear chart where all three slopes are finite.
• Hexagon closure defects and their scaling order.
• parallelizability_report() aggregates everything over a seeded sample.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations
from math import log2
from typing import Callable, Sequence

import numpy as np

from core.elliptic_curve import CurvePoint, EllipticCurve
from core.exceptions import DegenerateWebError, PoleError, VerifierError
from core.moebius import INF, cross_ratio, is_infinite
from core.sampling import parallel_map
from geometry.integrators import RKF45
from geometry.minimal_sections import SectionWeb
from geometry.riccati_foliation import (
    continue_root,
    double_x_derivative,
    psi_fiber_derivative,
    psi_frame,
    psi_map,
    slope_z0,
)

logger = logging.getLogger(__name__)

SlopeField = Callable[[complex, complex], complex]

FOLIATIONS = ("fibration", "riccati", "web1", "web2")
SUBWEBS: tuple[tuple[str, str, str], ...] = tuple(combinations(FOLIATIONS, 3))

CURVATURE_STEP = 1e-2
ZERO_FACTOR, ZERO_FLOOR = 10.0, 1e-7
CLOSURE_STEPS = (1e-2, 5e-3, 2.5e-3)
CLOSURE_FLOOR = 1e-10
HEXAGONAL_ORDER = 3.5
EXCLUSION_TUBE = 1e-2


# ────────────────────────────── web points ─────────────────────────────────
@dataclass(frozen=True)
class WebPoint:
    x: complex
    y: complex
    z: complex
    slopes: tuple[complex, complex, complex, complex]
    on_delta: bool = False

    @property
    def riccati(self) -> complex:
        return self.slopes[1]

    @property
    def branches(self) -> tuple[complex, complex]:
        return self.slopes[2], self.slopes[3]


def assemble_web_point(web: SectionWeb, u, v, z) -> WebPoint:
    """Slope quadruple (∞, Z₀, Z₁, Z₂) at the point (u, v, z)."""
    solved = web.sections_through(u, v, z)
    p = CurvePoint(u, v)
    z1, z2 = (web.section_slope(s, p) for s in solved.sections)
    z0 = slope_z0(u, z)
    return WebPoint(x=u, y=v, z=z, slopes=(INF, z0, z1, z2), on_delta=solved.tangent)


def harmonic_residual(point: WebPoint) -> float:
    """|Z₁ + Z₂ − 2Z₀| relative to max(1, |Z₀|)."""
    z0 = complex(point.riccati)
    z1, z2 = (complex(s) for s in point.branches)
    return abs(z1 + z2 - 2 * z0) / max(1.0, abs(z0))


def cross_ratio_at(point: WebPoint, order: Sequence[int] = (0, 1, 2, 3)) -> complex:
    """cross_ratio of the slopes taken in `order`; (0, 1, 2, 3) is (∞, Z₀, Z₁, Z₂)."""
    slopes = [point.slopes[i] if i == 0 else complex(point.slopes[i]) for i in order]
    return cross_ratio(*slopes)


def cross_ratio_orbit(point: WebPoint) -> dict[tuple[int, ...], complex]:
    """Cross-ratio for all 24 orderings of the quadruple."""
    return {order: cross_ratio_at(point, order) for order in permutations(range(4))}


# ────────────────────────────── slope fields ───────────────────────────────
def vertical_field(x, z):
    return INF


class WebBranch:
    """Z₀ ± √(Z₀² − P) on the sheet continued from a reference root."""

    def __init__(self, web: SectionWeb, reference: complex):
        self.web = web
        self.reference = complex(reference)

    def __call__(self, x, z) -> complex:
        z0 = slope_z0(x, z)
        return z0 + continue_root(z0 * z0 - self.web.web_constant(x, z), self.reference)


def web_fields(web: SectionWeb, x, z) -> dict[str, SlopeField]:
    """The four foliations as slope fields near (x, z)."""
    z0 = slope_z0(x, z)
    root = complex(np.sqrt(complex(z0 * z0 - web.web_constant(x, z))))
    return {
        "fibration": vertical_field,
        "riccati": slope_z0,
        "web1": WebBranch(web, root),
        "web2": WebBranch(web, -root),
    }


def control_fields() -> tuple[SlopeField, SlopeField, SlopeField]:
    """Non-hexagonal 3-web {0, 1, x + z}; K = 2/(1−s)² − 2/s² with s = x + z."""
    return (lambda x, z: 0j, lambda x, z: 1 + 0j, lambda x, z: complex(x + z))


def parallel_fields() -> tuple[SlopeField, SlopeField, SlopeField]:
    return (lambda x, z: 0j, lambda x, z: 1 + 0j, vertical_field)


def control_curvature(x, z) -> complex:
    s = complex(x + z)
    return 2 / (1 - s) ** 2 - 2 / s ** 2


# ────────────────────────────── linear charts ──────────────────────────────
@dataclass(frozen=True)
class LinearChart:
    """(X, Z) = L·(x, z); slopes p ↦ (L10 + L11 p)/(L00 + L01 p)."""

    name: str
    matrix: tuple[tuple[complex, complex], tuple[complex, complex]]

    @property
    def det(self) -> complex:
        (a, b), (c, d) = self.matrix
        return a * d - b * c

    def to_chart(self, x, z) -> tuple[complex, complex]:
        (a, b), (c, d) = self.matrix
        return a * x + b * z, c * x + d * z

    def from_chart(self, X, Z) -> tuple[complex, complex]:
        (a, b), (c, d) = self.matrix
        det = self.det
        return (d * X - b * Z) / det, (-c * X + a * Z) / det

    def slope(self, p) -> complex:
        (a, b), (c, d) = self.matrix
        if is_infinite(p):
            return INF if b == 0 else d / b
        p = complex(p)
        den = a + b * p
        if den == 0:
            return INF
        return (c + d * p) / den

    def pull(self, f: SlopeField) -> SlopeField:
        def charted(X, Z):
            return self.slope(f(*self.from_chart(X, Z)))

        return charted


IDENTITY_CHART = LinearChart("xz", ((1, 0), (0, 1)))
SWAP_CHART = LinearChart("zx", ((0, 1), (1, 0)))
CHARTS = (
    IDENTITY_CHART,
    SWAP_CHART,
    LinearChart("shear+0.5", ((1, 0.5), (0, 1))),
    LinearChart("shear-0.5", ((1, -0.5), (0, 1))),
    LinearChart("shear+0.5i", ((1, 0.5j), (0, 1))),
    LinearChart("shear+2", ((1, 2), (0, 1))),
)


def choose_chart(fields: Sequence[SlopeField], x, z, charts: Sequence[LinearChart] = CHARTS) -> LinearChart:
    """Best-conditioned chart in which all three slopes at (x, z) are finite."""
    values = [f(x, z) for f in fields]
    best: tuple[float, LinearChart] | None = None
    for chart in charts:
        slopes = [chart.slope(p) for p in values]
        if any(is_infinite(s) for s in slopes):
            continue
        gap = min(abs(a - b) for a, b in combinations(slopes, 2))
        if gap == 0:
            continue
        score = max(1.0, max(abs(s) for s in slopes)) / gap
        if best is None or score < best[0] * (1 - 1e-9):
            best = (score, chart)
    if best is None:
        raise DegenerateWebError(f"no chart separates the slopes {values}")
    return best[1]


# ────────────────────────────── Blaschke curvature ─────────────────────────
@dataclass
class CurvatureEstimate:
    value: complex
    error: float
    h: float
    subweb: tuple[str, ...] = ()
    chart: str = "xz"
    coarse: complex = 0j
    fine: complex = 0j

    def is_zero(self, factor: float = ZERO_FACTOR, floor: float = ZERO_FLOOR) -> bool:
        return abs(self.value) <= factor * self.error + floor


def _normalized_forms(fields, X, Z):
    """(a_i, b_i) of ω_i = (dZ − p_i dX)/∏_{j≠i}(p_i − p_j) for i = 0, 1."""
    p = [complex(f(X, Z)) for f in fields]
    scale = max(1.0, *(abs(v) for v in p))
    if min(abs(a - b) for a, b in combinations(p, 2)) <= 1e-8 * scale:
        raise DegenerateWebError(f"slopes {p} nearly coincide at ({X}, {Z})")
    forms = []
    for i in range(2):
        denom = np.prod([p[i] - p[j] for j in range(3) if j != i])
        forms.append((-p[i] / denom, 1 / denom))
    return forms


def _connection_form(fields, X, Z, h):
    """(g₁, g₂) of γ = g₁dX + g₂dZ with dω_i = γ ∧ ω_i."""
    here = _normalized_forms(fields, X, Z)
    xp, xm = _normalized_forms(fields, X + h, Z), _normalized_forms(fields, X - h, Z)
    zp, zm = _normalized_forms(fields, X, Z + h), _normalized_forms(fields, X, Z - h)
    rhs = np.array([(xp[i][1] - xm[i][1] - zp[i][0] + zm[i][0]) / (2 * h) for i in range(2)])
    lhs = np.array([[here[i][1], -here[i][0]] for i in range(2)])
    if np.linalg.cond(lhs) > 1e12:
        raise DegenerateWebError(f"connection system is ill-conditioned at ({X}, {Z})")
    return np.linalg.solve(lhs, rhs)


def _curvature_at_step(fields, X, Z, h) -> complex:
    gxp, gxm = _connection_form(fields, X + h, Z, h), _connection_form(fields, X - h, Z, h)
    gzp, gzm = _connection_form(fields, X, Z + h, h), _connection_form(fields, X, Z - h, h)
    return complex((gxp[1] - gxm[1]) / (2 * h) - (gzp[0] - gzm[0]) / (2 * h))


def blaschke_curvature(
    fields: Sequence[SlopeField],
    x,
    z,
    h: float = CURVATURE_STEP,
    chart: LinearChart | None = None,
    subweb: tuple[str, ...] = (),
) -> CurvatureEstimate:
    """K with dγ = K dx∧dz, Richardson-extrapolated from steps h and h/2."""
    if len(fields) != 3:
        raise ValueError("blaschke_curvature takes exactly three slope fields")
    chart = chart or choose_chart(fields, x, z)
    charted = [chart.pull(f) for f in fields]
    X, Z = chart.to_chart(complex(x), complex(z))
    coarse = _curvature_at_step(charted, X, Z, h)
    fine = _curvature_at_step(charted, X, Z, h / 2)
    # dX∧dZ = det(L) dx∧dz
    det = complex(chart.det)
    value = (4 * fine - coarse) / 3 * det
    error = abs(coarse - fine) * abs(det)
    return CurvatureEstimate(value=value, error=error, h=h, subweb=subweb, chart=chart.name,
                             coarse=coarse * det, fine=fine * det)


# ────────────────────────────── hexagon closure ────────────────────────────
@dataclass
class HexagonClosure:
    defect: float
    defect_half: float
    order: float
    h: float
    chart: str = "xz"


class _LeafWalker:
    """Leaf following and leaf intersections in a chart where all slopes are finite."""

    def __init__(self, fields: Sequence[SlopeField], integrator: RKF45):
        self.fields = fields
        self.integrator = integrator

    def follow(self, i: int, X0: complex, Z0: complex, X1: complex) -> complex:
        if X1 == X0:
            return Z0
        dX = X1 - X0
        f = self.fields[i]
        result = self.integrator.solve(lambda s, Z: f(X0 + s * dX, Z) * dX, 0.0, 1.0, Z0, h0=1.0)
        return result.y

    def meet(self, i: int, P: tuple[complex, complex], j: int, O: tuple[complex, complex]) -> tuple[complex, complex]:
        """Point where the i-leaf through P crosses the j-leaf through O."""
        a, b = self.fields[i](*P), self.fields[j](*O)
        X = (O[1] - P[1] + a * P[0] - b * O[0]) / (a - b)
        step = 0j
        for _ in range(12):
            zi, zj = self.follow(i, *P, X), self.follow(j, *O, X)
            slope_gap = self.fields[i](X, zi) - self.fields[j](X, zj)
            if slope_gap == 0:
                break
            step = (zi - zj) / slope_gap
            X -= step
            if abs(step) <= 1e-14 * max(1.0, abs(X)):
                break
        if abs(step) > 1e-9 * max(1.0, abs(X)):
            raise DegenerateWebError(f"leaf intersection did not converge near X = {X}")
        return X, self.follow(i, *P, X)


def _closure_defect(walker: _LeafWalker, O: tuple[complex, complex], h: float) -> float:
    start = (O[0] + h, walker.follow(0, *O, O[0] + h))
    point = start
    # move along foliation a until the leaf of foliation b through O
    for a, b in ((1, 2), (0, 1), (2, 0), (1, 2), (0, 1), (2, 0)):
        point = walker.meet(a, point, b, O)
    return float(np.hypot(abs(point[0] - start[0]), abs(point[1] - start[1])))


def _order(coarse: float, fine: float, floor: float = CLOSURE_FLOOR) -> float:
    if fine <= floor:
        return float("inf")
    return log2(coarse / fine) if coarse > 0 else float("-inf")


def hexagon_closure_defect(
    fields: Sequence[SlopeField],
    x,
    z,
    h: float,
    chart: LinearChart | None = None,
    integrator: RKF45 | None = None,
) -> HexagonClosure:
    """Closure distance of the Blaschke hexagon at step h and log₂ d(h)/d(h/2)."""
    chart = chart or choose_chart(fields, x, z)
    walker = _LeafWalker([chart.pull(f) for f in fields], integrator or RKF45(rtol=1e-12, atol=1e-15))
    O = chart.to_chart(complex(x), complex(z))
    coarse, fine = _closure_defect(walker, O, h), _closure_defect(walker, O, h / 2)
    return HexagonClosure(defect=coarse, defect_half=fine, order=_order(coarse, fine), h=h, chart=chart.name)


def fitted_closure_order(
    fields: Sequence[SlopeField],
    x,
    z,
    steps: Sequence[float] = CLOSURE_STEPS,
    chart: LinearChart | None = None,
) -> tuple[tuple[float, ...], float]:
    """Defects at each step and the least-squares slope of log d against log h."""
    chart = chart or choose_chart(fields, x, z)
    walker = _LeafWalker([chart.pull(f) for f in fields], RKF45(rtol=1e-12, atol=1e-15))
    O = chart.to_chart(complex(x), complex(z))
    defects = tuple(_closure_defect(walker, O, h) for h in steps)
    above = [(h, d) for h, d in zip(steps, defects) if d > CLOSURE_FLOOR]
    if len(above) < 2:
        return defects, float("inf")
    slope, _ = np.polyfit(np.log([h for h, _ in above]), np.log([d for _, d in above]), 1)
    return defects, float(slope)


# ────────────────────────────── pullback by ψ ──────────────────────────────
def pulled_back_slopes(X, Y, Z, web: SectionWeb, third: str = "z2") -> tuple[complex, complex]:
    """dZ/dX of the two section branches after pulling back by ψ."""
    curve = web.curve
    t = curve.t
    frame = psi_frame(X, Y, t, third)
    x, z = psi_map(X, Y, Z, t, third)
    if is_infinite(z):
        raise PoleError(f"psi sends Z = {Z} to z = ∞")
    doubled = curve.double(CurvePoint(X, Y))
    m1, m2 = web.web_slopes(doubled.x, doubled.y, z)
    z0 = slope_z0(x, z)
    scale = double_x_derivative(X, t) / psi_fiber_derivative(frame, Z)
    return (m1 - z0) * scale, (m2 - z0) * scale


# ────────────────────────────── sampling ───────────────────────────────────
def sample_web_points(
    web: SectionWeb,
    rng: np.random.Generator,
    count: int,
    region: tuple[float, float, float, float],
    tube: float = EXCLUSION_TUBE,
) -> tuple[list[WebPoint], Counter]:
    """
    `count` web points off the singular fibers, off Δ and off slope collisions.

    Real parts range over the region bounds. Imaginary parts range over an
    interval of the same width centred on the real axis, so each coordinate is
    drawn from a square. Only the tubes exclude points.
    """
    xmin, xmax, zmin, zmax = region
    half_x, half_z = (xmax - xmin) / 2, (zmax - zmin) / 2
    t = complex(web.curve.t)
    points: list[WebPoint] = []
    excluded: Counter = Counter()
    attempts = 0
    while len(points) < count:
        attempts += 1
        if attempts > 50 * count + 100:
            raise RuntimeError(f"region {region} yields too few admissible points")
        u = complex(rng.uniform(xmin, xmax), rng.uniform(-half_x, half_x))
        z = complex(rng.uniform(zmin, zmax), rng.uniform(-half_z, half_z))
        if min(abs(u), abs(u - 1), abs(u - t)) < tube:
            excluded["singular_fiber"] += 1
            continue
        v = web.curve.sample_point(u).y
        try:
            point = assemble_web_point(web, u, v, z)
        except (VerifierError, ZeroDivisionError):
            excluded["pole"] += 1
            continue
        if is_infinite(point.slopes[2]) or is_infinite(point.slopes[3]):
            excluded["pole"] += 1
            continue
        z0 = complex(point.riccati)
        z1, z2 = (complex(s) for s in point.branches)
        if point.on_delta or abs(z1 - z2) < tube * max(1.0, abs(z0)):
            excluded["discriminant"] += 1
            continue
        points.append(point)
    return points, excluded


# ────────────────────────────── certificate ────────────────────────────────
@dataclass
class PointCertificate:
    x: complex
    z: complex
    harmonic: float = 0.0
    cross_ratio: complex = -1 + 0j
    curvatures: dict[str, CurvatureEstimate] = field(default_factory=dict)
    orders: dict[str, float] = field(default_factory=dict)
    defects: dict[str, tuple[float, ...]] = field(default_factory=dict)
    error: str | None = None


def subweb_name(subweb: Sequence[str]) -> str:
    return "+".join(subweb)


def certify_point(task: tuple) -> PointCertificate:
    """All subweb curvatures and closure orders at one point (picklable task)."""
    t, u, v, z, h, steps, closure = task
    web = SectionWeb(EllipticCurve(t))
    cert = PointCertificate(x=u, z=z)
    try:
        point = assemble_web_point(web, u, v, z)
        cert.harmonic = harmonic_residual(point)
        cert.cross_ratio = cross_ratio_at(point)
        fields = web_fields(web, u, z)
        for subweb in SUBWEBS:
            trio = [fields[name] for name in subweb]
            name = subweb_name(subweb)
            cert.curvatures[name] = blaschke_curvature(trio, u, z, h, subweb=subweb)
            if closure:
                cert.defects[name], cert.orders[name] = fitted_closure_order(trio, u, z, steps)
    except VerifierError as exc:
        cert.error = f"{type(exc).__name__}: {exc}"
    return cert


def certify_control(task: tuple) -> PointCertificate:
    u, z, h, steps = task
    cert = PointCertificate(x=u, z=z)
    fields = control_fields()
    try:
        cert.curvatures["control"] = blaschke_curvature(fields, u, z, h, subweb=("control",))
        cert.defects["control"], cert.orders["control"] = fitted_closure_order(fields, u, z, steps)
    except VerifierError as exc:
        cert.error = f"{type(exc).__name__}: {exc}"
    return cert


@dataclass
class ParallelizabilityReport:
    points: list[PointCertificate]
    excluded: dict[str, int]
    control: list[PointCertificate]
    control_injected: bool = False
    harmonic_tol: float = 1e-10
    cross_ratio_tol: float = 1e-9

    # ────────────── aggregates (order independent) ──────────────
    @property
    def max_harmonic(self) -> float:
        return max((c.harmonic for c in self.points if c.error is None), default=0.0)

    @property
    def max_cross_ratio_deviation(self) -> float:
        return max((abs(c.cross_ratio + 1) for c in self.points if c.error is None), default=0.0)

    def max_curvature(self, name: str) -> float:
        return max((abs(c.curvatures[name].value) for c in self.points if name in c.curvatures), default=0.0)

    def min_order(self, name: str) -> float:
        return min((c.orders[name] for c in self.points if name in c.orders), default=float("inf"))

    @property
    def errors(self) -> list[str]:
        return sorted(c.error for c in self.points if c.error)

    @property
    def curvature_pass(self) -> bool:
        return not self.errors and all(est.is_zero() for c in self.points for est in c.curvatures.values())

    @property
    def closure_pass(self) -> bool:
        return not self.errors and all(o >= HEXAGONAL_ORDER for c in self.points for o in c.orders.values())

    @property
    def control_detected(self) -> bool:
        """True when the control web is (correctly) found non-hexagonal everywhere."""
        if not self.control:
            return False
        return all(
            c.error is None and not c.curvatures["control"].is_zero() and c.orders["control"] < HEXAGONAL_ORDER
            for c in self.control
        )

    @property
    def harmonic_pass(self) -> bool:
        return self.max_harmonic < self.harmonic_tol and self.max_cross_ratio_deviation < self.cross_ratio_tol

    @property
    def verdict(self) -> bool:
        passed = self.harmonic_pass and self.curvature_pass and self.closure_pass
        if self.control_injected:
            # the control web is then held to the same standard as the subwebs
            passed = passed and not self.control_detected
        return passed


def parallelizability_report(
    web: SectionWeb,
    rng: np.random.Generator,
    count: int,
    region: tuple[float, float, float, float],
    h: float = CURVATURE_STEP,
    steps: Sequence[float] = CLOSURE_STEPS,
    control_web: bool = False,
    control_points: int = 5,
    closure: bool = True,
    workers: int = 1,
    tube: float = 0.1,
) -> ParallelizabilityReport:
    """Harmonic, curvature and closure checks for all four 3-subwebs over a seeded sample."""
    points, excluded = sample_web_points(web, rng, count, region, tube=tube)
    t = web.curve.t
    tasks = [(t, p.x, p.y, p.z, h, tuple(steps), closure) for p in points]
    certificates = parallel_map(certify_point, tasks, workers)
    control_tasks = [(p.x, p.z, h, tuple(steps)) for p in points[:control_points]]
    controls = parallel_map(certify_control, control_tasks, workers)
    report = ParallelizabilityReport(
        points=certificates,
        excluded=dict(sorted(excluded.items())),
        control=controls,
        control_injected=control_web,
    )
    logger.info(
        "parallelizability: %d points, %d excluded, verdict=%s",
        len(points),
        sum(excluded.values()),
        report.verdict,
    )
    return report


__all__ = [
    "FOLIATIONS",
    "SUBWEBS",
    "CLOSURE_STEPS",
    "HEXAGONAL_ORDER",
    "WebPoint",
    "assemble_web_point",
    "harmonic_residual",
    "cross_ratio_at",
    "cross_ratio_orbit",
    "vertical_field",
    "WebBranch",
    "web_fields",
    "control_fields",
    "parallel_fields",
    "control_curvature",
    "LinearChart",
    "IDENTITY_CHART",
    "SWAP_CHART",
    "CHARTS",
    "choose_chart",
    "CurvatureEstimate",
    "blaschke_curvature",
    "HexagonClosure",
    "hexagon_closure_defect",
    "fitted_closure_order",
    "pulled_back_slopes",
    "sample_web_points",
    "PointCertificate",
    "subweb_name",
    "certify_point",
    "certify_control",
    "ParallelizabilityReport",
    "parallelizability_report",
]
