"""
leaf_transport.py – analytic continuation along paths in the x-plane
--------------------------------------------------------------------
• PathSpec: a base point and a chain of line / arc segments; lassos around
  branch points, concatenation, winding numbers and a text notation
  ("3+2i; 0.25; arc(0, 360); 3+2i", "lasso(0, 0.25)").
• continue_y follows √(x(x−1)(x−t)) along a path with a predictor step and
  nearest-root selection.
• integrate_leaf transports a fiber value along the Riccati leaf, switching
  between the charts z and w = 1/z, and records the drift of F.
• loop_monodromy fits a Moebius map through three tracer transports, checks
  it on a fourth tracer and classifies it against Φ̃ᵢ(x*).
"""
from __future__ import annotations

import cmath
import logging
import math
import re
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from core.exact_field import format_scalar, parse_scalar
from core.exceptions import ClearanceError, ConfigError, FitResidualError, OpenLoopError, VerifierError
from core.moebius import (
    IDENTITY,
    OTHER,
    PHI_0,
    PHI_1,
    PHI_T,
    MoebiusMap,
    chordal_distance,
    classify_moebius,
    dedupe_points,
    fiber_monodromy_maps,
    is_infinite,
)
from geometry.integrators import RKF45
from geometry.riccati_foliation import continue_root, f0, f1, first_integral, ft, slope_z0

logger = logging.getLogger(__name__)

TRACERS = (2 + 0j, 3 + 1j, -1 + 0j)
VALIDATION_TRACER = 0.5 - 2j
DEFAULT_LASSO_RADIUS = 0.25
FIT_TOL = 1e-7
CLASSIFY_TOL = 1e-6
TRANSPORT_TOL = 1e-10
# z -> w = 1/z only past |z| = 2 (and back past |w| = 2)
CHART_SWITCH = 2.0
ON_LEAF_TOL = 1e-12
SPECIAL_LEAVES = {"f0": f0, "f1": f1, "ft": ft}


# ────────────────────────────── segments ───────────────────────────────────
@dataclass(frozen=True)
class LineSegment:
    start: complex
    end: complex

    def point(self, s: float) -> complex:
        return self.start + s * (self.end - self.start)

    def derivative(self, s: float) -> complex:
        return self.end - self.start

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def winding(self, a: complex) -> float:
        return cmath.phase((self.end - a) / (self.start - a))

    def distance_to(self, a: complex) -> float:
        d = self.end - self.start
        if d == 0:
            return abs(a - self.start)
        s = min(1.0, max(0.0, ((a - self.start) * d.conjugate()).real / abs(d) ** 2))
        return abs(a - self.point(s))


@dataclass(frozen=True)
class ArcSegment:
    center: complex
    radius: float
    start_angle: float
    sweep: float

    def point(self, s: float) -> complex:
        return self.center + self.radius * cmath.exp(1j * (self.start_angle + s * self.sweep))

    def derivative(self, s: float) -> complex:
        return 1j * self.sweep * (self.point(s) - self.center)

    @property
    def start(self) -> complex:
        return self.point(0.0)

    @property
    def end(self) -> complex:
        return self.point(1.0)

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def winding(self, a: complex) -> float:
        pieces = max(4, math.ceil(abs(self.sweep) / (math.pi / 4)))
        nodes = [self.point(k / pieces) for k in range(pieces + 1)]
        return sum(cmath.phase((q - a) / (p - a)) for p, q in zip(nodes, nodes[1:]))

    def distance_to(self, a: complex) -> float:
        s = np.linspace(0.0, 1.0, 513)
        pts = self.center + self.radius * np.exp(1j * (self.start_angle + s * self.sweep))
        return float(np.min(np.abs(pts - a)))


Segment = Union[LineSegment, ArcSegment]


# ────────────────────────────── paths ──────────────────────────────────────
@dataclass(frozen=True)
class PathSpec:
    base: complex
    segments: tuple[Segment, ...] = ()
    base_y: complex | None = None

    @property
    def end(self) -> complex:
        return self.segments[-1].end if self.segments else self.base

    @property
    def length(self) -> float:
        return sum(seg.length for seg in self.segments)

    @property
    def is_closed(self) -> bool:
        return abs(self.end - self.base) <= 1e-12 * max(1.0, abs(self.base))

    def __add__(self, other: "PathSpec") -> "PathSpec":
        if abs(self.end - other.base) > 1e-12 * max(1.0, abs(self.end)):
            raise ValueError("paths do not join")
        return PathSpec(self.base, self.segments + other.segments, self.base_y)

    def winding_number(self, a) -> int:
        if not self.is_closed:
            raise OpenLoopError("winding numbers need a closed path")
        total = sum(seg.winding(complex(a)) for seg in self.segments)
        return int(round(total / (2 * math.pi)))

    def encircled(self, t) -> dict[str, int]:
        """Winding number about each finite branch point."""
        return {label: self.winding_number(b) for label, b in branch_points(t).items()}

    def closes_on_curve(self, t) -> bool:
        """The lift to y² = x(x−1)(x−t) closes iff the total winding is even."""
        return self.is_closed and sum(self.encircled(t).values()) % 2 == 0

    def clearance(self, t) -> float:
        points = branch_points(t).values()
        if not self.segments:
            return min(abs(self.base - b) for b in points)
        return min(seg.distance_to(b) for seg in self.segments for b in points)

    # ────────────── constructors ──────────────
    @classmethod
    def trivial(cls, base, base_y=None) -> "PathSpec":
        return cls(complex(base), (), base_y)

    @classmethod
    def polyline(cls, points: Sequence[complex], base_y=None) -> "PathSpec":
        pts = [complex(p) for p in points]
        return cls(pts[0], tuple(LineSegment(a, b) for a, b in zip(pts, pts[1:])), base_y)

    @classmethod
    def lasso(cls, base, center, radius: float = DEFAULT_LASSO_RADIUS, turns: int = 1, base_y=None) -> "PathSpec":
        """Out to the circle |x − center| = radius, once (or `turns` times) around, back."""
        base, center = complex(base), complex(center)
        angle = cmath.phase(base - center)
        entry = center + radius * cmath.exp(1j * angle)
        segments = (
            LineSegment(base, entry),
            ArcSegment(center, radius, angle, 2 * math.pi * turns),
            LineSegment(entry, base),
        )
        return cls(base, segments, base_y)

    @classmethod
    def lassos(cls, base, centers: Sequence[complex], radius: float = DEFAULT_LASSO_RADIUS, base_y=None) -> "PathSpec":
        path = cls.trivial(base, base_y)
        for c in centers:
            path = path + cls.lasso(base, c, radius)
        return path

    @classmethod
    def parse(cls, text: str, t=None, base_y=None) -> "PathSpec":
        """
        Parse "p0; p1; arc(c, degrees); lasso(label-or-point, radius); ...".

        The first token is the base point, waypoints add line segments, arcs turn
        about c from the current point and lassos loop about a point from the
        current point. Labels 0, 1, t refer to branch points (t needs `t`).
        """
        tokens = [tok.strip() for tok in text.split(";") if tok.strip()]
        if not tokens:
            raise ConfigError("empty path")
        try:
            current = _point(tokens[0], t)
            path = cls.trivial(current, base_y)
            for tok in tokens[1:]:
                arc = re.fullmatch(r"arc\((.+),(.+)\)", tok.replace(" ", ""))
                lasso = re.fullmatch(r"lasso\((.+?)(?:,(.+))?\)", tok.replace(" ", ""))
                if arc:
                    center = _point(arc.group(1), t)
                    sweep = math.radians(float(arc.group(2)))
                    seg: Segment = ArcSegment(center, abs(current - center), cmath.phase(current - center), sweep)
                    path = PathSpec(path.base, path.segments + (seg,), base_y)
                elif lasso:
                    radius = float(lasso.group(2)) if lasso.group(2) else DEFAULT_LASSO_RADIUS
                    path = path + cls.lasso(current, _point(lasso.group(1), t), radius)
                else:
                    nxt = _point(tok, t)
                    path = PathSpec(path.base, path.segments + (LineSegment(current, nxt),), base_y)
                current = path.end
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"invalid path notation {text!r}: {exc}") from exc
        return path

    def describe(self) -> str:
        parts = [format_scalar(self.base)]
        for seg in self.segments:
            if isinstance(seg, ArcSegment):
                parts.append(f"arc({format_scalar(seg.center)}, {math.degrees(seg.sweep):g})")
            else:
                parts.append(format_scalar(seg.end))
        return "; ".join(parts)


def _point(token: str, t) -> complex:
    if token == "t":
        if t is None:
            raise ValueError("label t needs the curve parameter")
        return complex(t)
    return complex(parse_scalar(token))


def branch_points(t) -> dict[str, complex]:
    return {"0": 0j, "1": 1 + 0j, "t": complex(t)}


def default_clearance(t) -> float:
    pts = list(branch_points(t).values())
    return 0.1 * min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:])


def default_base(t) -> complex:
    """Centroid of the branch points pushed up by 1 + max |b|."""
    pts = list(branch_points(t).values())
    centroid = sum(pts) / len(pts)
    return centroid + 1j * (1 + max(abs(b) for b in pts))


def _check_clearance(path: PathSpec, t, clearance: float | None) -> None:
    clearance = default_clearance(t) if clearance is None else clearance
    distance = path.clearance(t)
    if distance < clearance:
        raise ClearanceError(f"path passes within {distance:.3g} of a branch point (clearance {clearance:.3g})")


# ────────────────────────────── y continuation ─────────────────────────────
def continue_y(path: PathSpec, t, y0=None, clearance: float | None = None) -> complex:
    """End value of the branch of √(x(x−1)(x−t)) that starts at y0 (principal if omitted)."""
    _check_clearance(path, t, clearance)
    t = complex(t)

    def cubic(x):
        return x * (x - 1) * (x - t)

    if y0 is None:
        y0 = path.base_y
    y = complex(np.sqrt(cubic(path.base))) if y0 is None else complex(y0)
    radius = max(default_clearance(t), 1e-3) if clearance is None else max(clearance, 1e-3)
    for seg in path.segments:
        n = max(16, math.ceil(seg.length / (0.05 * radius)))
        for k in range(1, n + 1):
            s_prev, s = (k - 1) / n, k / n
            x_prev, x = seg.point(s_prev), seg.point(s)
            # tangent predictor dy = f′(x)/(2y) dx
            derivative = (3 * x_prev * x_prev - 2 * (1 + t) * x_prev + t) / (2 * y) if y != 0 else 0
            y = continue_root(cubic(x), y + derivative * (x - x_prev))
    return y


# ────────────────────────────── leaf integration ───────────────────────────
@dataclass
class TransportResult:
    start: complex
    end: complex
    drift: float = 0.0
    steps: int = 0
    rejected: int = 0
    min_step: float = 0.0
    end_y: complex | None = None
    moebius: MoebiusMap | None = None
    label: str | None = None
    distance: float | None = None
    fit_residual: float | None = None
    predicted: str | None = None
    tracer_ends: dict[complex, complex] = field(default_factory=dict)
    leaf: str | None = None
    leaf_distance: float | None = None


def transport_integrator(tol: float = TRANSPORT_TOL) -> RKF45:
    """Integrator whose accumulated error over a segment stays below tol."""
    return RKF45(rtol=tol, atol=1e-3 * tol, per_unit_step=True)


def _leaf_gap(poly, x, z) -> float:
    """|f(x, z)| in the chart that keeps it bounded as z → ∞."""
    if is_infinite(z):
        return 1.0
    z = complex(z)
    return abs(poly(x, z)) / max(1.0, abs(z) ** 2)


def special_leaf(x, z, tol: float = ON_LEAF_TOL) -> str | None:
    """Name of the special leaf through (x, z), if any."""
    for name, poly in SPECIAL_LEAVES.items():
        if _leaf_gap(poly, complex(x), z) <= tol * max(1.0, abs(complex(x))):
            return name
    return None


def _z_rhs(seg: Segment):
    def f(s, z):
        return slope_z0(seg.point(s), z) * seg.derivative(s)

    return f


def _w_rhs(seg: Segment):
    """dw/ds for w = 1/z: −(1 + 2(x−1)w − x w²)/(4x(x−1)) · x′(s)."""

    def f(s, w):
        x = seg.point(s)
        return -(1 + 2 * (x - 1) * w - x * w * w) / (4 * x * (x - 1)) * seg.derivative(s)

    return f


def integrate_leaf(
    path: PathSpec,
    z0,
    t=None,
    integrator: RKF45 | None = None,
    clearance: float | None = None,
) -> TransportResult:
    """
    Transport z0 from the fiber over path.base to the fiber over path.end.

    The drift of F is recorded at every accepted step. When z0 lies on one of
    f₀, f₁, f_t the distance from that leaf is recorded as well, since F is
    flat to second order across f₀ and f₁.
    """
    if t is not None:
        _check_clearance(path, t, clearance)
    elif path.segments:
        distance = min(seg.distance_to(b) for seg in path.segments for b in (0j, 1 + 0j))
        if distance < (clearance or 0.05):
            raise ClearanceError(f"path passes within {distance:.3g} of a singular fiber")
    if not path.segments:
        return TransportResult(start=z0, end=z0)
    integrator = integrator or transport_integrator()

    in_w = not is_infinite(z0) and abs(complex(z0)) > 1
    leaf = None if is_infinite(z0) else special_leaf(path.base, z0)
    leaf_distance = 0.0 if leaf else None
    value = 0j if is_infinite(z0) else (1 / complex(z0) if in_w else complex(z0))
    f_start = first_integral(path.base, z0 if not is_infinite(z0) else complex("inf"))
    drift = 0.0
    steps = rejected = 0
    min_step = float("inf")

    for seg in path.segments:
        chart = {"w": in_w}

        def hook(s, y, seg=seg, chart=chart):
            nonlocal drift, leaf_distance
            z = (complex("inf") if y == 0 else 1 / y) if chart["w"] else y
            drift = max(drift, chordal_distance(first_integral(seg.point(s), z), f_start))
            if leaf:
                leaf_distance = max(leaf_distance, _leaf_gap(SPECIAL_LEAVES[leaf], seg.point(s), z))
            if chart["w"] and abs(y) > CHART_SWITCH:
                chart["w"] = False
                return _z_rhs(seg), 1 / y
            if not chart["w"] and abs(y) > CHART_SWITCH:
                chart["w"] = True
                return _w_rhs(seg), 1 / y
            return None

        rhs = _w_rhs(seg) if in_w else _z_rhs(seg)
        result = integrator.solve(rhs, 0.0, 1.0, value, on_step=hook)
        value, in_w = result.y, chart["w"]
        steps += result.steps
        rejected += result.rejected
        min_step = min(min_step, result.min_step)

    if in_w:
        end = complex("inf") if value == 0 else 1 / value
    else:
        end = value
    return TransportResult(
        start=z0,
        end=end,
        drift=drift,
        steps=steps,
        rejected=rejected,
        min_step=0.0 if min_step == float("inf") else min_step,
        leaf=leaf,
        leaf_distance=leaf_distance,
    )


# ────────────────────────────── monodromy ──────────────────────────────────
def predicted_label(path: PathSpec, t) -> str:
    """Label from the parities of the windings about 0 and 1."""
    windings = path.encircled(t)
    odd0, odd1 = windings["0"] % 2 == 1, windings["1"] % 2 == 1
    if odd0 and odd1:
        return PHI_T
    if odd0:
        return PHI_0
    if odd1:
        return PHI_1
    return IDENTITY


def loop_monodromy(
    path: PathSpec,
    t,
    tracers: Sequence[complex] = TRACERS,
    validation: complex = VALIDATION_TRACER,
    integrator: RKF45 | None = None,
    fit_tol: float = FIT_TOL,
    classify_tol: float = CLASSIFY_TOL,
) -> TransportResult:
    """Fitted fiber monodromy of a loop that closes on the curve."""
    if not path.closes_on_curve(t):
        raise OpenLoopError(f"path {path.describe()} does not close on the curve")
    integrator = integrator or transport_integrator()
    runs = {z: integrate_leaf(path, z, t, integrator) for z in (*tracers, validation)}
    ends = [runs[z].end for z in tracers]
    fitted = MoebiusMap.from_three_points(tracers, ends)
    residual = chordal_distance(fitted(validation), runs[validation].end)
    if residual > fit_tol:
        raise FitResidualError(f"fitted map misses the validation tracer by {residual:.3e}")

    label = classify_moebius(fitted, path.base, classify_tol)
    distance = min(fitted.distance(m) for m in fiber_monodromy_maps(path.base).values())
    result = TransportResult(
        start=tracers[0],
        end=ends[0],
        drift=max(r.drift for r in runs.values()),
        steps=sum(r.steps for r in runs.values()),
        rejected=sum(r.rejected for r in runs.values()),
        min_step=min(r.min_step for r in runs.values()),
        end_y=continue_y(path, t),
        moebius=fitted,
        label=label,
        distance=distance,
        fit_residual=residual,
        predicted=predicted_label(path, t),
        tracer_ends={z: runs[z].end for z in runs},
    )
    if label == OTHER:
        logger.warning("loop %s did not classify (distance %.3e)", path.describe(), distance)
    return result


def monodromy_orbit(z, maps: Sequence[MoebiusMap], tol: float = 1e-7, limit: int = 16) -> list[complex]:
    """Orbit of a fiber value under the group generated by `maps`."""
    orbit = [z]
    frontier = [z]
    while frontier and len(orbit) <= limit:
        nxt = []
        for w in frontier:
            for m in maps:
                image = m(w)
                if all(chordal_distance(image, o) > tol for o in orbit):
                    orbit.append(image)
                    nxt.append(image)
        frontier = nxt
    return dedupe_points(orbit, tol)


# ────────────────────────────── battery ────────────────────────────────────
BATTERY: tuple[tuple[tuple[str, ...], float], ...] = (
    ((), DEFAULT_LASSO_RADIUS),
    (("0", "t"), DEFAULT_LASSO_RADIUS),
    (("1", "t"), DEFAULT_LASSO_RADIUS),
    (("0", "1"), DEFAULT_LASSO_RADIUS),
    (("t", "0"), DEFAULT_LASSO_RADIUS),
    (("0", "0"), DEFAULT_LASSO_RADIUS),
    (("1", "1"), DEFAULT_LASSO_RADIUS),
    (("0", "1", "0", "1"), DEFAULT_LASSO_RADIUS),
    (("0", "t"), 0.2),
    (("1", "t"), 0.2),
    (("0", "1"), 0.2),
    (("t", "t"), DEFAULT_LASSO_RADIUS),
)


def battery_paths(t, base=None) -> list[tuple[str, PathSpec]]:
    """The default 12-loop battery of lassos about the branch points."""
    base = default_base(t) if base is None else complex(base)
    points = branch_points(t)
    paths = []
    for labels, radius in BATTERY:
        name = f"lasso({','.join(labels)}) r={radius:g}"
        paths.append((name, PathSpec.lassos(base, [points[k] for k in labels], radius)))
    return paths


def battery_task(task: tuple) -> tuple[str, TransportResult | str]:
    """Picklable worker: (t, name, path) → (name, result or error text)."""
    t, name, path = task
    try:
        return name, loop_monodromy(path, t)
    except (VerifierError, ArithmeticError) as exc:
        return name, f"{type(exc).__name__}: {exc}"


__all__ = [
    "TRACERS",
    "VALIDATION_TRACER",
    "DEFAULT_LASSO_RADIUS",
    "LineSegment",
    "ArcSegment",
    "PathSpec",
    "branch_points",
    "default_clearance",
    "default_base",
    "continue_y",
    "TransportResult",
    "transport_integrator",
    "special_leaf",
    "integrate_leaf",
    "predicted_label",
    "loop_monodromy",
    "monodromy_orbit",
    "BATTERY",
    "battery_paths",
    "battery_task",
]
