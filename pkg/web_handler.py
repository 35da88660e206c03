# web_handler.py
#──────────────────────────────────────────────────────────────────────────
from __future__ import annotations

import logging

import numpy as np

from core.elliptic_curve import EllipticCurve
from core.exact_field import format_scalar, parse_scalar
from core.exceptions import VerifierError
from core.models import CheckRecord, Status, SuiteConfig
from core.moebius import HARMONIC_ORBIT, chordal_distance, is_infinite
from core.sampling import exact_curve_point
from error_handler import ErrorHandler
from geometry.minimal_sections import DIAGONAL, SectionParam, SectionWeb, self_intersection_update
from geometry.web_geometry import (
    EXCLUSION_TUBE,
    WebPoint,
    assemble_web_point,
    cross_ratio_at,
    cross_ratio_orbit,
    harmonic_residual,
    sample_web_points,
)
from group_law_handler import point_gap

EXACT_SECTION_SAMPLES = 25
SWEEP_HARMONIC_POINTS = 5


def _admissible_base(rng: np.random.Generator, t: complex, box: float = 3.0, tube: float = 1e-2) -> complex:
    while True:
        u = complex(rng.uniform(-box, box), rng.uniform(-box, box))
        if min(abs(u), abs(u - 1), abs(u - t)) >= tube:
            return u


class WebHandler:
    """
    Sections, discriminant and the harmonic 2-web
    ─────────────────────────────────────────────────────────
    • section solver soundness (numeric, and exact over Q(i))
    • Δ is a Riccati leaf with F = t; sections are tangent along it
    • harmonic test Z₁ + Z₂ = 2Z₀, cross-ratio −1 and its orbit
    • derived 2-web ODE against Z₁·Z₂; the printed constant is reported
    • intersection invariant q₁ ⊕ q₂ ⊕ p = (t, 0) and the t-sweep
    """

    def __init__(self, error_handler: ErrorHandler) -> None:
        self.error_handler = error_handler
        self.logger = logging.getLogger(self.__class__.__name__)

    #───────────────────────────── PUBLIC ──────────────────────────────
    def run(self, config: SuiteConfig, rngs: dict[str, np.random.Generator]) -> list[CheckRecord]:
        """`rngs` holds the sections, delta, harmonic and sweep streams."""
        guard = self.error_handler.guard
        records = [guard("self_intersection.bookkeeping", self.check_self_intersection)]
        if config.mode in ("exact", "both"):
            records.append(guard("sections.exact", self.check_sections_exact, config, rngs["sections"]))
        if config.mode == "exact":
            return records

        web = SectionWeb(EllipticCurve(config.t_complex))
        records += [
            guard("sections.solver", self.check_sections_numeric, web, config, rngs["sections"]),
            guard("sections.diagonal_tangent", self.check_diagonal, web, config, rngs["sections"]),
            guard("sections.constant_calibration", self.check_constant_calibration, web, config),
            guard("delta.leaf", self.check_delta_leaf, web, config, rngs["delta"]),
            guard("delta.tangency", self.check_delta_tangency, web, config, rngs["delta"]),
            guard("web.fiber_z0", self.check_fiber_z0, web, config, rngs["delta"]),
        ]

        try:
            points, excluded = sample_web_points(web, rngs["harmonic"], config.samples, config.region, EXCLUSION_TUBE)
        except Exception as exc:  # noqa: BLE001
            records.append(self.error_handler.handle(exc, "harmonic.sweep"))
        else:
            records += [
                guard("harmonic.sweep", self.check_harmonic, points, excluded, config),
                guard("harmonic.cross_ratio_orbit", self.check_cross_ratio_orbit, points, config),
                guard("two_web_ode.roots", self.check_two_web_roots, web, points, config),
                guard("two_web_ode.vieta", self.check_vieta, web, points, config),
                guard("typo_probe.two_web_constant", self.check_printed_constant, web, points),
            ]

        records += [
            guard("intersection.invariant", self.check_intersection, web, config, rngs["sweep"]),
            guard("intersection.calibration", self.check_calibration, web, config, rngs["sweep"]),
        ]
        for t_text in config.t_sweep:
            records.append(guard(f"sweep.t={t_text}", self.check_t_sweep, t_text, config, rngs["sweep"]))
        return records

    #──────────────────────────── sections ─────────────────────────────
    def check_sections_numeric(self, web: SectionWeb, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        t = complex(web.curve.t)
        worst, failures = 0.0, []
        for _ in range(config.samples):
            u = _admissible_base(rng, t)
            v = web.curve.sample_point(u).y
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            try:
                solved = web.sections_through(u, v, z)
            except VerifierError as exc:
                failures.append({"u": u, "z": z, "error": str(exc)})
                continue
            worst = max(worst, *solved.graph_residuals, *solved.curve_residuals)
        record = CheckRecord.from_residual(
            "sections.solver", worst, config.tol(1e-9), config.samples, witnesses=failures[:5]
        )
        if failures:
            record.status = Status.FAIL
        return record

    def check_sections_exact(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        """Both sections reproduce z and land on the curve with zero residual in Q(i)."""
        count = min(config.samples, EXACT_SECTION_SAMPLES)
        failures = []
        for _ in range(count):
            curve, p = exact_curve_point(rng)
            web = SectionWeb(curve)
            torsion = curve.two_torsion()
            q = curve.add(curve.double(p), torsion["0"])
            if q.infinite or q.x == p.x:
                q = curve.add(p, torsion["1"])
            z = web.section_value(SectionParam.generic(q), p)
            solved = web.sections_through(p.x, p.y, z)
            found = any(web.parameter_point(s) == q for s in solved.sections)
            residual = max(*solved.graph_residuals, *solved.curve_residuals)
            if residual != 0.0 or not found:
                failures.append({"t": curve.t, "p": str(p), "q": str(q), "residual": residual})
        return CheckRecord.from_flag("sections.exact", not failures, samples=count, witnesses=failures[:5])

    def check_diagonal(self, web: SectionWeb, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        """At z = u the diagonal passes, with partner x₀ = t(u−1)/(u−t)."""
        t = complex(web.curve.t)
        worst = 0.0
        for _ in range(config.sweep_samples):
            u = _admissible_base(rng, t)
            v = web.curve.sample_point(u).y
            solved = web.sections_through(u, v, u)
            if solved.sections[0].kind != DIAGONAL:
                return CheckRecord.from_flag("sections.diagonal_tangent", False, witnesses=[u])
            expected = t * (u - 1) / (u - t)
            worst = max(worst, abs(complex(solved.roots[1]) - expected) / max(1.0, abs(expected)))
        return CheckRecord.from_residual("sections.diagonal_tangent", worst, config.tol(1e-9), config.sweep_samples)

    def check_constant_calibration(self, web: SectionWeb, config: SuiteConfig) -> CheckRecord:
        """z ≡ 1 ↔ (0,0), z ≡ 0 ↔ (1,0), z ≡ ∞ ↔ (t,0)."""
        sample = web.curve.sample_point(0.3 + 0.7j)
        mapping = web.calibrate_constant_sections(sample)
        torsion = web.curve.two_torsion()
        expected = {0: torsion["1"], 1: torsion["0"], "inf": torsion["t"]}
        ok = set(mapping) == set(expected) and all(
            web.curve.points_close(mapping[k], q) for k, q in expected.items()
        )
        return CheckRecord.from_flag(
            "sections.constant_calibration",
            ok,
            details={str(k): str(q) for k, q in mapping.items()},
        )

    #──────────────────────────── discriminant ─────────────────────────
    def check_delta_leaf(self, web: SectionWeb, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        t = complex(web.curve.t)
        worst, witness = 0.0, None
        for _ in range(config.delta_samples):
            u = _admissible_base(rng, t)
            residual = web.delta_leaf_residual(u)
            if residual > worst:
                worst, witness = residual, u
        return CheckRecord.from_residual(
            "delta.leaf", worst, config.tol(1e-8), config.delta_samples, witnesses=[witness] if witness else []
        )

    def check_delta_tangency(self, web: SectionWeb, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        """The section equation has a double root along Δ."""
        t = complex(web.curve.t)
        worst = 0.0
        for _ in range(config.delta_samples):
            u = _admissible_base(rng, t)
            for root in web.delta_roots(u):
                if is_infinite(root):
                    continue
                a, b, c = web.coefficients(u, root)
                scale = max(1.0, abs(b) ** 2, abs(4 * a * c))
                worst = max(worst, abs(web.section_discriminant(u, root)) / scale)
        return CheckRecord.from_residual("delta.tangency", worst, config.tol(1e-8), config.delta_samples)

    def check_fiber_z0(self, web: SectionWeb, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        """Along z = 0 the slopes are (∞, −1/(4(u−1)), {0, −1/(2(u−1))})."""
        t = complex(web.curve.t)
        worst = 0.0
        for _ in range(config.sweep_samples):
            u = _admissible_base(rng, t)
            v = web.curve.sample_point(u).y
            point = assemble_web_point(web, u, v, 0j)
            z0 = complex(point.riccati)
            expected = sorted((0j, -1 / (2 * (u - 1))), key=abs)
            got = sorted((complex(s) for s in point.branches), key=abs)
            worst = max(
                worst,
                abs(z0 + 1 / (4 * (u - 1))),
                *(abs(a - b) / max(1.0, abs(b)) for a, b in zip(got, expected)),
            )
        return CheckRecord.from_residual("web.fiber_z0", worst, config.tol(1e-9), config.sweep_samples)

    #──────────────────────────── harmonic 2-web ───────────────────────
    def check_harmonic(self, points: list[WebPoint], excluded, config: SuiteConfig) -> CheckRecord:
        harmonic = max((harmonic_residual(p) for p in points), default=0.0)
        cross = max((abs(cross_ratio_at(p) + 1) for p in points), default=0.0)
        ok = harmonic < config.tol(1e-10) and cross < config.tol(1e-9)
        record = CheckRecord.from_flag(
            "harmonic.sweep",
            ok,
            samples=len(points),
            details={"max_cross_ratio_deviation": cross, "excluded": dict(sorted(excluded.items()))},
        )
        record.max_residual, record.tolerance = harmonic, config.tol(1e-10)
        return record

    def check_cross_ratio_orbit(self, points: list[WebPoint], config: SuiteConfig) -> CheckRecord:
        """All 24 orderings land in {−1, 2, 1/2}; (∞, Z₁, Z₀, Z₂) gives 2."""
        worst = 0.0
        for p in points[: config.sweep_samples]:
            for value in cross_ratio_orbit(p).values():
                worst = max(worst, min(abs(value - h) for h in HARMONIC_ORBIT))
            worst = max(worst, abs(cross_ratio_at(p, (0, 2, 1, 3)) - 2))
        return CheckRecord.from_residual(
            "harmonic.cross_ratio_orbit", worst, config.tol(1e-8), min(len(points), config.sweep_samples)
        )

    def check_two_web_roots(self, web: SectionWeb, points: list[WebPoint], config: SuiteConfig) -> CheckRecord:
        """Both branch slopes solve m² − 2Z₀m + P = 0."""
        worst = 0.0
        for p in points:
            z0 = complex(p.riccati)
            for m in p.branches:
                residual = web.two_web_ode_residual(p.x, p.z, complex(m))
                worst = max(worst, abs(residual) / max(1.0, abs(z0) ** 2, abs(complex(m)) ** 2))
        return CheckRecord.from_residual("two_web_ode.roots", worst, config.tol(1e-9), len(points))

    def check_vieta(self, web: SectionWeb, points: list[WebPoint], config: SuiteConfig) -> CheckRecord:
        worst = 0.0
        for p in points:
            z1, z2 = (complex(s) for s in p.branches)
            constant = complex(web.web_constant(p.x, p.z))
            worst = max(worst, abs(constant - z1 * z2) / max(1.0, abs(z1 * z2)))
        return CheckRecord.from_residual("two_web_ode.vieta", worst, config.tol(1e-9), len(points))

    def check_printed_constant(self, web: SectionWeb, points: list[WebPoint]) -> CheckRecord:
        """The printed constant coefficient must fail the Z₁·Z₂ oracle."""
        misses = 0
        for p in points:
            z1, z2 = (complex(s) for s in p.branches)
            printed = complex(web.web_constant(p.x, p.z, printed=True))
            if abs(printed - z1 * z2) > 1e-6 * max(1.0, abs(z1 * z2)):
                misses += 1
        detected = misses > 0
        notes = []
        if detected:
            notes.append(
                "printed 2-web constant coefficient '-x^3+x^2-tx+2' fails the Z1*Z2 oracle; "
                "the derived '-x^3+2x^2-tx' is used"
            )
        return CheckRecord.from_flag(
            "typo_probe.two_web_constant", detected, samples=len(points), notes=notes,
            details={"printed_misses": misses},
        )

    #──────────────────────────── intersections ────────────────────────
    def check_intersection(self, web: SectionWeb, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        """Two sections take the same value over p with q₁ ⊕ q₂ ⊕ p = (t, 0)."""
        count = config.group_triples
        worst = 0.0
        for _ in range(count):
            q1, q2 = web.curve.sample_point(rng=rng), web.curve.sample_point(rng=rng)
            s1, s2 = SectionParam.generic(q1), SectionParam.generic(q2)
            p = web.intersection_base_point(s1, s2)
            worst = max(worst, chordal_distance(web.section_value(s1, p), web.section_value(s2, p)))
        return CheckRecord.from_residual("intersection.invariant", worst, config.tol(1e-8), count)

    def check_calibration(self, web: SectionWeb, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        residual = self._calibration_residual(web, config.sweep_samples, rng)
        return CheckRecord.from_residual(
            "intersection.calibration", residual, config.tol(1e-7), config.sweep_samples,
            details={"offset": "(t, 0)"},
        )

    def check_t_sweep(self, t_text: str, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        """Offset calibration, Δ-leaf and harmonic residuals at another t."""
        t = complex(parse_scalar(t_text))
        web = SectionWeb(EllipticCurve(t))
        calibration = self._calibration_residual(web, config.sweep_samples, rng)
        delta = max(web.delta_leaf_residual(_admissible_base(rng, t)) for _ in range(config.sweep_samples))
        points, _ = sample_web_points(web, rng, SWEEP_HARMONIC_POINTS, config.region, EXCLUSION_TUBE)
        harmonic = max(harmonic_residual(p) for p in points)
        ok = calibration <= config.tol(1e-7) and delta <= config.tol(1e-8) and harmonic <= config.tol(1e-10)
        record = CheckRecord.from_flag(
            f"sweep.t={t_text}",
            ok,
            samples=config.sweep_samples,
            details={"t": format_scalar(t), "calibration": calibration, "delta_leaf": delta, "harmonic": harmonic},
        )
        record.max_residual = max(calibration, delta, harmonic)
        return record

    #─────────────────────────── helpers ───────────────────────────────
    @staticmethod
    def _calibration_residual(web: SectionWeb, count: int, rng: np.random.Generator) -> float:
        """Largest distance of the measured offset from (t, 0)."""
        target = web.curve.two_torsion()["t"]
        worst = 0.0
        for _ in range(count):
            q, p = web.curve.sample_point(rng=rng), web.curve.sample_point(rng=rng)
            offset = web.calibrate_intersection_offset(SectionParam.generic(q), p)
            worst = max(worst, point_gap(offset, target))
        return worst

    @staticmethod
    def check_self_intersection() -> CheckRecord:
        """σ′² = 4 drops to 1 through all three centers; parity flips with each center."""
        cases = {
            (4, (True, True, True)): 1,
            (4, (False, False, False)): 7,
            (0, (False, False, False)): 3,
            (4, (True, False, True)): 3,
        }
        ok = all(self_intersection_update(s, passes) == want for (s, passes), want in cases.items())
        return CheckRecord.from_flag("self_intersection.bookkeeping", ok, samples=len(cases))


__all__ = ["WebHandler"]
