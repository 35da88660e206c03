# curvature_handler.py
#──────────────────────────────────────────────────────────────────────────
from __future__ import annotations

import logging

import numpy as np

from core.elliptic_curve import EllipticCurve
from core.exceptions import VerifierError
from core.models import CheckRecord, Status, SuiteConfig
from core.moebius import is_infinite
from error_handler import ErrorHandler
from geometry.minimal_sections import SectionWeb
from geometry.web_geometry import (
    CHARTS,
    HEXAGONAL_ORDER,
    SUBWEBS,
    ParallelizabilityReport,
    blaschke_curvature,
    control_curvature,
    control_fields,
    parallel_fields,
    parallelizability_report,
    subweb_name,
    web_fields,
)

CONTROL_PROBE = (0.2 + 0.3j, 0.3 + 0.4j)
WEB_PROBE = (0.4 + 0.5j, 0.7 + 0.4j)


def finite_charts(fields, x, z) -> list:
    """Linear charts in which all three slopes at (x, z) are finite."""
    values = [f(x, z) for f in fields]
    return [c for c in CHARTS if not any(is_infinite(c.slope(p)) for p in values)]


class CurvatureHandler:
    """
    Parallelizability certificate of the 4-web
    ─────────────────────────────────────────────────────────
    • Blaschke curvature of the four 3-subwebs (Richardson zero test)
    • hexagon closure order ≥ 3.5 per subweb
    • calibration: parallel web K = 0, control web K = 2/(1−s)² − 2/s²,
      and the same K in every linear chart
    • --control-web holds the non-hexagonal control to the same standard
    """

    def __init__(self, error_handler: ErrorHandler) -> None:
        self.error_handler = error_handler
        self.logger = logging.getLogger(self.__class__.__name__)

    #───────────────────────────── PUBLIC ──────────────────────────────
    def run(self, config: SuiteConfig, rng: np.random.Generator) -> list[CheckRecord]:
        guard = self.error_handler.guard
        records = [
            guard("curvature.calibration", self.check_calibration, config),
            guard("curvature.chart_independence", self.check_chart_independence, config),
        ]
        if config.mode == "exact":
            return records

        web = SectionWeb(EllipticCurve(config.t_complex))
        try:
            report = parallelizability_report(
                web,
                rng,
                config.curvature_points,
                config.region,
                control_web=config.control_web,
                workers=config.workers,
            )
        except Exception as exc:  # noqa: BLE001
            records.append(self.error_handler.handle(exc, "curvature.sweep"))
            return records

        records.append(guard("curvature.harmonic", self.check_harmonic, report, config))
        for subweb in SUBWEBS:
            name = subweb_name(subweb)
            records.append(guard(f"curvature.{name}", self.check_subweb_curvature, report, name))
            records.append(guard(f"closure.{name}", self.check_subweb_closure, report, name))
        records.append(guard("curvature.control", self.check_control, report, config))
        return records

    #-------------------------------------------------------------------------------------
    def check_harmonic(self, report: ParallelizabilityReport, config: SuiteConfig) -> CheckRecord:
        record = CheckRecord.from_residual(
            "curvature.harmonic",
            report.max_harmonic,
            config.tol(report.harmonic_tol),
            len(report.points),
            witnesses=report.errors[:5],
            details={
                "max_cross_ratio_deviation": report.max_cross_ratio_deviation,
                "excluded": report.excluded,
            },
        )
        if not report.harmonic_pass or report.errors:
            record.status = Status.FAIL
        return record

    def check_subweb_curvature(self, report: ParallelizabilityReport, name: str) -> CheckRecord:
        estimates = [c.curvatures[name] for c in report.points if name in c.curvatures]
        failing = [
            {"x": c.x, "z": c.z, "K": c.curvatures[name].value, "error": c.curvatures[name].error}
            for c in report.points
            if name in c.curvatures and not c.curvatures[name].is_zero()
        ]
        ok = not failing and not report.errors and len(estimates) == len(report.points)
        return CheckRecord(
            name=f"curvature.{name}",
            status=Status.PASS if ok else Status.FAIL,
            max_residual=report.max_curvature(name),
            tolerance=max((10 * e.error + 1e-7 for e in estimates), default=1e-7),
            samples=len(estimates),
            witnesses=failing[:5],
            details={"charts": sorted({e.chart for e in estimates})},
        )

    def check_subweb_closure(self, report: ParallelizabilityReport, name: str) -> CheckRecord:
        orders = [c.orders[name] for c in report.points if name in c.orders]
        min_order = report.min_order(name)
        ok = bool(orders) and min_order >= HEXAGONAL_ORDER and not report.errors
        return CheckRecord.from_flag(
            f"closure.{name}",
            ok,
            samples=len(orders),
            details={"min_order": min_order, "required": HEXAGONAL_ORDER},
        )

    def check_control(self, report: ParallelizabilityReport, config: SuiteConfig) -> CheckRecord:
        """
        Without --control-web: the control must be detected as non-hexagonal.
        With it: the control is certified like a subweb and fails.
        """
        detail = {
            "injected": report.control_injected,
            "detected_non_hexagonal": report.control_detected,
            "points": [
                {"x": c.x, "z": c.z, "K": c.curvatures["control"].value, "order": c.orders.get("control")}
                for c in report.control
                if "control" in c.curvatures
            ],
        }
        if report.control_injected:
            notes = ["control web {0, 1, x+z} certified as a subweb"]
            return CheckRecord.from_flag("curvature.control", not report.control_detected,
                                         samples=len(report.control), notes=notes, details=detail)
        return CheckRecord.from_flag("curvature.control", report.control_detected,
                                     samples=len(report.control), details=detail)

    def check_calibration(self, config: SuiteConfig) -> CheckRecord:
        """Known curvatures: 0 for {0, 1, ∞}, closed form for {0, 1, x+z}."""
        parallel = blaschke_curvature(parallel_fields(), *CONTROL_PROBE)
        control = blaschke_curvature(control_fields(), *CONTROL_PROBE)
        expected = control_curvature(*CONTROL_PROBE)
        control_gap = abs(control.value - expected) / max(1.0, abs(expected))
        ok = parallel.is_zero() and control_gap <= config.tol(1e-5) and not control.is_zero()
        record = CheckRecord.from_flag(
            "curvature.calibration",
            ok,
            samples=2,
            details={"parallel_K": parallel.value, "control_K": control.value, "control_expected": expected},
        )
        record.max_residual = max(abs(parallel.value), control_gap)
        return record

    def check_chart_independence(self, config: SuiteConfig) -> CheckRecord:
        """The control K and a fibration subweb's K agree across admissible charts."""
        x, z = CONTROL_PROBE
        control = control_fields()
        values = [blaschke_curvature(control, x, z, chart=chart).value for chart in finite_charts(control, x, z)]
        spread = max(abs(v - values[0]) for v in values) / max(1.0, abs(values[0]))

        web = SectionWeb(EllipticCurve(config.t_complex))
        u, w = WEB_PROBE
        fields = web_fields(web, u, w)
        trio = [fields["fibration"], fields["riccati"], fields["web1"]]
        readings = []
        for chart in finite_charts(trio, u, w):
            try:
                readings.append(blaschke_curvature(trio, u, w, chart=chart))
            except (VerifierError, ZeroDivisionError):
                # slopes nearly coincide in this chart
                continue
        web_spread = max((abs(r.value - readings[0].value) for r in readings), default=0.0)
        allowance = 2 * (10 * max((r.error for r in readings), default=0.0) + 1e-7)
        ok = spread <= config.tol(1e-5) and len(readings) >= 2 and web_spread <= allowance
        record = CheckRecord.from_flag(
            "curvature.chart_independence",
            ok,
            samples=len(values) + len(readings),
            details={"control_spread": spread, "web_spread": web_spread, "charts": [r.chart for r in readings]},
        )
        record.max_residual = spread
        return record


__all__ = ["CurvatureHandler"]
