# suite_manager.py
#──────────────────────────────────────────────────────────────────────────
from __future__ import annotations

import logging
import time
from typing import Optional

from core.models import SuiteConfig, VerificationReport
from core.sampling import spawn
from curvature_handler import CurvatureHandler
from error_handler import ErrorHandler
from group_law_handler import GroupLawHandler
from identity_handler import IdentityHandler
from monodromy_handler import MonodromyHandler
from plot_handler import PlotHandler
from pullback_handler import PullbackHandler
from web_handler import WebHandler


class SuiteManager:
    """
    Owns one verification run
    ─────────────────────────────────────────────────────────
    • builds the handlers around a shared ErrorHandler
    • hands every handler its own seeded random stream
    • is the only writer of the report; figures are side outputs
    """

    def __init__(self) -> None:
        self.logger = logging.getLogger(self.__class__.__name__)

        self.error_handler: Optional[ErrorHandler] = None
        self.identity_handler: Optional[IdentityHandler] = None
        self.group_law_handler: Optional[GroupLawHandler] = None
        self.monodromy_handler: Optional[MonodromyHandler] = None
        self.web_handler: Optional[WebHandler] = None
        self.curvature_handler: Optional[CurvatureHandler] = None
        self.pullback_handler: Optional[PullbackHandler] = None

    def initialize_modules(self) -> None:
        # 1. ErrorHandler (shared by every handler)
        self.error_handler = ErrorHandler()

        # 2. check handlers
        self.identity_handler = IdentityHandler(self.error_handler)
        self.group_law_handler = GroupLawHandler(self.error_handler)
        self.monodromy_handler = MonodromyHandler(self.error_handler)
        self.web_handler = WebHandler(self.error_handler)
        self.curvature_handler = CurvatureHandler(self.error_handler)
        self.pullback_handler = PullbackHandler(self.error_handler)
        self.logger.debug("handlers initialized")

    #───────────────────────────── PUBLIC ──────────────────────────────
    def run_suite(self, config: SuiteConfig) -> VerificationReport:
        """Run every suite for `config`, emit requested figures, write the report."""
        if self.error_handler is None:
            self.initialize_modules()
        seed = config.seed
        report = VerificationReport(config=config.echo(), seed=seed)
        self.logger.info("verifying t = %s, mode = %s, seed = %d", config.t, config.mode, seed)

        stages = [
            ("identities", lambda: self.identity_handler.run(config, spawn(seed, "identities"))),
            ("group_law", lambda: self.group_law_handler.run(config, spawn(seed, "group_law"))),
            ("monodromy", lambda: self.monodromy_handler.run(config, spawn(seed, "monodromy"))),
            ("web", lambda: self.web_handler.run(config, {
                key: spawn(seed, key) for key in ("sections", "delta", "harmonic", "sweep")
            })),
            ("curvature", lambda: self.curvature_handler.run(config, spawn(seed, "curvature"))),
            ("pullback", lambda: self.pullback_handler.run(config, spawn(seed, "pullback"))),
        ]
        for stage, run in stages:
            started = time.perf_counter()
            try:
                report.extend(run())
            except Exception as exc:  # noqa: BLE001
                report.add(self.error_handler.handle(exc, f"{stage}.suite"))
            self.logger.info("%s suite finished in %.2fs", stage, time.perf_counter() - started)

        if config.plots:
            self.emit_plots(config, report)

        summary = report.summary()
        self.logger.info(
            "verdict %s (%d pass, %d fail, %d error)",
            summary["verdict"],
            summary["counts"]["pass"],
            summary["counts"]["fail"],
            summary["counts"]["error"],
        )
        if config.out is not None:
            report.write(config.out)
        return report

    def emit_plots(self, config: SuiteConfig, report: VerificationReport) -> None:
        """Requested figures; a figure that cannot be written is an error record."""
        plotter = PlotHandler(config.plot_dir or "plots")
        for kind in config.plots:
            try:
                plotter.emit_plot(kind, config)
            except Exception as exc:  # noqa: BLE001
                report.add(self.error_handler.handle(exc, f"plot.{kind}"))


def run_suite(config: SuiteConfig) -> VerificationReport:
    return SuiteManager().run_suite(config)


__all__ = ["SuiteManager", "run_suite"]
