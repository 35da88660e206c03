# identity_handler.py
#──────────────────────────────────────────────────────────────────────────
from __future__ import annotations

import logging

import numpy as np

from core.elliptic_curve import EllipticCurve
from core.identity_catalog import IDENTITIES, TYPO_PROBES, identity_check
from core.models import CheckRecord, SuiteConfig
from error_handler import ErrorHandler
from geometry.minimal_sections import SectionWeb
from geometry.riccati_foliation import f0, ft


class IdentityHandler:
    """
    Exact identity catalog
    ─────────────────────────────────────────────────────────
    • I1 … I9 decided by canonical form (with the grid cross-check)
    • typo probes T1, T2: pass when the printed form is shown to differ
    • numeric mode: float evaluation of x·f₀² − t·f_t² + Δ at random points
    """

    def __init__(self, error_handler: ErrorHandler) -> None:
        self.error_handler = error_handler
        self.logger = logging.getLogger(self.__class__.__name__)

    #───────────────────────────── PUBLIC ──────────────────────────────
    def run(self, config: SuiteConfig, rng: np.random.Generator) -> list[CheckRecord]:
        records = [self.error_handler.guard(f"identity.{name}", self.check_identity, name) for name in IDENTITIES]
        records += [self.error_handler.guard(f"typo_probe.{name}", self.check_probe, name) for name in TYPO_PROBES]
        if config.mode in ("numeric", "both"):
            records.append(self.error_handler.guard("identity.I2.numeric", self.check_numeric_i2, config, rng))
        return records

    #-------------------------------------------------------------------------------------
    def check_identity(self, name: str, prefix: str = "identity") -> CheckRecord:
        result = identity_check(name)
        details = {
            "description": result.description,
            "terms": result.term_count,
            "total_degree": result.total_degree,
            "grid_cross_check": result.sampled_zero,
        }
        witnesses = [] if result.witness is None else [{"at": result.witness, "value": result.witness_value}]
        return CheckRecord.from_flag(
            f"{prefix}.{name}",
            result.passed,
            witnesses=witnesses,
            notes=list(result.notes),
            details=details,
        )

    def check_probe(self, name: str) -> CheckRecord:
        record = self.check_identity(name, prefix="typo_probe")
        if record.passed:
            self.logger.info("%s: printed form differs from the construction", name)
        return record

    def check_numeric_i2(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        t = config.t_complex
        web = SectionWeb(EllipticCurve(t))
        worst = 0.0
        for _ in range(config.samples):
            x = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            value = x * f0(x, z) ** 2 - t * ft(x, z) ** 2 + web.discriminant_delta(x, z)
            scale = max(1.0, abs(x) * abs(f0(x, z)) ** 2, abs(t) * abs(ft(x, z)) ** 2)
            worst = max(worst, abs(value) / scale)
        return CheckRecord.from_residual("identity.I2.numeric", worst, config.tol(1e-12), config.samples)

