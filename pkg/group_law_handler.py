# group_law_handler.py
#──────────────────────────────────────────────────────────────────────────
from __future__ import annotations

import logging

import numpy as np

from core.elliptic_curve import INFINITY, CurvePoint, EllipticCurve
from core.exact_field import ExactScalar, I
from core.models import CheckRecord, SuiteConfig
from core.sampling import exact_curve_point
from error_handler import ErrorHandler

EXACT_GROUP_SAMPLES = 25


def point_gap(p: CurvePoint, q: CurvePoint) -> float:
    """Relative coordinate distance; a finite point against ∞ measures 1/|x|."""
    if p.infinite and q.infinite:
        return 0.0
    if p.infinite or q.infinite:
        other = q if p.infinite else p
        return 1 / max(1.0, abs(complex(other.x)))
    gaps = []
    for a, b in ((p.x, q.x), (p.y, q.y)):
        a, b = complex(a), complex(b)
        gaps.append(abs(a - b) / max(1.0, abs(a), abs(b)))
    return max(gaps)


class GroupLawHandler:
    """
    Group law on y² = x(x−1)(x−t)
    ─────────────────────────────────────────────────────────
    • associativity, commutativity and inverses on random triples
    • exact mode: the same laws in Q(i) on curves through rational points
    • the t = 4 chain 2·(2, 2i) = (0, 0), (0, 0) ⊕ (1, 0) = (4, 0)
    • the misprinted doubling formula is detected and reported
    """

    def __init__(self, error_handler: ErrorHandler) -> None:
        self.error_handler = error_handler
        self.logger = logging.getLogger(self.__class__.__name__)

    #───────────────────────────── PUBLIC ──────────────────────────────
    def run(self, config: SuiteConfig, rng: np.random.Generator) -> list[CheckRecord]:
        guard = self.error_handler.guard
        records = [
            guard("group_law.two_torsion", self.check_two_torsion, config),
            guard("group_law.t4_chain", self.check_t4_chain),
            guard("group_law.printed_doubling", self.check_printed_doubling),
        ]
        if config.mode in ("numeric", "both"):
            records.append(guard("group_law.numeric", self.check_numeric, config, rng))
            records.append(guard("group_law.x_doubling", self.check_x_doubling, config, rng))
        if config.mode in ("exact", "both"):
            records.append(guard("group_law.exact", self.check_exact, config, rng))
        return records

    #-------------------------------------------------------------------------------------
    def check_numeric(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        curve = EllipticCurve(config.t_complex)
        worst, witness = 0.0, None
        for _ in range(config.group_triples):
            p, q, r = (curve.sample_point(rng=rng) for _ in range(3))
            gaps = (
                point_gap(curve.add(curve.add(p, q), r), curve.add(p, curve.add(q, r))),
                point_gap(curve.add(p, q), curve.add(q, p)),
                point_gap(curve.add(p, curve.neg(p)), INFINITY),
            )
            if max(gaps) > worst:
                worst, witness = max(gaps), {"p": str(p), "q": str(q), "r": str(r)}
        return CheckRecord.from_residual(
            "group_law.numeric",
            worst,
            config.tol(1e-9),
            config.group_triples,
            witnesses=[witness] if witness else [],
        )

    def check_x_doubling(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        """Tangent doubling agrees with the closed form of pr₁ ∘ [2]."""
        curve = EllipticCurve(config.t_complex)
        worst = 0.0
        for _ in range(config.group_triples):
            p = curve.sample_point(rng=rng)
            doubled = complex(curve.double(p).x)
            formula = complex(curve.x_double_formula(p.x, p.y))
            worst = max(worst, abs(doubled - formula) / max(1.0, abs(formula)))
        return CheckRecord.from_residual("group_law.x_doubling", worst, config.tol(1e-10), config.group_triples)

    def check_exact(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        count = min(config.group_triples, EXACT_GROUP_SAMPLES)
        failures = []
        for _ in range(count):
            curve, p = exact_curve_point(rng)
            torsion = curve.two_torsion()
            pool = [
                p,
                curve.double(p),
                curve.neg(p),
                curve.add(p, torsion["0"]),
                curve.add(p, torsion["1"]),
                curve.add(p, torsion["t"]),
            ]
            a, b, c = (pool[int(k)] for k in rng.integers(0, len(pool), size=3))
            laws = {
                "associativity": curve.add(curve.add(a, b), c) == curve.add(a, curve.add(b, c)),
                "commutativity": curve.add(a, b) == curve.add(b, a),
                "inverse": curve.add(a, curve.neg(a)).infinite,
                "closure": all(curve.on_curve(s) for s in (curve.add(a, b), curve.add(curve.add(a, b), c))),
            }
            broken = [law for law, ok in laws.items() if not ok]
            if broken:
                failures.append({"t": curve.t, "p": str(p), "laws": broken})
        return CheckRecord.from_flag("group_law.exact", not failures, samples=count, witnesses=failures[:5])

    def check_t4_chain(self) -> CheckRecord:
        curve = EllipticCurve(ExactScalar(4))
        p = CurvePoint(ExactScalar(2), 2 * I)
        doubled = curve.double(p)
        shifted = curve.add(doubled, curve.two_torsion()["1"])
        ok = (
            curve.on_curve(p)
            and doubled == curve.two_torsion()["0"]
            and shifted == curve.two_torsion()["t"]
        )
        return CheckRecord.from_flag(
            "group_law.t4_chain",
            ok,
            details={"2P": str(doubled), "2P+(1,0)": str(shifted)},
        )

    def check_printed_doubling(self) -> CheckRecord:
        """The misprinted doubling must disagree with the tangent construction."""
        curve = EllipticCurve(ExactScalar(4))
        p = CurvePoint(ExactScalar(2), 2 * I)
        printed, correct = curve.printed_double(p), curve.double(p)
        differs = printed != correct
        notes = []
        if differs:
            notes.append(
                "printed doubling x = lambda^2 - (1+t) - 2x disagrees with the tangent construction; "
                "the sign-corrected x = lambda^2 + (1+t) - 2x is used"
            )
        return CheckRecord.from_flag(
            "group_law.printed_doubling",
            differs,
            witnesses=[{"p": str(p), "printed": str(printed), "tangent": str(correct)}],
            notes=notes,
        )

    def check_two_torsion(self, config: SuiteConfig) -> CheckRecord:
        curve = EllipticCurve(config.t)
        torsion = curve.two_torsion()
        labels = ("0", "1", "t")
        ok = all(curve.double(torsion[k]).infinite for k in labels)
        for a in labels:
            for b in labels:
                if a == b:
                    continue
                (third,) = set(labels) - {a, b}
                ok = ok and curve.points_close(curve.add(torsion[a], torsion[b]), torsion[third])
        return CheckRecord.from_flag("group_law.two_torsion", ok, samples=9)
