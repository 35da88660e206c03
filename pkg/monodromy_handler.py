# monodromy_handler.py
#──────────────────────────────────────────────────────────────────────────
from __future__ import annotations

import logging
from itertools import combinations

import numpy as np

from core.elliptic_curve import EllipticCurve
from core.models import CheckRecord, Status, SuiteConfig
from core.moebius import (
    INF,
    OTHER,
    aut_translate,
    chordal_distance,
    fiber_monodromy_maps,
    gamma_orbit,
    is_klein_four,
    klein_table,
)
from core.sampling import parallel_map
from error_handler import ErrorHandler
from geometry.leaf_transport import (
    PathSpec,
    TransportResult,
    battery_paths,
    battery_task,
    default_base,
    integrate_leaf,
    monodromy_orbit,
)

# fiber values with orbits of size 2 under ⟨−z, 1/z⟩
SPECIAL_GAMMA_POINTS = (1 + 0j, 1j, 0j, INF)
DRIFT_PER_LENGTH = 1e-8
LEAF_DISTANCE_TOL = 1e-8
GENERIC_START = 0.3 + 0.2j


def drift_path(t) -> PathSpec:
    """Open path of length 9.75 above the branch points, starting at the default base."""
    b = default_base(t)
    return PathSpec.polyline([b, b + 2.25, b + 2.25 + 1.5j, b - 2.25 + 1.5j, b - 2.25])


class MonodromyHandler:
    """
    Fiber monodromy and the small groups acting on fibers
    ─────────────────────────────────────────────────────────
    • ⟨−z, 1/z⟩ orbit sizes and the Klein-four table of the Φ̃ᵢ(x₀)
    • automorphisms ε ↦ ε ⊕ pᵢ are involutions
    • transport along a long open path: F drift and distance from f₀, f₁
    • the loop battery: integrate, fit, classify, compare with winding parity
    • commutation, composition and orbit sizes of the measured maps
    """

    def __init__(self, error_handler: ErrorHandler) -> None:
        self.error_handler = error_handler
        self.logger = logging.getLogger(self.__class__.__name__)

    #───────────────────────────── PUBLIC ──────────────────────────────
    def run(self, config: SuiteConfig, rng: np.random.Generator) -> list[CheckRecord]:
        guard = self.error_handler.guard
        records = [
            guard("orbits.gamma", self.check_gamma_orbits, config, rng),
            guard("monodromy.klein_table", self.check_klein_table, config, rng),
            guard("monodromy.special_leaves_fixed", self.check_special_leaves, config, rng),
            guard("automorphisms.involutions", self.check_automorphisms, config, rng),
        ]
        if config.mode == "exact":
            return records

        records.append(guard("transport.drift", self.check_transport, config))
        try:
            results, lengths = self.run_battery(config)
        except Exception as exc:  # noqa: BLE001
            records.append(self.error_handler.handle(exc, "monodromy.battery"))
            return records
        records += [
            guard("monodromy.battery", self.check_battery, results, lengths, config),
            guard("monodromy.parity_prediction", self.check_parity, results, mandatory=False),
            guard("monodromy.commutation", self.check_commutation, results, config),
            guard("monodromy.composition", self.check_composition, results, config),
            guard("monodromy.orbits", self.check_orbits, results, config),
        ]
        return records

    def run_battery(self, config: SuiteConfig) -> tuple[dict[str, TransportResult | str], dict[str, float]]:
        """Default battery plus any configured loops, in a stable order."""
        t = config.t_complex
        paths = battery_paths(t)
        for k, text in enumerate(config.loops):
            paths.append((f"loop[{k}] {text}", PathSpec.parse(text, t)))
        tasks = [(t, name, path) for name, path in paths]
        results = dict(parallel_map(battery_task, tasks, config.workers))
        lengths = {name: path.length for name, path in paths}
        self.logger.info("transported %d loops", len(results))
        return results, lengths

    def check_transport(self, config: SuiteConfig) -> CheckRecord:
        """A generic value keeps F, values on f₀ and f₁ stay on their leaf."""
        t = config.t_complex
        path = drift_path(t)
        base = path.base
        starts = {"generic": GENERIC_START, "f0": 1 + np.sqrt(1 - base), "f1": np.sqrt(base)}
        runs = {name: integrate_leaf(path, z, t) for name, z in starts.items()}
        drift = max(r.drift for r in runs.values()) / max(1.0, path.length)
        leaf_distance = max(runs[k].leaf_distance for k in ("f0", "f1"))
        ok = drift <= config.tol(DRIFT_PER_LENGTH) and leaf_distance <= config.tol(LEAF_DISTANCE_TOL)
        return CheckRecord(
            name="transport.drift",
            status=Status.PASS if ok else Status.FAIL,
            max_residual=max(drift, leaf_distance),
            tolerance=config.tol(DRIFT_PER_LENGTH),
            samples=len(runs),
            details={
                "path": path.describe(),
                "length": path.length,
                "drift_per_length": drift,
                "leaf_distance": leaf_distance,
                "steps": {k: r.steps for k, r in runs.items()},
            },
        )

    #-------------------------------------------------------------------------------------
    def check_gamma_orbits(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        sizes_ok = all(len(gamma_orbit(z)) == 2 for z in SPECIAL_GAMMA_POINTS)
        generic = [complex(rng.uniform(-3, 3), rng.uniform(0.1, 3)) for _ in range(config.sweep_samples)]
        bad = [z for z in generic if len(gamma_orbit(z)) != 4]
        return CheckRecord.from_flag(
            "orbits.gamma",
            sizes_ok and not bad,
            samples=len(generic) + len(SPECIAL_GAMMA_POINTS),
            witnesses=bad[:5],
        )

    def check_klein_table(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        bases = [complex(rng.uniform(-3, 3), rng.uniform(0.2, 3)) for _ in range(config.sweep_samples)]
        bad = [x0 for x0 in bases if not is_klein_four(klein_table(x0))]
        return CheckRecord.from_flag("monodromy.klein_table", not bad, samples=len(bases), witnesses=bad[:5])

    def check_special_leaves(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        """Φ̃₀ fixes the f₀ roots, Φ̃₁ the f₁ roots, Φ̃_t the f_t roots."""
        worst = 0.0
        for _ in range(config.sweep_samples):
            x0 = complex(rng.uniform(-3, 3), rng.uniform(0.2, 3))
            maps = fiber_monodromy_maps(x0)
            r0, r1, rt = np.sqrt(1 - x0), np.sqrt(x0), np.sqrt(x0 * x0 - x0)
            leaves = {"0": (1 + r0, 1 - r0), "1": (r1, -r1), "t": (x0 + rt, x0 - rt)}
            for key, roots in leaves.items():
                for z in roots:
                    worst = max(worst, chordal_distance(maps[key](z), z))
        return CheckRecord.from_residual(
            "monodromy.special_leaves_fixed", worst, config.tol(1e-12), config.sweep_samples
        )

    def check_automorphisms(self, config: SuiteConfig, rng: np.random.Generator) -> CheckRecord:
        curve = EllipticCurve(config.t_complex)
        worst = 0.0
        for _ in range(config.sweep_samples):
            eps = curve.sample_point(rng=rng)
            for label in ("0", "1", "t"):
                back = aut_translate(label, aut_translate(label, eps, curve), curve)
                worst = max(worst, abs(complex(back.x) - complex(eps.x)) + abs(complex(back.y) - complex(eps.y)))
        return CheckRecord.from_residual(
            "automorphisms.involutions", worst, config.tol(1e-9), config.sweep_samples
        )

    def check_battery(self, results: dict, lengths: dict[str, float], config: SuiteConfig) -> CheckRecord:
        failures, worst_drift, worst_distance = [], 0.0, 0.0
        details = {}
        for name, result in results.items():
            if isinstance(result, str):
                failures.append({"loop": name, "error": result})
                continue
            path_length = max(1.0, lengths.get(name, 1.0))
            worst_drift = max(worst_drift, result.drift / path_length)
            worst_distance = max(worst_distance, result.distance)
            details[name] = {
                "label": result.label,
                "predicted": result.predicted,
                "distance": result.distance,
                "fit_residual": result.fit_residual,
                "drift": result.drift,
                "steps": result.steps,
                "rejected": result.rejected,
            }
            if result.label == OTHER:
                failures.append({"loop": name, "error": "map outside the Klein group"})
        ok = not failures and worst_drift <= config.tol(DRIFT_PER_LENGTH)
        return CheckRecord(
            name="monodromy.battery",
            status=Status.PASS if ok else Status.FAIL,
            max_residual=worst_distance,
            tolerance=config.tol(1e-6),
            samples=len(results),
            witnesses=failures,
            details={"loops": details, "max_drift_per_length": worst_drift},
        )

    def check_parity(self, results: dict) -> CheckRecord:
        """Measured labels against the winding-parity prediction."""
        measured = {n: r for n, r in results.items() if not isinstance(r, str)}
        mismatches = [
            {"loop": n, "measured": r.label, "predicted": r.predicted}
            for n, r in measured.items()
            if r.label != r.predicted
        ]
        notes = []
        if mismatches:
            notes.append(f"{len(mismatches)} loops disagree with the winding-parity labelling")
        return CheckRecord.from_flag(
            "monodromy.parity_prediction",
            not mismatches,
            samples=len(measured),
            witnesses=mismatches,
            notes=notes,
            mandatory=False,
        )

    def check_commutation(self, results: dict, config: SuiteConfig) -> CheckRecord:
        maps = self._maps(results)
        worst = 0.0
        for (_, a), (_, b) in combinations(maps.items(), 2):
            worst = max(worst, a.compose(b).distance(b.compose(a)))
        return CheckRecord.from_residual("monodromy.commutation", worst, config.tol(1e-6), len(maps))

    def check_composition(self, results: dict, config: SuiteConfig) -> CheckRecord:
        """Loops about (0, t) then (1, t) compose to the loop about (0, 1)."""
        maps = self._maps(results)
        first, second, both = (self._by_labels(maps, labels) for labels in (("0", "t"), ("1", "t"), ("0", "1")))
        residual = both.distance(second.compose(first))
        return CheckRecord.from_residual("monodromy.composition", residual, config.tol(1e-6), 3)

    def check_orbits(self, results: dict, config: SuiteConfig) -> CheckRecord:
        """Generic fiber values have orbit size 4, points on the special leaves size 2."""
        maps = list(self._maps(results).values())
        x0 = default_base(config.t_complex)
        r0, r1, rt = np.sqrt(1 - x0), np.sqrt(x0), np.sqrt(x0 * x0 - x0)
        special = {"f0": 1 + r0, "f1": r1, "ft": x0 + rt}
        sizes = {name: len(monodromy_orbit(z, maps)) for name, z in special.items()}
        sizes["generic"] = len(monodromy_orbit(2 + 0.5j, maps))
        ok = sizes["generic"] == 4 and all(sizes[k] <= 2 for k in special)
        return CheckRecord.from_flag("monodromy.orbits", ok, samples=len(sizes), details={"orbit_sizes": sizes})

    #─────────────────────────── helpers ───────────────────────────────
    @staticmethod
    def _maps(results: dict) -> dict:
        """Fitted maps of the default battery (all based at the same fiber)."""
        return {
            n: r.moebius
            for n, r in results.items()
            if n.startswith("lasso(") and not isinstance(r, str) and r.moebius is not None
        }

    @staticmethod
    def _by_labels(maps: dict, labels: tuple[str, ...]):
        name = f"lasso({','.join(labels)}) r=0.25"
        if name not in maps:
            raise KeyError(f"battery loop {name} is missing")
        return maps[name]


__all__ = ["MonodromyHandler", "SPECIAL_GAMMA_POINTS", "drift_path"]
