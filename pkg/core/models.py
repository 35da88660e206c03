"""
models.py – shared records of a verification run
------------------------------------------------
• SuiteConfig: validated run parameters (t, mode, counts, seed, tolerances,
  region, outputs).
• CheckRecord: one check's outcome with residuals, witnesses and notes.
• VerificationReport: the JSON document written by the CLI (stable schema
  version, config echo, per-check records, summary verdict).
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from .exact_field import ExactScalar, format_scalar
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
VERSION = "1.0.0"

MODES = ("numeric", "exact", "both")
PLOT_KINDS = ("leaves", "web", "discriminant", "orbits")
DEFAULT_T_SWEEP = ("2", "4", "1+i", "-3")


class Status(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


# ────────────────────────────── JSON helpers ──────────────────────────────
def jsonable(value: Any) -> Any:
    """Recursively convert to JSON-safe values; complex numbers print as "a+bi"."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (ExactScalar, complex, np.complexfloating)):
        if isinstance(value, (complex, np.complexfloating)) and math.isinf(abs(value)):
            return "inf"
        return format_scalar(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in value]
        return sorted(items, key=str) if isinstance(value, (set, frozenset)) else items
    if value is None or isinstance(value, str):
        return value
    return str(value)


# ────────────────────────────── config ────────────────────────────────────
@dataclass
class SuiteConfig:
    t: Any = 2
    mode: str = "both"
    samples: int = 500
    seed: int = 7
    tol_scale: float = 1.0
    region: tuple[float, float, float, float] = (-2.0, 3.0, -2.0, 2.0)
    out: Path | None = None
    plots: tuple[str, ...] = ()
    plot_dir: Path | None = None
    control_web: bool = False
    workers: int = 1
    curvature_points: int = 50
    delta_samples: int = 100
    group_triples: int = 100
    pullback_samples: int = 100
    sweep_samples: int = 20
    t_sweep: tuple[str, ...] = DEFAULT_T_SWEEP
    loops: tuple[str, ...] = ()

    def validate(self) -> "SuiteConfig":
        t = complex(self.t)
        if abs(t) < 1e-12 or abs(t - 1) < 1e-12:
            raise ConfigError(f"t = {format_scalar(self.t)} is excluded (the curve is singular)")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for name in ("samples", "curvature_points", "delta_samples", "group_triples",
                     "pullback_samples", "sweep_samples", "workers"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if not self.tol_scale > 0:
            raise ConfigError("tolerance scale must be positive")
        if len(self.region) != 4:
            raise ConfigError("region needs xmin,xmax,zmin,zmax")
        xmin, xmax, zmin, zmax = self.region
        if not (xmin < xmax and zmin < zmax):
            raise ConfigError(f"region {self.region} is empty")
        unknown = [p for p in self.plots if p not in PLOT_KINDS]
        if unknown:
            raise ConfigError(f"unknown plot kinds {unknown}; choose from {PLOT_KINDS}")
        return self

    @property
    def t_complex(self) -> complex:
        return complex(self.t)

    @property
    def exact_t(self) -> bool:
        return ExactScalar.is_exact(self.t)

    def tol(self, base: float) -> float:
        """A check's nominal tolerance times the configured scale."""
        return base * self.tol_scale

    def echo(self) -> dict[str, Any]:
        """Config as recorded in the report (output locations left out)."""
        data = asdict(self)
        for key in ("out", "plot_dir", "workers"):
            data.pop(key)
        return jsonable(data)


# ────────────────────────────── records ───────────────────────────────────
@dataclass
class CheckRecord:
    name: str
    status: Status
    max_residual: float | None = None
    tolerance: float | None = None
    samples: int = 0
    witnesses: list[Any] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    mandatory: bool = True
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residual(cls, name: str, residual: float, tolerance: float, samples: int, **kwargs) -> "CheckRecord":
        status = Status.PASS if residual <= tolerance else Status.FAIL
        return cls(name=name, status=status, max_residual=residual, tolerance=tolerance, samples=samples, **kwargs)

    @classmethod
    def from_flag(cls, name: str, ok: bool, samples: int = 1, **kwargs) -> "CheckRecord":
        return cls(name=name, status=Status.PASS if ok else Status.FAIL, samples=samples, **kwargs)

    @property
    def passed(self) -> bool:
        return self.status == Status.PASS

    def to_dict(self) -> dict[str, Any]:
        return jsonable(asdict(self))


@dataclass
class VerificationReport:
    config: dict[str, Any]
    seed: int
    checks: list[CheckRecord] = field(default_factory=list)
    created_at: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds"))
    schema_version: str = SCHEMA_VERSION
    version: str = VERSION

    def add(self, record: CheckRecord) -> CheckRecord:
        self.checks.append(record)
        return record

    def extend(self, records) -> None:
        for r in records:
            self.add(r)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.mandatory)

    def summary(self) -> dict[str, Any]:
        counts = {s.value: sum(1 for c in self.checks if c.status == s) for s in Status}
        failing = sorted(c.name for c in self.checks if c.mandatory and not c.passed)
        notes = sorted({n for c in self.checks for n in c.notes})
        return {"verdict": "pass" if self.passed else "fail", "counts": counts, "failing": failing,
                "notes": notes}

    def to_dict(self, include_timestamp: bool = True) -> dict[str, Any]:
        data = {
            "schema_version": self.schema_version,
            "version": self.version,
            "seed": self.seed,
            "config": self.config,
            "summary": self.summary(),
            "checks": [c.to_dict() for c in self.checks],
        }
        if include_timestamp:
            data["created_at"] = self.created_at
        return data

    def to_json(self, include_timestamp: bool = True) -> str:
        return json.dumps(self.to_dict(include_timestamp), indent=2, sort_keys=True)

    def write(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        logger.info("report written to %s", path)
        return path


__all__ = [
    "SCHEMA_VERSION",
    "VERSION",
    "MODES",
    "PLOT_KINDS",
    "DEFAULT_T_SWEEP",
    "Status",
    "jsonable",
    "SuiteConfig",
    "CheckRecord",
    "VerificationReport",
]
