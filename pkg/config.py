from __future__ import annotations
"""
config.py – Environment and key=value configuration for the S₁ web verifier
---------------------------------------------------------------------------
• Defaults come from the environment (a local .env is loaded first) and are
  exported as typed module constants.
• A key=value config file (dotenv syntax) overrides them; CLI flags override
  the file. build_suite_config() merges the layers and validates the result.

Keys of the config file:
    t, mode, samples, seed, tol, workers, region, out, plots, plot_dir,
    control_web, curvature_points, delta_samples, group_triples,
    pullback_samples, sweep_samples, t_sweep, loops
"""

import os
from pathlib import Path
from typing import Any, Callable, Mapping

from dotenv import dotenv_values, load_dotenv

from core.exact_field import parse_scalar
from core.exceptions import ConfigError
from core.models import DEFAULT_T_SWEEP, SuiteConfig

load_dotenv()


def _env_int(name: str, default: str) -> int:
    raw = os.getenv(name, default)
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from exc


def _env_float(name: str, default: str) -> float:
    raw = os.getenv(name, default)
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{name} must be a number, got {raw!r}") from exc


# ────────────────────────────── environment defaults ─────────────────────
VERIFIER_T: str = os.getenv("VERIFIER_T", "2")
VERIFIER_MODE: str = os.getenv("VERIFIER_MODE", "both")
VERIFIER_SAMPLES: int = _env_int("VERIFIER_SAMPLES", "500")
VERIFIER_SEED: int = _env_int("VERIFIER_SEED", "7")
VERIFIER_TOL_SCALE: float = _env_float("VERIFIER_TOL_SCALE", "1.0")
VERIFIER_WORKERS: int = _env_int("VERIFIER_WORKERS", "1")
VERIFIER_REGION: str = os.getenv("VERIFIER_REGION", "-2,3,-2,2")
VERIFIER_OUT: str = os.getenv("VERIFIER_OUT", "report.json")
LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO").upper()


# ────────────────────────────── value parsers ────────────────────────────
def parse_region(raw: Any) -> tuple[float, float, float, float]:
    if isinstance(raw, (tuple, list)):
        values = [float(v) for v in raw]
    else:
        values = [float(v) for v in str(raw).split(",")]
    if len(values) != 4:
        raise ConfigError(f"region needs four numbers xmin,xmax,zmin,zmax, got {raw!r}")
    return tuple(values)  # type: ignore[return-value]


def parse_bool(raw: Any) -> bool:
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"expected a boolean, got {raw!r}")


def _split(sep: str) -> Callable[[Any], tuple[str, ...]]:
    def parse(raw: Any) -> tuple[str, ...]:
        if isinstance(raw, (tuple, list)):
            return tuple(str(v).strip() for v in raw if str(v).strip())
        return tuple(v.strip() for v in str(raw).split(sep) if v.strip())

    return parse


def _scalar(raw: Any):
    return parse_scalar(raw) if isinstance(raw, str) else raw


def _sweep(raw: Any) -> tuple[str, ...]:
    values = _split(",")(raw)
    for v in values:
        parse_scalar(v)
    return values


PARSERS: dict[str, tuple[str, Callable[[Any], Any]]] = {
    # file key: (SuiteConfig field, parser)
    "t": ("t", _scalar),
    "mode": ("mode", lambda raw: str(raw).strip().lower()),
    "samples": ("samples", int),
    "seed": ("seed", int),
    "tol": ("tol_scale", float),
    "workers": ("workers", int),
    "region": ("region", parse_region),
    "out": ("out", Path),
    "plots": ("plots", _split(",")),
    "plot_dir": ("plot_dir", Path),
    "control_web": ("control_web", parse_bool),
    "curvature_points": ("curvature_points", int),
    "delta_samples": ("delta_samples", int),
    "group_triples": ("group_triples", int),
    "pullback_samples": ("pullback_samples", int),
    "sweep_samples": ("sweep_samples", int),
    "t_sweep": ("t_sweep", _sweep),
    "loops": ("loops", _split("|")),
}


def environment_defaults() -> dict[str, Any]:
    return {
        "t": VERIFIER_T,
        "mode": VERIFIER_MODE,
        "samples": VERIFIER_SAMPLES,
        "seed": VERIFIER_SEED,
        "tol": VERIFIER_TOL_SCALE,
        "workers": VERIFIER_WORKERS,
        "region": VERIFIER_REGION,
        "out": VERIFIER_OUT,
        "t_sweep": ",".join(DEFAULT_T_SWEEP),
    }


def load_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Read a key=value file; unknown keys are an error."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    values = {k.strip().lower(): v for k, v in dotenv_values(path).items() if v is not None}
    unknown = sorted(set(values) - set(PARSERS))
    if unknown:
        raise ConfigError(f"unknown config keys in {path}: {', '.join(unknown)}")
    return values


def build_suite_config(
    overrides: Mapping[str, Any] | None = None,
    config_file: str | os.PathLike | None = None,
) -> SuiteConfig:
    """Environment defaults < config file < overrides (None values are skipped)."""
    layers: dict[str, Any] = environment_defaults()
    if config_file is not None:
        layers.update(load_config_file(config_file))
    for key, value in (overrides or {}).items():
        if value is not None:
            layers[key] = value

    fields: dict[str, Any] = {}
    for key, raw in layers.items():
        if key not in PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        name, parse = PARSERS[key]
        try:
            fields[name] = parse(raw)
        except ConfigError:
            raise
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"invalid value for {key}: {raw!r}") from exc
    return SuiteConfig(**fields).validate()


# ────────────────────────────── __all__ ────────────────────────────────
__all__ = [
    "VERIFIER_T",
    "VERIFIER_MODE",
    "VERIFIER_SAMPLES",
    "VERIFIER_SEED",
    "VERIFIER_TOL_SCALE",
    "VERIFIER_WORKERS",
    "VERIFIER_REGION",
    "VERIFIER_OUT",
    "LOG_LEVEL",
    "PARSERS",
    "parse_region",
    "parse_bool",
    "environment_defaults",
    "load_config_file",
    "build_suite_config",
]
