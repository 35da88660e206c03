from __future__ import annotations
"""
main.py – Entry point for the S₁ web verifier
==============================================
• `python main.py verify [flags]` runs the full verification suite
• Flags override a key=value config file, which overrides the environment
• Exit codes: 0 all mandatory checks pass, 1 a check failed, 2 usage/config error

Env vars (all optional, see verifier.env.example):
    VERIFIER_T, VERIFIER_MODE, VERIFIER_SAMPLES, VERIFIER_SEED,
    VERIFIER_TOL_SCALE, VERIFIER_WORKERS, VERIFIER_REGION, VERIFIER_OUT,
    LOG_LEVEL
"""

import argparse
import logging
import sys
from typing import Sequence

from config import LOG_LEVEL, build_suite_config
from core.exceptions import ConfigError
from core.models import MODES, PLOT_KINDS
from error_handler import ErrorHandler
from suite_manager import SuiteManager

logger = logging.getLogger("MainApp")


# ────────────────────────── Logging ────────────────────────────
def setup_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
    )
    logging.getLogger().setLevel(getattr(logging, level, logging.INFO))
    logging.getLogger("matplotlib").setLevel(logging.WARNING)


# ────────────────────────── Argument parser ───────────────────
def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s1-verify",
        description="Numerical and exact verification of the stable ruled surface S₁ and its 4-web.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="run the verification suite")
    verify.add_argument("--t", help="curve parameter a+bi, t ∉ {0, 1} (use --t=-1+i for a leading minus)")
    verify.add_argument("--mode", choices=MODES, help="numeric, exact or both")
    verify.add_argument("--samples", type=int, help="sample count of the harmonic and section sweeps")
    verify.add_argument("--seed", type=int, help="suite seed")
    verify.add_argument("--tol", type=float, help="scale applied to every nominal tolerance")
    verify.add_argument("--out", help="path of the JSON report")
    verify.add_argument("--plot", action="append", choices=PLOT_KINDS, help="emit a figure (repeatable)")
    verify.add_argument("--plot-dir", help="directory for CSV/SVG figures")
    verify.add_argument("--control-web", action="store_true", default=None,
                        help="certify the non-hexagonal control web {0, 1, x+z} like a subweb")
    verify.add_argument("--region", help="sampling box xmin,xmax,zmin,zmax")
    verify.add_argument("--workers", type=int, help="processes for the parallel sweeps")
    verify.add_argument("--config", help="key=value config file")
    verify.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    return parser


def overrides_from(args: argparse.Namespace) -> dict:
    """Flag values keyed like the config file; unset flags are None."""
    return {
        "t": args.t,
        "mode": args.mode,
        "samples": args.samples,
        "seed": args.seed,
        "tol": args.tol,
        "out": args.out,
        "plots": args.plot,
        "plot_dir": args.plot_dir,
        "control_web": args.control_web,
        "region": args.region,
        "workers": args.workers,
    }


# ────────────────────────── Commands ──────────────────────────
def run_verify(args: argparse.Namespace) -> int:
    setup_logging("DEBUG" if args.verbose else LOG_LEVEL)
    config = build_suite_config(overrides_from(args), args.config)
    report = SuiteManager().run_suite(config)
    return 0 if report.passed else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help
        return 0 if exc.code in (0, None) else 2

    try:
        return run_verify(args)
    except ConfigError as exc:
        logger.error("configuration error: %s", exc)
        return ErrorHandler.exit_code_for(exc)
    except Exception as exc:  # noqa: BLE001
        logger.error("verification aborted: %r", exc, exc_info=True)
        return ErrorHandler.exit_code_for(exc)


# ────────────────────────── Local run helper ──────────────────
if __name__ == "__main__":
    sys.exit(main())
