from __future__ import annotations
"""
exceptions.py – error types raised by the verifier
---------------------------------------------------
• VerifierError is the common root; ConfigError is the only one that maps
  to a usage exit code (2).
• Value-style errors also derive from ValueError so plain callers can
  keep catching the builtin.
"""


class VerifierError(Exception):
    """Base class for every error raised inside the verifier."""


class ConfigError(VerifierError, ValueError):
    """Invalid configuration or CLI usage."""


# ────────────────────────────── algebra ──────────────────────────────
class UnassignedVariableError(VerifierError, KeyError):
    """poly_eval was called without a value for a variable that occurs."""


class NotExactError(VerifierError, ValueError):
    """An exact-mode operation needed a value outside the Gaussian rationals."""


# ────────────────────────────── geometry ─────────────────────────────
class SingularCurveError(VerifierError, ValueError):
    """t lies in {0, 1}; the cubic has a repeated root."""


class PoleError(VerifierError, ValueError):
    """A rational function was evaluated on its polar locus."""


class IndeterminatePointError(VerifierError, ValueError):
    """Numerator and denominator vanish together (base point of a pencil)."""


class DegenerateQuadrupleError(VerifierError, ValueError):
    """Cross-ratio requested for a quadruple with a repeated point."""


class DegenerateFiberError(VerifierError, ValueError):
    """Fiber monodromy requested over a singular fiber x in {0, 1}."""


class InconsistentSectionError(VerifierError, ValueError):
    """A recovered section parameter does not lie on the curve."""


class DegenerateWebError(VerifierError, ValueError):
    """Two slopes of a 3-web (nearly) coincide at the evaluation point."""


# ────────────────────────────── numerics ─────────────────────────────
class ClearanceError(VerifierError, ValueError):
    """A path comes closer to a branch point than the clearance radius."""


class OpenLoopError(VerifierError, ValueError):
    """Monodromy requested for a path that does not close on the curve."""


class StepSizeCollapseError(VerifierError, RuntimeError):
    """The adaptive integrator could not satisfy its tolerance."""


class FitResidualError(VerifierError, RuntimeError):
    """A fitted Moebius map does not reproduce its validation tracer."""


class PlotOutputError(VerifierError, OSError):
    """A figure could not be written."""


__all__ = [
    "VerifierError",
    "ConfigError",
    "UnassignedVariableError",
    "NotExactError",
    "SingularCurveError",
    "PoleError",
    "IndeterminatePointError",
    "DegenerateQuadrupleError",
    "DegenerateFiberError",
    "InconsistentSectionError",
    "DegenerateWebError",
    "ClearanceError",
    "OpenLoopError",
    "StepSizeCollapseError",
    "FitResidualError",
    "PlotOutputError",
]
