# core/__init__.py

"""
Algebra and group-level mathematics of the verifier.

This package exposes:
- ExactScalar, parse_scalar: Gaussian rationals Q(i) and the a+bi literal parser
- MultiPoly, reduce_mod_curve: sparse polynomials in (x, y, z, t) and reduction by the curve
- identity_check, IDENTITIES, TYPO_PROBES: the exact identity catalog
- EllipticCurve, CurvePoint: the group law on y² = x(x−1)(x−t)
- MoebiusMap, cross_ratio, gamma_orbit, fiber_monodromy_maps: fiber dynamics on P¹
- SuiteConfig, CheckRecord, VerificationReport: shared records of a run
"""

# Algebra kernel
from .exact_field import ExactScalar, I, format_scalar, parse_scalar
from .multipoly import MultiPoly, poly_eval, poly_normalize, reduce_mod_curve
from .identity_catalog import IDENTITIES, TYPO_PROBES, identity_check

# Curve and fiber dynamics
from .elliptic_curve import INFINITY, CurvePoint, EllipticCurve
from .moebius import INF, MoebiusMap, cross_ratio, fiber_monodromy_maps, gamma_orbit

# Records, errors, randomness
from .models import CheckRecord, Status, SuiteConfig, VerificationReport
from .exceptions import ConfigError, VerifierError
from .sampling import parallel_map, spawn

# Public API
__all__ = [
    "ExactScalar",
    "I",
    "format_scalar",
    "parse_scalar",
    "MultiPoly",
    "poly_eval",
    "poly_normalize",
    "reduce_mod_curve",
    "IDENTITIES",
    "TYPO_PROBES",
    "identity_check",
    "INFINITY",
    "CurvePoint",
    "EllipticCurve",
    "INF",
    "MoebiusMap",
    "cross_ratio",
    "fiber_monodromy_maps",
    "gamma_orbit",
    "CheckRecord",
    "Status",
    "SuiteConfig",
    "VerificationReport",
    "ConfigError",
    "VerifierError",
    "parallel_map",
    "spawn",
]
