# geometry/__init__.py

"""
Foliation and web geometry on the ruled surface.

This package exposes:
- first_integral, analyze_singularities, psi_map: the Riccati foliation and its pullback
- SectionWeb, SectionParam: the +4 sections and the 2-web they cut out
- blaschke_curvature, parallelizability_report: the 4-web certificate
- RKF45, PathSpec, integrate_leaf, loop_monodromy: leaf transport along paths
"""

from .riccati_foliation import analyze_singularities, first_integral, psi_map
from .minimal_sections import SectionParam, SectionWeb
from .web_geometry import blaschke_curvature, parallelizability_report
from .integrators import RKF45
from .leaf_transport import PathSpec, integrate_leaf, loop_monodromy

__all__ = [
    "analyze_singularities",
    "first_integral",
    "psi_map",
    "SectionParam",
    "SectionWeb",
    "blaschke_curvature",
    "parallelizability_report",
    "RKF45",
    "PathSpec",
    "integrate_leaf",
    "loop_monodromy",
]
