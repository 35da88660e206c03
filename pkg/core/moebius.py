"""
moebius.py – Möbius maps, cross-ratios and the small groups acting on fibers
-----------------------------------------------------------------------------
• MoebiusMap stores a 2×2 complex matrix normalized to unit Frobenius norm
  with a fixed phase; projective distance is the phase-minimized Frobenius
  distance.
• Points of P¹ are Python complex numbers, ∞ being INF (complex("inf")).
• Covers the dihedral group ⟨−z, 1/z⟩, its orbits, the fiber monodromy
  maps Φ̃ᵢ(x₀) of the Riccati foliation and their Klein-four table.
"""
from __future__ import annotations

import cmath
import logging
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DegenerateFiberError, DegenerateQuadrupleError

logger = logging.getLogger(__name__)

INF = complex("inf")

# labels of the fiber monodromy / automorphism classes
IDENTITY, PHI_0, PHI_1, PHI_T, OTHER = "id", "Phi0", "Phi1", "Phit", "other"
TORSION_LABEL = {"inf": IDENTITY, "0": PHI_0, "1": PHI_1, "t": PHI_T}


def is_infinite(z) -> bool:
    return cmath.isinf(complex(z))


def same_point(a, b, tol: float = 1e-12) -> bool:
    """Equality on P¹ measured in whichever chart keeps both values small."""
    if is_infinite(a) or is_infinite(b):
        if is_infinite(a) and is_infinite(b):
            return True
        finite = b if is_infinite(a) else a
        return abs(complex(finite)) > 1 / tol
    a, b = complex(a), complex(b)
    if abs(a) > 1 and abs(b) > 1:
        return abs(1 / a - 1 / b) <= tol
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def chordal_distance(a, b) -> float:
    """Chordal metric on P¹ (bounded by 1)."""
    if is_infinite(a) and is_infinite(b):
        return 0.0
    if is_infinite(a):
        return 1 / np.sqrt(1 + abs(complex(b)) ** 2)
    if is_infinite(b):
        return 1 / np.sqrt(1 + abs(complex(a)) ** 2)
    a, b = complex(a), complex(b)
    return abs(a - b) / (np.sqrt(1 + abs(a) ** 2) * np.sqrt(1 + abs(b) ** 2))


def homogeneous(z) -> np.ndarray:
    """A homogeneous representative, scaled so the larger entry is 1."""
    if is_infinite(z):
        return np.array([1.0 + 0j, 0j])
    z = complex(z)
    if abs(z) > 1:
        return np.array([1.0 + 0j, 1 / z])
    return np.array([z, 1.0 + 0j])


def from_homogeneous(v: Sequence[complex]) -> complex:
    top, bottom = complex(v[0]), complex(v[1])
    if bottom == 0 or abs(bottom) <= 1e-300 * max(1.0, abs(top)):
        return INF
    return top / bottom


class MoebiusMap:
    """Projective class of an invertible 2×2 complex matrix."""

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex).reshape(2, 2)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        norm = np.linalg.norm(m)
        if norm == 0 or abs(det) <= 1e-14 * norm * norm:
            raise ValueError("Moebius matrix must be invertible")
        m = m / norm
        flat = m.ravel()
        moduli = np.abs(flat)
        k = int(np.argmax(moduli >= (1 - 1e-9) * moduli.max()))
        m = m * (abs(flat[k]) / flat[k])
        self.matrix = m

    # ────────────────────────────── constructors ─────────────────────────
    @classmethod
    def from_entries(cls, a, b, c, d) -> "MoebiusMap":
        return cls([[a, b], [c, d]])

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(np.eye(2))

    @classmethod
    def to_zero_one_infinity(cls, p1, p2, p3) -> "MoebiusMap":
        """Map p1 → 0, p2 → 1, p3 → ∞ (any of them may be ∞)."""
        h1, h2, h3 = homogeneous(p1), homogeneous(p2), homogeneous(p3)

        def functional(h):  # v ↦ det[v, h], vanishing at h
            return np.array([h[1], -h[0]])

        l1, l3 = functional(h1), functional(h3)
        k3, k1 = l3 @ h2, l1 @ h2
        if abs(k3) < 1e-300 or abs(k1) < 1e-300:
            raise DegenerateQuadrupleError("three-point map needs distinct points")
        return cls(np.vstack([k3 * l1, k1 * l3]))

    @classmethod
    def from_three_points(cls, sources: Sequence, targets: Sequence) -> "MoebiusMap":
        """The unique map sending sources[k] → targets[k] for k = 0, 1, 2."""
        ts = cls.to_zero_one_infinity(*sources)
        tt = cls.to_zero_one_infinity(*targets)
        return tt.inverse().compose(ts)

    # ────────────────────────────── algebra ──────────────────────────────
    def apply(self, z) -> complex:
        return from_homogeneous(self.matrix @ homogeneous(z))

    __call__ = apply

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self ∘ other."""
        return MoebiusMap(self.matrix @ other.matrix)

    __matmul__ = compose

    def inverse(self) -> "MoebiusMap":
        (a, b), (c, d) = self.matrix
        return MoebiusMap([[d, -b], [-c, a]])

    def distance(self, other: "MoebiusMap") -> float:
        inner = np.vdot(other.matrix, self.matrix)
        phase = inner / abs(inner) if abs(inner) > 0 else 1.0
        return float(np.linalg.norm(self.matrix - phase * other.matrix))

    def equals(self, other: "MoebiusMap", tol: float = 1e-10) -> bool:
        return self.distance(other) < tol

    def fixed_points(self) -> list[complex]:
        (a, b), (c, d) = self.matrix
        if abs(c) < 1e-14:
            return [INF] if abs(a - d) < 1e-14 else [INF, b / (d - a)]
        disc = np.sqrt(complex((a - d) ** 2 + 4 * b * c))
        return [((a - d) - disc) / (2 * c), ((a - d) + disc) / (2 * c)]

    def __repr__(self) -> str:
        (a, b), (c, d) = np.round(self.matrix, 12)
        return f"MoebiusMap([[{a}, {b}], [{c}, {d}]])"


# ────────────────────────────── cross-ratio ──────────────────────────────
def cross_ratio(a, b, c, d) -> complex:
    """((a−c)(b−d)) / ((a−d)(b−c)) with limits at ∞."""
    pts = (a, b, c, d)
    for i in range(4):
        for j in range(i + 1, 4):
            if same_point(pts[i], pts[j], 1e-14):
                raise DegenerateQuadrupleError(f"repeated point in cross-ratio: {pts}")
    if is_infinite(a):
        return (b - d) / (b - c)
    if is_infinite(b):
        return (a - c) / (a - d)
    if is_infinite(c):
        return (b - d) / (a - d)
    if is_infinite(d):
        return (a - c) / (b - c)
    return ((a - c) * (b - d)) / ((a - d) * (b - c))


HARMONIC_ORBIT = (-1.0 + 0j, 2.0 + 0j, 0.5 + 0j)


# ────────────────────────────── ⟨−z, 1/z⟩ ────────────────────────────────
GAMMA_GROUP: dict[str, MoebiusMap] = {
    "id": MoebiusMap.identity(),
    "neg": MoebiusMap.from_entries(-1, 0, 0, 1),
    "inv": MoebiusMap.from_entries(0, 1, 1, 0),
    "neg_inv": MoebiusMap.from_entries(0, -1, 1, 0),
}


def dedupe_points(points: Iterable, tol: float = 1e-12) -> list[complex]:
    unique: list[complex] = []
    for p in points:
        if not any(same_point(p, q, tol) for q in unique):
            unique.append(p)
    return unique


def gamma_orbit(z, tol: float = 1e-12) -> list[complex]:
    return dedupe_points((g.apply(z) for g in GAMMA_GROUP.values()), tol)


# ────────────────────────────── fiber maps Φ̃ᵢ ─────────────────────────────
def fiber_monodromy_maps(x0) -> dict[str, MoebiusMap]:
    """Φ̃ᵢ on the fiber over x₀, keyed by 2-torsion label inf, 0, 1, t."""
    x0 = complex(x0)
    if abs(x0) < 1e-12 or abs(x0 - 1) < 1e-12:
        raise DegenerateFiberError(f"x0 = {x0} is a singular fiber")
    return {
        "inf": MoebiusMap.identity(),
        "0": MoebiusMap.from_entries(1, -x0, 1, -1),
        "1": MoebiusMap.from_entries(0, x0, 1, 0),
        "t": MoebiusMap.from_entries(x0, -x0, 1, -x0),
    }


def classify_moebius(m: MoebiusMap, x0, tol: float = 1e-6) -> str:
    best_label, best = OTHER, float("inf")
    for key, candidate in fiber_monodromy_maps(x0).items():
        d = m.distance(candidate)
        if d < best:
            best_label, best = TORSION_LABEL[key], d
    return best_label if best < tol else OTHER


def klein_table(x0) -> dict[tuple[str, str], str]:
    """Composition table of {Φ̃ᵢ(x₀)} as classified labels."""
    maps = {TORSION_LABEL[k]: m for k, m in fiber_monodromy_maps(x0).items()}
    return {(a, b): classify_moebius(ma.compose(mb), x0) for a, ma in maps.items() for b, mb in maps.items()}


def is_klein_four(table: dict[tuple[str, str], str]) -> bool:
    labels = {a for a, _ in table}
    if OTHER in table.values() or len(labels) != 4:
        return False
    for a in labels:
        if table[(a, a)] != IDENTITY or table[(IDENTITY, a)] != a:
            return False
        for b in labels:
            if table[(a, b)] != table[(b, a)]:
                return False
    return True


def aut_translate(label: str, eps, curve):
    """ε ↦ ε ⊕ pᵢ for a 2-torsion label in {inf, 0, 1, t}."""
    return curve.add(eps, curve.two_torsion()[label])


__all__ = [
    "INF",
    "IDENTITY",
    "PHI_0",
    "PHI_1",
    "PHI_T",
    "OTHER",
    "TORSION_LABEL",
    "is_infinite",
    "same_point",
    "chordal_distance",
    "homogeneous",
    "from_homogeneous",
    "MoebiusMap",
    "cross_ratio",
    "HARMONIC_ORBIT",
    "GAMMA_GROUP",
    "dedupe_points",
    "gamma_orbit",
    "fiber_monodromy_maps",
    "classify_moebius",
    "klein_table",
    "is_klein_four",
    "aut_translate",
]
