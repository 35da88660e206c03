"""
sampling.py – seeded randomness and the sweep runner
-----------------------------------------------------
• make_rng / spawn: every random draw in a suite descends from one
  numpy Generator seeded from the config; sub-streams are spawned per check
  so adding samples to one check never shifts another.
• parallel_map runs a picklable top-level worker over a task list, through a
  multiprocessing Pool when workers > 1 and serially otherwise; results keep
  task order either way.
"""
from __future__ import annotations

import logging
from fractions import Fraction
from multiprocessing import Pool, cpu_count
from typing import Callable, Iterable, Sequence, TypeVar

import numpy as np

from .elliptic_curve import CurvePoint, EllipticCurve
from .exact_field import ExactScalar
from .exceptions import SingularCurveError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# stream keys; the position in this tuple is the spawn key
STREAMS = (
    "identities",
    "group_law",
    "monodromy",
    "sections",
    "delta",
    "harmonic",
    "curvature",
    "pullback",
    "sweep",
    "plots",
)


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def spawn(seed: int, stream: str) -> np.random.Generator:
    """Independent generator for a named stream of the suite seed."""
    if stream not in STREAMS:
        raise KeyError(f"unknown random stream {stream!r}")
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(STREAMS.index(stream),))
    return np.random.default_rng(sequence)


def gaussian_rational(rng: np.random.Generator, bound: int = 6, denominators: Sequence[int] = (1, 2, 3, 4)):
    """Random Gaussian rational with small numerators (for exact-mode samples)."""
    d_re, d_im = (int(rng.choice(denominators)) for _ in range(2))
    re = Fraction(int(rng.integers(-bound, bound + 1)), d_re)
    im = Fraction(int(rng.integers(-bound, bound + 1)), d_im)
    return ExactScalar(re, im)


def complex_in_box(rng: np.random.Generator, box: float = 3.0) -> complex:
    return complex(rng.uniform(-box, box), rng.uniform(-box, box))


def exact_curve_point(rng: np.random.Generator, attempts: int = 100) -> tuple[EllipticCurve, CurvePoint]:
    """A curve with Gaussian-rational t through a Gaussian-rational point (u, v), v ≠ 0."""
    for _ in range(attempts):
        u, v = gaussian_rational(rng), gaussian_rational(rng)
        if u == 0 or u == 1 or v == 0:
            continue
        try:
            return EllipticCurve.through_point(u, v)
        except SingularCurveError:
            continue
    raise RuntimeError("no admissible exact sample point found")


def parallel_map(func: Callable[[T], R], tasks: Iterable[T], workers: int = 1) -> list[R]:
    """Ordered map of a top-level function, parallel when workers > 1."""
    tasks = list(tasks)
    if workers is None or workers <= 1 or len(tasks) < 2:
        return [func(task) for task in tasks]
    processes = min(workers, cpu_count(), len(tasks))
    logger.debug("running %d tasks on %d processes", len(tasks), processes)
    try:
        with Pool(processes=processes) as pool:
            return list(pool.imap(func, tasks))
    except (OSError, RuntimeError) as exc:
        logger.warning("process pool unavailable (%s); running serially", exc)
        return [func(task) for task in tasks]


__all__ = [
    "STREAMS",
    "make_rng",
    "spawn",
    "gaussian_rational",
    "complex_in_box",
    "exact_curve_point",
    "parallel_map",
]
