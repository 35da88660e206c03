# plot_handler.py
#──────────────────────────────────────────────────────────────────────────
from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from core.elliptic_curve import CurvePoint, EllipticCurve  # noqa: E402
from core.exceptions import PlotOutputError, VerifierError  # noqa: E402
from core.models import PLOT_KINDS, SuiteConfig  # noqa: E402
from core.moebius import gamma_orbit, is_infinite  # noqa: E402
from geometry.leaf_transport import PathSpec, integrate_leaf  # noqa: E402
from geometry.minimal_sections import SectionWeb  # noqa: E402
from geometry.riccati_foliation import f0, ft  # noqa: E402

# fixed ids inside the SVG so equal inputs give equal files
matplotlib.rcParams["svg.hashsalt"] = "s1-web-verifier"
matplotlib.rcParams["svg.fonttype"] = "none"

GRID = 121
LEAF_STEPS = 40
LEAF_SEEDS = (-1.5, -0.75, -0.25, 0.25, 0.75, 1.5)
# real x-intervals that stay clear of the singular fibers x = 0 and x = 1
LEAF_INTERVALS = ((-1.9, -0.1), (0.1, 0.9), (1.1, 2.9))
WEB_MARK = (0.5, 0.3)
ORBIT_SEEDS = 5
SINGULAR_GAP = 1e-3


def _finite(value) -> complex:
    if value is None or is_infinite(value):
        return complex(np.nan, np.nan)
    return complex(value)


def _continued_roots(values: np.ndarray, previous: np.ndarray | None) -> np.ndarray:
    """Reorder a root set to stay close to the previous one."""
    if previous is None or np.any(np.isnan(previous)):
        return np.array(sorted(values, key=lambda r: (round(r.real, 9), r.imag)))
    remaining = list(values)
    ordered = []
    for p in previous:
        k = int(np.argmin([abs(r - p) if not np.isnan(r) else np.inf for r in remaining]))
        ordered.append(remaining.pop(k))
    return np.array(ordered)


class PlotHandler:
    """
    Static figures of the surface
    ─────────────────────────────────────────────────────────
    • leaves       – level sets of F, the conics f₀, f₁, f_t and integrated leaves
    • discriminant – the four roots of Δ(u, ·) along a real u sweep
    • web          – the two +4 sections through a marked point, with Δ
    • orbits       – ⟨−z, 1/z⟩ orbits of a seed grid
    Every kind writes <kind>.csv (columns in a header comment) and a
    standalone <kind>.svg.
    """

    def __init__(self, out_dir: Path | str = "plots") -> None:
        self.out_dir = Path(out_dir)
        self.logger = logging.getLogger(self.__class__.__name__)

    #───────────────────────────── PUBLIC ──────────────────────────────
    def emit_plot(self, kind: str, config: SuiteConfig) -> list[Path]:
        if kind not in PLOT_KINDS:
            raise ValueError(f"unknown plot kind {kind!r}; choose from {PLOT_KINDS}")
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise PlotOutputError(f"cannot create plot directory {self.out_dir}: {exc}") from exc

        header, rows, figure = getattr(self, f"_{kind}")(config)
        csv_path, svg_path = self.out_dir / f"{kind}.csv", self.out_dir / f"{kind}.svg"
        try:
            np.savetxt(csv_path, rows, delimiter=",", fmt="%.12g", header=header, comments="# ")
            figure.savefig(svg_path, format="svg", metadata={"Date": None})
        except OSError as exc:
            raise PlotOutputError(f"cannot write {kind} plot to {self.out_dir}: {exc}") from exc
        finally:
            plt.close(figure)
        self.logger.info("plot %-12s → %s, %s", kind, csv_path, svg_path)
        return [csv_path, svg_path]

    #-------------------------------------------------------------------------------------
    def _leaves(self, config: SuiteConfig):
        xmin, xmax, zmin, zmax = config.region
        xs = np.linspace(xmin, xmax, GRID)
        zs = np.linspace(zmin, zmax, GRID)
        X, Z = np.meshgrid(xs, zs)
        with np.errstate(divide="ignore", invalid="ignore"):
            F = X * f0(X, Z) ** 2 / ft(X, Z) ** 2

        fig, ax = plt.subplots(figsize=(7, 5))
        levels = [-4, -1, -0.25, 0.25, 0.5, 2, 4]
        ax.contour(X, Z, np.where(np.isfinite(F), F, np.nan), levels=levels, colors="0.8", linewidths=0.6)

        rows = []
        with np.errstate(invalid="ignore"):
            conics = {
                0: (1 + np.sqrt(1 - xs), 1 - np.sqrt(1 - xs)),
                1: (np.sqrt(xs), -np.sqrt(xs)),
                2: (xs + np.sqrt(xs * xs - xs), xs - np.sqrt(xs * xs - xs)),
            }
        styles = {0: ("tab:blue", "f₀ (F = 0)"), 1: ("tab:green", "f₁ (F = 1)"), 2: ("tab:red", "f_t (F = ∞)")}
        for kind, branches in conics.items():
            color, label = styles[kind]
            for b, zb in enumerate(branches):
                ax.plot(xs, zb, color=color, linewidth=1.4, label=label if b == 0 else None)
                rows += [(kind, b, x, z) for x, z in zip(xs, zb)]

        leaf_id = 0
        for lo, hi in LEAF_INTERVALS:
            lo, hi = max(lo, xmin), min(hi, xmax)
            if hi - lo < 0.2:
                continue
            grid = np.linspace(lo, hi, LEAF_STEPS)
            for seed in LEAF_SEEDS:
                path = self._trace_leaf(grid, seed)
                ax.plot(grid, path, color="0.3", linestyle=":", linewidth=0.9)
                rows += [(3, leaf_id, x, z) for x, z in zip(grid, path)]
                leaf_id += 1

        ax.set_xlim(xmin, xmax)
        ax.set_ylim(zmin, zmax)
        ax.set_xlabel("x")
        ax.set_ylabel("z")
        ax.set_title("Riccati leaves and the special conics")
        ax.legend(loc="upper right", fontsize=8)
        header = "kind,branch,x,z\nkind: 0 = f0, 1 = f1, 2 = ft, 3 = integrated leaf; nan where not real"
        return header, np.array(rows, dtype=float), fig

    def _trace_leaf(self, grid: np.ndarray, seed: float) -> np.ndarray:
        """Real leaf through (grid[0], seed), one short segment at a time."""
        values = [seed]
        z, stopped = complex(seed), False
        for a, b in zip(grid[:-1], grid[1:]):
            if stopped:
                values.append(np.nan)
                continue
            try:
                z = integrate_leaf(PathSpec.polyline([complex(a), complex(b)]), z).end
            except VerifierError as exc:
                self.logger.debug("leaf from %s stopped at x = %s: %s", seed, a, exc)
                values.append(np.nan)
                stopped = True
                continue
            values.append(np.nan if is_infinite(z) else complex(z).real)
        return np.array(values, dtype=float)

    def _discriminant(self, config: SuiteConfig):
        xmin, xmax, _, _ = config.region
        t = config.t_complex
        web = SectionWeb(EllipticCurve(t))
        rows, previous = [], None
        for u in np.linspace(xmin, xmax, GRID):
            if min(abs(u), abs(u - 1), abs(u - t)) < SINGULAR_GAP:
                continue
            roots = np.array([_finite(r) for r in web.delta_roots(complex(u))])
            roots = _continued_roots(roots, previous)
            previous = roots
            rows.append([u, *np.real(roots), *np.imag(roots)])
        data = np.array(rows, dtype=float)

        fig, (ax_re, ax_im) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
        for k in range(4):
            ax_re.plot(data[:, 0], data[:, 1 + k], linewidth=1.0, label=f"root {k + 1}")
            ax_im.plot(data[:, 0], data[:, 5 + k], linewidth=1.0)
        ax_re.set_ylabel("Re z")
        ax_im.set_ylabel("Im z")
        ax_im.set_xlabel("u")
        ax_re.set_title(f"roots of Δ(u, ·), t = {config.t}")
        ax_re.legend(loc="upper right", fontsize=8)
        header = "u,re1,re2,re3,re4,im1,im2,im3,im4\nthe four roots of Delta(u, z) in z, continued along the sweep"
        return header, data, fig

    def _web(self, config: SuiteConfig):
        xmin, xmax, zmin, zmax = config.region
        t = config.t_complex
        curve = EllipticCurve(t)
        web = SectionWeb(curve)
        u0, z0 = WEB_MARK
        v0 = complex(np.sqrt(complex(curve.cubic(u0))))
        solved = web.sections_through(complex(u0), v0, complex(z0))

        xs = np.linspace(xmin, xmax, GRID)
        ys = self._continued_y(curve, xs, u0, v0)
        rows = []
        for x, y in zip(xs, ys):
            values = []
            for s in solved.sections:
                try:
                    values.append(_finite(web.section_value(s, CurvePoint(complex(x), y))))
                except VerifierError:
                    values.append(complex(np.nan, np.nan))
            if np.isnan(y) or min(abs(x), abs(x - 1), abs(x - t)) < SINGULAR_GAP:
                delta = [np.nan] * 4
            else:
                delta = sorted(_finite(r).real for r in web.delta_roots(complex(x)))
            rows.append([x, values[0].real, values[0].imag, values[1].real, values[1].imag, *delta])
        data = np.array(rows, dtype=float)

        fig, ax = plt.subplots(figsize=(7, 5))
        for k in range(4):
            ax.plot(data[:, 0], data[:, 5 + k], color="0.75", linewidth=0.8, label="Δ = 0" if k == 0 else None)
        ax.plot(data[:, 0], data[:, 1], color="tab:blue", linewidth=1.4, label="section 1")
        ax.plot(data[:, 0], data[:, 3], color="tab:orange", linewidth=1.4, label="section 2")
        ax.plot([u0], [z0], "ko", zorder=3)
        ax.set_xlim(xmin, xmax)
        ax.set_ylim(zmin, zmax)
        ax.set_xlabel("x")
        ax.set_ylabel("Re z")
        ax.set_title(f"sections through ({u0}, {z0}), t = {config.t}")
        ax.legend(loc="upper right", fontsize=8)
        header = (
            "x,s1_re,s1_im,s2_re,s2_im,delta1_re,delta2_re,delta3_re,delta4_re\n"
            f"sections through the marked point u = {u0}, z = {z0}; delta columns are sorted real parts"
        )
        return header, data, fig

    @staticmethod
    def _continued_y(curve: EllipticCurve, xs: np.ndarray, u0: float, v0: complex) -> list[complex]:
        """y along the real x sweep, branch chosen by continuity from (u0, v0)."""
        start = int(np.argmin(np.abs(xs - u0)))
        ys: list[complex] = [0j] * len(xs)
        ys[start] = complex(np.sqrt(complex(curve.cubic(complex(xs[start])))))
        if abs(ys[start] - v0) > abs(ys[start] + v0):
            ys[start] = -ys[start]
        for order in (range(start + 1, len(xs)), range(start - 1, -1, -1)):
            previous = ys[start]
            for k in order:
                y = complex(np.sqrt(complex(curve.cubic(complex(xs[k])))))
                y = y if abs(y - previous) <= abs(y + previous) else -y
                ys[k] = previous = y
        return ys

    def _orbits(self, config: SuiteConfig):
        xmin, xmax, zmin, zmax = config.region
        rows = []
        fig, ax = plt.subplots(figsize=(6, 6))
        seeds = [
            complex(a, b)
            for a in np.linspace(xmin, xmax, ORBIT_SEEDS)
            for b in np.linspace(zmin, zmax, ORBIT_SEEDS)
        ]
        for k, seed in enumerate(seeds):
            orbit = [_finite(z) for z in gamma_orbit(seed)]
            rows += [(k, seed.real, seed.imag, z.real, z.imag) for z in orbit]
            ax.scatter([z.real for z in orbit], [z.imag for z in orbit], s=10)
        ax.axhline(0, color="0.85", linewidth=0.6)
        ax.axvline(0, color="0.85", linewidth=0.6)
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("Re z")
        ax.set_ylabel("Im z")
        ax.set_title("orbits of ⟨−z, 1/z⟩")
        header = "seed,seed_re,seed_im,orbit_re,orbit_im\none row per orbit element; nan marks z = infinity"
        return header, np.array(rows, dtype=float), fig


def emit_plot(kind: str, config: SuiteConfig, out_dir: Path | str | None = None) -> list[Path]:
    return PlotHandler(out_dir or config.plot_dir or "plots").emit_plot(kind, config)


__all__ = ["PlotHandler", "emit_plot"]
