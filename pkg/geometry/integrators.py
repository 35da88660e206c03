"""Embedded Runge–Kutta–Fehlberg 4(5) integrator for complex scalar ODEs."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from core.exceptions import StepSizeCollapseError

Rhs = Callable[[float, complex], complex]
StepHook = Callable[[float, complex], Optional[tuple[Rhs, complex]]]


@dataclass
class IntegrationResult:
    y: complex
    rhs: Rhs
    steps: int
    rejected: int
    min_step: float


class RKF45:
    """
    Fehlberg pair with local extrapolation (the 5th-order weights propagate).

    The parameter s is real; the state is a complex number. After every
    accepted step an optional hook may replace the right-hand side and the
    state, which is how projective chart switches are done.

    With per_unit_step the local error is held below tol·|h|/|span|, so the
    errors summed over the whole interval stay below tol.
    """

    eval_stages = (0.0, 1 / 4, 3 / 8, 12 / 13, 1.0, 1 / 2)

    BT = (
        (1 / 4,),
        (3 / 32, 9 / 32),
        (1932 / 2197, -7200 / 2197, 7296 / 2197),
        (439 / 216, -8.0, 3680 / 513, -845 / 4104),
        (-8 / 27, 2.0, -3544 / 2565, 1859 / 4104, -11 / 40),
    )

    # 4th-order weights and the 5th-minus-4th difference used for the error
    B4 = (25 / 216, 0.0, 1408 / 2565, 2197 / 4104, -1 / 5, 0.0)
    TR = (1 / 360, 0.0, -128 / 4275, -2197 / 75240, 1 / 50, 2 / 55)

    def __init__(
        self,
        rtol: float = 1e-10,
        atol: float = 1e-13,
        safety: float = 0.9,
        max_steps: int = 200_000,
        min_step_ratio: float = 1e-14,
        per_unit_step: bool = False,
    ):
        self.rtol = rtol
        self.atol = atol
        self.safety = safety
        self.max_steps = max_steps
        self.min_step_ratio = min_step_ratio
        self.per_unit_step = per_unit_step
        self.exponent = -0.25 if per_unit_step else -0.2
        self.b5 = tuple(b + e for b, e in zip(self.B4, self.TR))
        self.logger = logging.getLogger(self.__class__.__name__)

    #-----------------------------------------------------------------------------------------
    def attempt(self, f: Rhs, s: float, y: complex, h: float) -> tuple[complex, float]:
        """One trial step: (5th-order value, local error magnitude)."""
        k = [f(s, y)]
        for row, c in zip(self.BT, self.eval_stages[1:]):
            yi = y + h * sum(a * kj for a, kj in zip(row, k))
            k.append(f(s + c * h, yi))
        y_new = y + h * sum(b * kj for b, kj in zip(self.b5, k))
        err = abs(h * sum(e * kj for e, kj in zip(self.TR, k)))
        return y_new, err

    #-----------------------------------------------------------------------------------------
    def solve(
        self,
        f: Rhs,
        s0: float,
        s1: float,
        y0: complex,
        *,
        h0: float | None = None,
        on_step: StepHook | None = None,
    ) -> IntegrationResult:
        span = s1 - s0
        if span == 0:
            return IntegrationResult(y=y0, rhs=f, steps=0, rejected=0, min_step=0.0)

        s, y = s0, complex(y0)
        h = h0 if h0 is not None else 0.01 * span
        min_step = abs(span) * self.min_step_ratio
        steps = rejected = 0
        smallest = abs(h)

        while abs(s1 - s) > 1e-15 * abs(span):
            if steps + rejected > self.max_steps:
                raise StepSizeCollapseError(f"more than {self.max_steps} steps between s={s0} and s={s1}")
            if abs(h) > abs(s1 - s):
                h = s1 - s
            y_new, err = self.attempt(f, s, y, h)
            if not np.isfinite(err) or not np.isfinite(abs(y_new)):
                ratio = float("inf")
            else:
                scale = self.atol + self.rtol * max(abs(y), abs(y_new))
                if self.per_unit_step:
                    scale *= abs(h) / abs(span)
                ratio = err / scale

            if ratio <= 1.0:
                s += h
                y = y_new
                steps += 1
                smallest = min(smallest, abs(h))
                if on_step is not None:
                    replacement = on_step(s, y)
                    if replacement is not None:
                        f, y = replacement
            else:
                rejected += 1

            factor = 5.0 if ratio == 0 else min(5.0, max(0.2, self.safety * ratio ** self.exponent))
            h *= factor
            if abs(h) < min_step:
                raise StepSizeCollapseError(f"step size collapsed to {abs(h):.3e} at s={s:.6f}")

        return IntegrationResult(y=y, rhs=f, steps=steps, rejected=rejected, min_step=smallest)


__all__ = ["RKF45", "IntegrationResult"]
