"""
Explicit adaptive Runge-Kutta integration.

ExplicitRungeKutta holds the stepping loop and the step-size controller;
subclasses only provide the extended Butcher table (BT), the stage nodes
and the embedded error weights (TR).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, ClassVar, Optional

import numpy as np

from electrovac.shared.utils import InvalidParameterError, NonFiniteResultError, StepFailureError, logger


RHS = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class IntegrationResult:
    t: np.ndarray
    y: np.ndarray
    error_ratios: np.ndarray
    accepted: int
    rejected: int
    stopped_early: bool = False
    stop_reason: Optional[str] = None


@dataclass
class StepControl:
    rtol: float = 1e-10
    atol: float = 1e-12
    safety: float = 0.9
    min_factor: float = 0.2
    max_factor: float = 5.0
    max_steps: int = 100_000
    first_step: Optional[float] = None
    min_step: float = 1e-14


class ExplicitRungeKutta:
    """Base class of embedded explicit pairs."""

    s: ClassVar[int] = 0
    order: ClassVar[int] = 0
    eval_stages: ClassVar[tuple[float, ...]] = ()
    BT: ClassVar[tuple[tuple[float, ...], ...]] = ()
    TR: ClassVar[tuple[float, ...]] = ()

    def __init__(self, control: Optional[StepControl] = None):
        self.control = control or StepControl()
        c = self.control
        if c.rtol <= 0 and c.atol <= 0:
            raise InvalidParameterError("need rtol > 0 or atol > 0")

    def stages(self, rhs: RHS, t: float, y: np.ndarray, h: float) -> list[np.ndarray]:
        K = [np.asarray(rhs(t, y), dtype=float)]
        for i in range(self.s - 1):
            increment = sum(a * k for a, k in zip(self.BT[i], K) if a != 0.0)
            K.append(np.asarray(rhs(t + self.eval_stages[i + 1] * h, y + h * increment), dtype=float))
        return K

    def step(self, rhs: RHS, t: float, y: np.ndarray, h: float) -> tuple[np.ndarray, float]:
        """One trial step; returns (proposal, scaled error ratio)."""
        K = self.stages(rhs, t, y, h)
        weights = self.BT[self.s - 1]
        y_new = y + h * sum(b * k for b, k in zip(weights, K) if b != 0.0)
        err = h * sum(e * k for e, k in zip(self.TR, K) if e != 0.0)
        if not np.all(np.isfinite(y_new)) or not np.all(np.isfinite(err)):
            raise NonFiniteResultError(f"non-finite Runge-Kutta stage at t={t}")
        scale = self.control.atol + self.control.rtol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = float(np.sqrt(np.mean((err / scale) ** 2)))
        return y_new, ratio

    def factor(self, ratio: float) -> float:
        c = self.control
        if ratio == 0.0:
            return c.max_factor
        return min(c.max_factor, max(c.min_factor, c.safety * ratio ** (-1.0 / self.order)))

    def integrate(
        self,
        rhs: RHS,
        t0: float,
        y0,
        t_end: float,
        max_step: Optional[Callable[[float], float]] = None,
        monitor: Optional[Callable[[float, np.ndarray], Optional[str]]] = None,
    ) -> IntegrationResult:
        """
        Integrate y' = rhs(t, y) from t0 to t_end (either direction).

        Args:
            rhs: Right-hand side.
            t0: Initial time.
            y0: Initial state.
            t_end: Final time.
            max_step: Optional bound on |h| as a function of t.
            monitor: Called after each accepted step; a non-None return
                     stops the integration with that reason.

        Returns:
            IntegrationResult with every accepted step.

        Raises:
            StepFailureError: Step size underflow or step budget exhausted.
        """
        c = self.control
        y = np.array(y0, dtype=float)
        direction = 1.0 if t_end >= t0 else -1.0
        span = abs(t_end - t0)
        ts, ys, ratios = [t0], [y.copy()], [0.0]
        if span == 0.0:
            return IntegrationResult(np.array(ts), np.array(ys), np.array(ratios), 0, 0)

        h = c.first_step if c.first_step is not None else span / 100.0
        h = min(abs(h), span)
        t = t0
        accepted = rejected = 0

        while direction * (t_end - t) > 0.0:
            if accepted + rejected >= c.max_steps:
                raise StepFailureError(f"step budget {c.max_steps} exhausted at t={t:.12g}")
            remaining = abs(t_end - t)
            bound = max_step(t) if max_step is not None else np.inf
            h = min(h, bound)
            # absorb a rounding sliver into the final step
            if h >= remaining - c.min_step * max(1.0, abs(t_end)):
                h = remaining
            if h < c.min_step * max(1.0, abs(t)):
                raise StepFailureError(f"step size {h:.3e} underflow at t={t:.12g}")

            y_new, ratio = self.step(rhs, t, y, direction * h)
            if ratio <= 1.0:
                t = t_end if h == remaining else t + direction * h
                y = y_new
                accepted += 1
                ts.append(t)
                ys.append(y.copy())
                ratios.append(ratio)
                if monitor is not None:
                    reason = monitor(t, y)
                    if reason is not None:
                        logger.debug(f"integration stopped at t={t:.12g}: {reason}")
                        return IntegrationResult(
                            np.array(ts), np.array(ys), np.array(ratios), accepted, rejected, True, reason
                        )
            else:
                rejected += 1
            h = h * self.factor(ratio)

        logger.debug(f"integration finished: {accepted} accepted, {rejected} rejected steps")
        return IntegrationResult(np.array(ts), np.array(ys), np.array(ratios), accepted, rejected)


class DormandPrince54(ExplicitRungeKutta):
    """Dormand-Prince 5(4) pair, seven stages with the 5th order solution propagated."""

    s = 7
    order = 5
    eval_stages = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)

    BT = (
        (1 / 5,),
        (3 / 40, 9 / 40),
        (44 / 45, -56 / 15, 32 / 9),
        (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
        (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
        (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
        (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0),
    )

    # b - b_hat
    TR = (
        35 / 384 - 5179 / 57600,
        0.0,
        500 / 1113 - 7571 / 16695,
        125 / 192 - 393 / 640,
        -2187 / 6784 + 92097 / 339200,
        11 / 84 - 187 / 2100,
        -1 / 40,
    )
