"""
Adaptive Gauss-Kronrod quadrature (7-point Gauss / 15-point Kronrod).

The interval with the largest error estimate is bisected until the summed
estimate meets max(abs_tol, rel_tol * |I|). Partial sums are combined with
math.fsum so the result does not depend on the bisection order.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from electrovac.shared.utils import (
    DegenerateDiscriminantError,
    InvalidParameterError,
    NonFiniteResultError,
    QuadratureFailureError,
    logger,
)


# Kronrod abscissae in [0, 1), descending; odd indices are the Gauss nodes
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]
GAUSS_WEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    subdivisions: int
    evaluations: int


def gauss_kronrod_15(f: Callable[[float], float], a: float, b: float) -> tuple[float, float]:
    """One G7/K15 panel on [a, b]: (Kronrod estimate, |K15 - G7|)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    values = np.array([f(mid + half * z) for z in NODES], dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteResultError(f"non-finite integrand on [{a}, {b}]")
    kronrod = half * math.fsum(KRONROD_WEIGHTS * values)
    gauss = half * math.fsum(GAUSS_WEIGHTS * values)
    return kronrod, abs(kronrod - gauss)


def integrate_adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    abs_tol: float = 1e-12,
    rel_tol: float = 0.0,
    max_subdivisions: int = 2000,
) -> QuadratureResult:
    """
    Integrate f over [a, b] (b < a gives the negated integral).

    Args:
        f: Scalar integrand, finite on the closed interval.
        a: Lower limit.
        b: Upper limit.
        abs_tol: Absolute error target.
        rel_tol: Relative error target.
        max_subdivisions: Panel budget.

    Returns:
        QuadratureResult with the integral and the summed error estimate.

    Raises:
        QuadratureFailureError: Tolerance not met within the panel budget.
    """
    if abs_tol <= 0.0 and rel_tol <= 0.0:
        raise InvalidParameterError("need abs_tol > 0 or rel_tol > 0")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0, 0)
    if b < a:
        result = integrate_adaptive(f, b, a, abs_tol, rel_tol, max_subdivisions)
        return QuadratureResult(-result.value, result.error, result.subdivisions, result.evaluations)

    value, error = gauss_kronrod_15(f, a, b)
    heap = [(-error, a, b, value)]
    evaluations = 15
    while True:
        total = math.fsum(item[3] for item in heap)
        total_error = math.fsum(-item[0] for item in heap)
        if total_error <= max(abs_tol, rel_tol * abs(total)):
            logger.debug(f"quadrature on [{a:g}, {b:g}]: {len(heap)} panels, error {total_error:.2e}")
            return QuadratureResult(total, total_error, len(heap), evaluations)
        if len(heap) >= max_subdivisions:
            raise QuadratureFailureError(
                f"error {total_error:.3e} above tolerance after {len(heap)} subdivisions on [{a}, {b}]"
            )
        _, left, right, _ = heapq.heappop(heap)
        mid = 0.5 * (left + right)
        if not left < mid < right:
            raise QuadratureFailureError(f"panel [{left}, {right}] cannot be bisected further")
        for lo, hi in ((left, mid), (mid, right)):
            v, e = gauss_kronrod_15(f, lo, hi)
            heapq.heappush(heap, (-e, lo, hi, v))
        evaluations += 30


def rational_arctan_antiderivative(eta: float, theta: float, delta: float, xi: float) -> float:
    """
    Antiderivative (2/sqrt(D)) arctan((2 eta xi + theta)/sqrt(D)) of 1/(eta xi^2 + theta xi + delta).

    Raises:
        DegenerateDiscriminantError: D = 4 eta delta - theta^2 <= 0.
    """
    disc = 4.0 * eta * delta - theta * theta
    if disc <= 0.0:
        raise DegenerateDiscriminantError(f"4*eta*delta - theta^2 = {disc:.3e} is not positive")
    root = math.sqrt(disc)
    return (2.0 / root) * math.atan((2.0 * eta * xi + theta) / root)
