"""
Lapse ODE along an invariant.

For MP-class systems the potential U = 1/N composed with xi must satisfy

    U''(xi) / U'(xi) + h(xi) = 0,   h = lap(xi) / |grad xi|^2,

equivalently U o xi is harmonic. Profiles of U are UnaryFunctions so that
Compose(profile, xi) is directly a jetcore field.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from electrovac.core.invariants import (
    EPS_GRAD,
    DilationInvariant,
    InvariantField,
    separability_check,
    xi_jet,
)
from electrovac.core.jetcore import Compose, ScalarField, UnaryFunction, eval_jet
from electrovac.reducer.tools.quadrature import integrate_adaptive, rational_arctan_antiderivative
from electrovac.shared.utils import (
    DegenerateGradientError,
    InvalidParameterError,
    NotSeparableError,
    OutOfProfileRangeError,
    QuadratureFailureError,
    StationaryLapseError,
    ZeroSlopeError,
    ensure_parent,
    logger,
)


CLOSED_FORM_TOL = 1e-10
REFINE_TOL = 1e-10


# ============================================================
# PROFILES
# ============================================================

class LapseProfile(UnaryFunction):
    """U(xi) = 1/N(xi) with two derivatives."""

    interval: Optional[tuple[float, float]] = None

    def lapse(self, xi: float) -> tuple[float, float, float]:
        """(N, N', N'') from U through N = 1/U."""
        U, U1, U2 = self.derivatives(xi)
        return 1.0 / U, -U1 / U ** 2, -U2 / U ** 2 + 2.0 * U1 * U1 / U ** 3


class ArctanLapseProfile(LapseProfile):
    """U = k1 + (2k/sqrt(D)) arctan((2 eta xi + theta)/sqrt(D)), U' = k/(eta xi^2 + theta xi + delta)."""

    name = "arctan_lapse"

    def __init__(self, eta: float, theta: float, delta: float, k: float, k1: float):
        self.eta, self.theta, self.delta = float(eta), float(theta), float(delta)
        self.k, self.k1 = float(k), float(k1)
        # raises on D <= 0
        rational_arctan_antiderivative(self.eta, self.theta, self.delta, 0.0)

    @classmethod
    def from_invariant(cls, inv: DilationInvariant, k: float, k1: float) -> "ArctanLapseProfile":
        return cls(inv.eta, inv.theta_q, inv.delta, k, k1)

    def derivatives(self, xi):
        Q = (self.eta * xi + self.theta) * xi + self.delta
        U = self.k1 + self.k * rational_arctan_antiderivative(self.eta, self.theta, self.delta, xi)
        U1 = self.k / Q
        U2 = -self.k * (2.0 * self.eta * xi + self.theta) / (Q * Q)
        return U, U1, U2


class AffineLapseProfile(LapseProfile):
    """U = -(k xi + k1), the harmonic-pole family N = -1/(k xi + k1)."""

    name = "affine_lapse"

    def __init__(self, k: float, k1: float):
        self.k, self.k1 = float(k), float(k1)

    def derivatives(self, xi):
        return -(self.k * xi + self.k1), -self.k, 0.0


class TabulatedLapseProfile(LapseProfile):
    """
    Piecewise cubic Hermite profile.

    U is interpolated from (U, U') and U' from (U', U''), where U'' = -h U'
    comes from the ODE at the nodes and at the query point.
    """

    name = "tabulated_lapse"

    def __init__(self, xi: Sequence[float], U: Sequence[float], dU: Sequence[float], h: Callable[[float], float]):
        xi = np.asarray(xi, dtype=float)
        U = np.asarray(U, dtype=float)
        dU = np.asarray(dU, dtype=float)
        if xi.ndim != 1 or xi.size < 2 or U.shape != xi.shape or dU.shape != xi.shape:
            raise InvalidParameterError("tabulated profile needs matching 1-D arrays of length >= 2")
        if np.any(np.diff(xi) <= 0):
            raise InvalidParameterError("profile grid must be strictly increasing")
        self.xi, self.U, self.dU = xi, U, dU
        self.h = h
        ddU = np.array([-h(x) * w for x, w in zip(xi, dU)])
        self.ddU = ddU
        self._U = CubicHermiteSpline(xi, U, dU, extrapolate=False)
        self._dU = CubicHermiteSpline(xi, dU, ddU, extrapolate=False)
        self.interval = (float(xi[0]), float(xi[-1]))

    def singular(self, u):
        return False

    def derivatives(self, xi):
        lo, hi = self.interval
        if not lo <= xi <= hi:
            raise OutOfProfileRangeError(f"xi = {xi:.12g} outside profile interval [{lo:.12g}, {hi:.12g}]")
        U = float(self._U(xi))
        U1 = float(self._dU(xi))
        return U, U1, -self.h(xi) * U1


# ============================================================
# ODE RESIDUALS
# ============================================================

@dataclass(frozen=True)
class LapseODEForms:
    n_form: float
    u_form: float
    harmonic_form: float

    def max_disagreement(self) -> float:
        values = (self.n_form, self.u_form, self.harmonic_form)
        return max(values) - min(values)


def _ode_inputs(profile: LapseProfile, inv: ScalarField, p, eps_grad: float):
    jet = xi_jet(inv, p)
    norm2 = jet.grad_norm2
    if math.sqrt(norm2) <= eps_grad:
        raise DegenerateGradientError(f"|grad xi| <= {eps_grad:g} at {p}")
    U, U1, U2 = profile.derivatives(jet.value)
    if U1 == 0.0:
        raise StationaryLapseError(f"U'(xi) = 0 at xi = {jet.value:.12g}")
    return jet, norm2, U, U1, U2


def lapse_ode_residual(profile: LapseProfile, inv: ScalarField, p, eps_grad: float = EPS_GRAD) -> float:
    """
    |U''/U' + lap(xi)/|grad xi|^2| at p.

    Raises:
        DegenerateGradientError: |grad xi| <= eps_grad.
        StationaryLapseError: U'(xi(p)) = 0.
    """
    jet, norm2, _, U1, U2 = _ode_inputs(profile, inv, p, eps_grad)
    return abs(U2 / U1 + jet.laplacian / norm2)


def lapse_ode_forms(profile: LapseProfile, inv: ScalarField, p, eps_grad: float = EPS_GRAD) -> LapseODEForms:
    """The lapse condition written in N, in U, and as harmonicity of U o xi."""
    jet, norm2, U, U1, U2 = _ode_inputs(profile, inv, p, eps_grad)
    h = jet.laplacian / norm2
    N, N1, N2 = profile.lapse(jet.value)
    n_form = abs(N2 / N1 - 2.0 * N1 / N + h)
    u_form = abs(U2 / U1 + h)
    composed = eval_jet(Compose(profile, inv), p)
    harmonic_form = abs(composed.laplacian) / (abs(U1) * norm2)
    return LapseODEForms(n_form, u_form, harmonic_form)


# ============================================================
# SOLVING FOR THE LAPSE
# ============================================================

@dataclass
class LapseSolution:
    profile: TabulatedLapseProfile
    closed_form: Optional[LapseProfile]
    anchor: float
    closed_form_gap: Optional[float]

    @property
    def xi(self) -> np.ndarray:
        return self.profile.xi

    def to_dict(self) -> dict:
        lo, hi = self.profile.interval
        return {
            "interval": [lo, hi],
            "nodes": int(self.xi.size),
            "anchor": self.anchor,
            "closed_form": None if self.closed_form is None else self.closed_form.name,
            "closed_form_max_gap": self.closed_form_gap,
        }

    def to_csv(self, path: str | Path) -> Path:
        path = ensure_parent(path)
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            header = ["xi", "U", "dU", "ddU", "N"]
            if self.closed_form is not None:
                header.append("U_closed_form")
            writer.writerow(header)
            for x, U, dU, ddU in zip(self.xi, self.profile.U, self.profile.dU, self.profile.ddU):
                row = [repr(float(v)) for v in (x, U, dU, ddU, 1.0 / U)]
                if self.closed_form is not None:
                    row.append(repr(self.closed_form(float(x))))
                writer.writerow(row)
        logger.info(f"lapse profile written to {path}")
        return path


def _advance(h: Callable[[float], float], x0: float, x1: float, w0: float, abs_tol: float) -> tuple[float, float]:
    """(U'(x1), U(x1) - U(x0)) given U'(x0) = w0 and U'' = -h U'."""
    if x0 == x1:
        return w0, 0.0

    def slope(x: float) -> float:
        return w0 * math.exp(-integrate_adaptive(h, x0, x, abs_tol=abs_tol).value)

    w1 = slope(x1)
    dU = integrate_adaptive(slope, x0, x1, abs_tol=abs_tol).value
    return w1, dU


def _default_levels(interval: tuple[float, float], count: int = 3) -> list[float]:
    a, b = interval
    return [a + (b - a) * (i + 1) / (count + 1) for i in range(count)]


def solve_lapse_from_invariant(
    inv: InvariantField,
    k: float,
    k1: float,
    interval: tuple[float, float],
    abs_tol: float = 1e-12,
    initial_nodes: int = 17,
    max_nodes: int = 4097,
    check_separability: bool = True,
    box: Optional[tuple[Sequence[float], Sequence[float]]] = None,
    seed: int = 0,
) -> LapseSolution:
    """
    Tabulate U(xi) from the first integral U' = k w0 exp(-int h).

    The anchor is the vertex -theta/(2 eta) of the quadratic for dilation
    invariants (w0 = 1/Q(anchor), matching the closed form) and the start
    of the interval otherwise (w0 = 1). U(anchor) = k1 in both cases.

    Args:
        inv: Separable invariant with a known level ratio.
        k: Non-null slope.
        k1: Value of U at the anchor.
        interval: (xi_start, xi_end), xi_start < xi_end.
        abs_tol: Absolute tolerance of every quadrature.
        initial_nodes: Nodes before refinement.
        max_nodes: Refinement budget.
        check_separability: Run separability_check on interior levels first.
        box: Sampling box for the separability check.
        seed: Seed of the separability check.

    Raises:
        ZeroSlopeError: k = 0.
        NotSeparableError: The invariant fails the check or has no level ratio.
        QuadratureFailureError: Refinement or closed-form agreement failed.
    """
    if k == 0.0:
        raise ZeroSlopeError("k must be non-null")
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise InvalidParameterError(f"interval must satisfy start < end, got {interval}")
    h = inv.level_ratio() if isinstance(inv, InvariantField) else None
    if h is None:
        raise NotSeparableError("no closed-form level ratio for this invariant")

    if check_separability:
        report = separability_check(inv, _default_levels((a, b)), samples_per_level=16, seed=seed, box=box)
        if not report.separable:
            worst = max(level.spread for level in report.levels)
            raise NotSeparableError(f"level ratio spread {worst:.3e} exceeds {report.tol_sep:g}")

    if isinstance(inv, DilationInvariant):
        anchor = -inv.theta_q / (2.0 * inv.eta)
        w_anchor = k / inv.quadratic(anchor)
        closed_form: Optional[LapseProfile] = ArctanLapseProfile.from_invariant(inv, k, k1)
    else:
        anchor = a
        w_anchor = k
        closed_form = None

    w_start, dU_start = _advance(h, anchor, a, w_anchor, abs_tol)
    nodes = {a: (k1 + dU_start, w_start)}
    grid = np.linspace(a, b, initial_nodes)
    for x0, x1 in zip(grid[:-1], grid[1:]):
        U0, w0 = nodes[x0]
        w1, dU = _advance(h, x0, x1, w0, abs_tol)
        nodes[x1] = (U0 + dU, w1)

    # bisect cells whose Hermite midpoint misses the integrated values
    pending = list(zip(grid[:-1], grid[1:]))
    while pending:
        x0, x1 = pending.pop()
        U0, w0 = nodes[x0]
        U1, w1 = nodes[x1]
        mid = 0.5 * (x0 + x1)
        w_mid, dU = _advance(h, x0, mid, w0, abs_tol)
        U_mid = U0 + dU
        spline = CubicHermiteSpline([x0, x1], [U0, U1], [w0, w1])
        slope_spline = CubicHermiteSpline([x0, x1], [w0, w1], [-h(x0) * w0, -h(x1) * w1])
        gap = max(
            abs(float(spline(mid)) - U_mid) / (1.0 + abs(U_mid)),
            abs(float(slope_spline(mid)) - w_mid) / (1.0 + abs(w_mid)),
        )
        if gap > REFINE_TOL:
            if len(nodes) >= max_nodes:
                raise QuadratureFailureError(f"profile refinement exceeded {max_nodes} nodes")
            nodes[mid] = (U_mid, w_mid)
            pending.extend([(x0, mid), (mid, x1)])

    xs = np.array(sorted(nodes))
    profile = TabulatedLapseProfile(xs, [nodes[x][0] for x in xs], [nodes[x][1] for x in xs], h)
    logger.info(f"lapse profile on [{a:g}, {b:g}]: {xs.size} nodes")

    gap = None
    if closed_form is not None:
        probe = np.concatenate([xs, 0.5 * (xs[:-1] + xs[1:])])
        gap = max(abs(profile(float(x)) - closed_form(float(x))) for x in probe)
        if gap > CLOSED_FORM_TOL * (1.0 + max(abs(closed_form(float(x))) for x in probe)):
            raise QuadratureFailureError(f"tabulated lapse deviates from the closed form by {gap:.3e}")
        logger.info(f"closed-form agreement {gap:.2e}")
    return LapseSolution(profile, closed_form, anchor, gap)
