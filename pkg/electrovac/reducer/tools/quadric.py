"""
Reduced ODE system of the quadric ansatz.

With xi = sum tau x_k^2 + gamma_k x_k + theta_k one has |grad xi|^2 = s(xi)
with s = 4 tau xi + beta and lap(xi) = 2 n tau, so (phi, N, psi) as
functions of xi obey three second-order equations (evolved) and one
first-order relation (monitored as a constraint). State vector:

    y = [phi, phi', N, N', psi, psi']
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from electrovac.core.invariants import QuadricInvariant
from electrovac.core.solutions import mp_coefficient
from electrovac.reducer.tools.integrator import DormandPrince54, StepControl
from electrovac.shared.utils import (
    ConstraintDriftError,
    DomainViolationError,
    InconsistentInitialDataError,
    InterpolationBudgetError,
    InvalidParameterError,
    SingularCoefficientError,
    ensure_parent,
    logger,
)


DRIFT_TOL = 1e-6
PRECONDITION_TOL = 1e-10
INTERPOLATION_BUDGET = 1e-9
MAX_REFINEMENTS = 6
STATE_COLUMNS = ("phi", "dphi", "N", "dN", "psi", "dpsi")


@dataclass(frozen=True)
class QuadricParameters:
    n: int
    tau: float
    beta: float
    Lambda: float = 0.0

    def __post_init__(self):
        if self.n < 3:
            raise InvalidParameterError(f"need n >= 3, got n={self.n}")
        if self.tau == 0.0 and self.beta == 0.0:
            raise SingularCoefficientError("s(xi) = 4 tau xi + beta vanishes identically")

    @classmethod
    def from_invariant(cls, inv: QuadricInvariant, Lambda: float = 0.0) -> "QuadricParameters":
        return cls(inv.n, inv.tau, inv.beta, float(Lambda))

    def s(self, xi: float) -> float:
        return 4.0 * self.tau * xi + self.beta

    @property
    def singular_point(self) -> Optional[float]:
        """Root of s, if any."""
        return None if self.tau == 0.0 else -self.beta / (4.0 * self.tau)


@dataclass(frozen=True)
class QuadricODEState:
    xi: float
    phi: float
    dphi: float
    N: float
    dN: float
    psi: float
    dpsi: float

    def as_array(self) -> np.ndarray:
        return np.array([self.phi, self.dphi, self.N, self.dN, self.psi, self.dpsi])

    @classmethod
    def from_array(cls, xi: float, y) -> "QuadricODEState":
        return cls(float(xi), *(float(v) for v in y))


def second_derivatives(params: QuadricParameters, xi: float, y) -> tuple[float, float, float]:
    """(phi'', N'', psi'') from the evolution equations."""
    n, tau, L = params.n, params.tau, params.Lambda
    phi, dphi, N, dN, _, dpsi = y
    s = params.s(xi)
    if s == 0.0:
        raise SingularCoefficientError(f"s(xi) = 0 at xi = {xi:.12g}")
    q = dpsi * dpsi
    ddpsi = (-2.0 * n * tau * phi * dpsi * N / s + (n - 2) * dphi * dpsi * N + phi * dpsi * dN) / (phi * N)
    ddN = (
        (-2.0 * L * N * N / ((n - 1) * phi) - 2.0 * n * tau * phi * N * dN) / s
        + (n - 2) * dphi * N * dN
        + 2.0 * (n - 2) * phi * q / (n - 1)
    ) / (phi * N)
    ddphi = (phi * ddN + 2.0 * dphi * dN - 2.0 * phi * q / N) / ((n - 2) * N)
    return ddphi, ddN, ddpsi


def quadric_rhs(params: QuadricParameters, xi: float, y) -> np.ndarray:
    ddphi, ddN, ddpsi = second_derivatives(params, xi, y)
    return np.array([y[1], ddphi, y[3], ddN, y[5], ddpsi])


def constraint_terms(params: QuadricParameters, xi: float, y) -> tuple[float, float]:
    """Signed first-order constraint and the largest summand magnitude."""
    n, tau, L = params.n, params.tau, params.Lambda
    phi, dphi, N, dN, _, dpsi = y
    s = params.s(xi)
    ddphi, _, _ = second_derivatives(params, xi, y)
    terms = (
        phi * ddphi * N * s,
        -(n - 1) * dphi * dphi * N * s,
        phi * dphi * dN * s,
        -2.0 * phi * phi * dpsi * dpsi / ((n - 1) * N) * s,
        4.0 * (n - 1) * tau * phi * dphi * N,
        -2.0 * tau * phi * phi * dN,
        -2.0 * L * N / (n - 1),
    )
    return math.fsum(terms), max(abs(t) for t in terms)


def constraint_residual(params: QuadricParameters, xi: float, y) -> float:
    """Normalized constraint |C| / (1 + max |summand|)."""
    value, scale = constraint_terms(params, xi, y)
    return abs(value) / (1.0 + scale)


# ============================================================
# INITIAL DATA
# ============================================================

def mp_initial_state(params: QuadricParameters, xi0: float, U: float, dU: float, sign: int = 1) -> QuadricODEState:
    """MP-class data phi = N^(1/(n-2)), psi = sign c_n (1 - N) from U = 1/N and U' at xi0."""
    if U <= 0.0:
        raise DomainViolationError(f"U = {U:.6g} must be positive")
    n = params.n
    c = sign * mp_coefficient(n)
    N = 1.0 / U
    dN = -dU / (U * U)
    phi = N ** (1.0 / (n - 2))
    dphi = phi * dN / ((n - 2) * N)
    return QuadricODEState(float(xi0), phi, dphi, N, dN, c * (1.0 - N), -c * dN)


def complete_initial_state(
    params: QuadricParameters,
    xi0: float,
    phi: float,
    dphi: float,
    N: float,
    dN: float,
    psi: float = 0.0,
    sign: int = 1,
) -> QuadricODEState:
    """
    Solve the constraint for psi' (it is linear in psi'^2).

    Raises:
        InconsistentInitialDataError: The required psi'^2 is negative or undetermined.
    """
    base = np.array([phi, dphi, N, dN, psi, 0.0])
    unit = np.array([phi, dphi, N, dN, psi, 1.0])
    c0, _ = constraint_terms(params, xi0, base)
    c1, _ = constraint_terms(params, xi0, unit)
    slope = c1 - c0
    if slope == 0.0:
        raise InconsistentInitialDataError("constraint does not depend on psi' at this state")
    q = -c0 / slope
    if q < 0.0:
        if q > -PRECONDITION_TOL:
            q = 0.0
        else:
            raise InconsistentInitialDataError(f"constraint requires psi'^2 = {q:.6g} < 0")
    return QuadricODEState(float(xi0), phi, dphi, N, dN, psi, sign * math.sqrt(q))


# ============================================================
# TRAJECTORIES
# ============================================================

@dataclass
class QuadricTrajectory:
    params: QuadricParameters
    xi: np.ndarray
    states: np.ndarray
    constraint: np.ndarray
    accepted: int = 0
    rejected: int = 0
    interpolation_error: float = 0.0

    @property
    def max_constraint(self) -> float:
        return float(np.max(self.constraint))

    @property
    def interval(self) -> tuple[float, float]:
        return float(np.min(self.xi)), float(np.max(self.xi))

    def state(self, index: int) -> QuadricODEState:
        return QuadricODEState.from_array(self.xi[index], self.states[index])

    def derivatives(self) -> np.ndarray:
        return np.array([quadric_rhs(self.params, x, y) for x, y in zip(self.xi, self.states)])

    def profiles(self):
        """TrajectoryProfiles (phi, N, psi) for lifting to fields."""
        from electrovac.reducer.tools.lifting import TrajectoryProfile

        return tuple(TrajectoryProfile(self, name) for name in ("phi", "N", "psi"))

    def to_dict(self) -> dict:
        lo, hi = self.interval
        return {
            "interval": [lo, hi],
            "steps": int(self.xi.size),
            "accepted": self.accepted,
            "rejected": self.rejected,
            "constraint_max": self.max_constraint,
            "interpolation_error": self.interpolation_error,
            "final_state": dict(zip(STATE_COLUMNS, (float(v) for v in self.states[-1]))),
        }

    def to_csv(self, path: str | Path) -> Path:
        path = ensure_parent(path)
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["xi", *STATE_COLUMNS, "constraint_residual"])
            for x, y, c in zip(self.xi, self.states, self.constraint):
                writer.writerow([repr(float(x)), *(repr(float(v)) for v in y), repr(float(c))])
        logger.info(f"trajectory written to {path}")
        return path


def _check_interval(params: QuadricParameters, xi0: float, xi_end: float):
    if params.s(xi0) == 0.0:
        raise SingularCoefficientError(f"s(xi0) = 0 at xi0 = {xi0:.12g}")
    root = params.singular_point
    if root is not None and min(xi0, xi_end) <= root <= max(xi0, xi_end):
        raise SingularCoefficientError(
            f"s(xi) vanishes at xi = {root:.12g} inside [{min(xi0, xi_end):.12g}, {max(xi0, xi_end):.12g}]"
        )


def interpolation_remainder(params: QuadricParameters, xi: np.ndarray, states: np.ndarray, solver=None) -> float:
    """
    Largest cubic Hermite midpoint error over the accepted steps.

    The Hermite midpoint built from the node values and right-hand sides is
    compared with an independent Dormand-Prince half step from the left node,
    relative to 1 + |y| per component.
    """
    solver = solver or DormandPrince54()

    def rhs(x, y):
        return quadric_rhs(params, x, y)

    slopes = np.array([rhs(x, y) for x, y in zip(xi, states)])
    worst = 0.0
    for i in range(len(xi) - 1):
        h = xi[i + 1] - xi[i]
        if h == 0.0:
            continue
        hermite = 0.5 * (states[i] + states[i + 1]) + h * (slopes[i] - slopes[i + 1]) / 8.0
        reference, _ = solver.step(rhs, xi[i], states[i], 0.5 * h)
        worst = max(worst, float(np.max(np.abs(hermite - reference) / (1.0 + np.abs(reference)))))
    return worst


def _integrate_once(params, xi0, y0, xi_end, solver, cap, drift_tol):
    root = params.singular_point

    def step_bound(xi: float) -> float:
        if root is None:
            return cap
        return min(cap, 0.5 * abs(xi - root))

    drift: list[float] = []

    def monitor(xi: float, y: np.ndarray) -> Optional[str]:
        if y[0] <= 0.0 or y[2] <= 0.0:
            return "nonpositive"
        value = constraint_residual(params, xi, y)
        drift.append(value)
        if value > drift_tol:
            return "drift"
        return None

    result = solver.integrate(lambda x, y: quadric_rhs(params, x, y), xi0, y0, xi_end, step_bound, monitor)
    if result.stop_reason == "nonpositive":
        raise DomainViolationError(f"phi or N became non-positive at xi = {result.t[-1]:.12g}")
    if result.stop_reason == "drift":
        raise ConstraintDriftError(
            f"constraint residual {drift[-1]:.3e} exceeded {drift_tol:g} at xi = {result.t[-1]:.12g}"
        )
    return result, drift


def integrate_quadric_system(
    initial: QuadricODEState,
    params: QuadricParameters,
    xi_end: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    drift_tol: float = DRIFT_TOL,
    precondition_tol: float = PRECONDITION_TOL,
    max_step: Optional[float] = None,
    interpolation_budget: float = INTERPOLATION_BUDGET,
    max_refinements: int = MAX_REFINEMENTS,
) -> QuadricTrajectory:
    """
    Integrate the reduced system from `initial` to xi_end with Dormand-Prince 5(4).

    The accepted grid is checked against the Hermite interpolation budget
    used when lifting; while the midpoint remainder exceeds it, the step cap
    is shrunk from the observed remainder and the interval integrated again.

    Args:
        initial: State at xi0; must satisfy the constraint.
        params: n, tau, beta, Lambda.
        xi_end: End of the interval (either side of xi0).
        rtol: Relative step tolerance.
        atol: Absolute step tolerance.
        drift_tol: Abort threshold of the normalized constraint.
        precondition_tol: Admissible constraint violation of the initial data.
        max_step: Initial step cap; defaults to 1/256 of the interval.
        interpolation_budget: Admissible relative Hermite midpoint error.
        max_refinements: Re-integrations allowed before giving up.

    Raises:
        SingularCoefficientError: s(xi) vanishes on the interval.
        InconsistentInitialDataError: Initial data violates the constraint.
        ConstraintDriftError: The constraint drifts past drift_tol.
        InterpolationBudgetError: The grid cannot meet interpolation_budget.
        StepFailureError: Integrator failure.
    """
    if interpolation_budget <= 0.0:
        raise InvalidParameterError(f"interpolation budget must be positive, got {interpolation_budget:g}")
    xi0 = initial.xi
    _check_interval(params, xi0, xi_end)
    y0 = initial.as_array()
    if y0[0] <= 0.0 or y0[2] <= 0.0:
        raise DomainViolationError("initial phi and N must be positive")
    violation = constraint_residual(params, xi0, y0)
    if violation > precondition_tol:
        raise InconsistentInitialDataError(
            f"initial data violates the constraint by {violation:.3e} (> {precondition_tol:g})"
        )

    cap = abs(xi_end - xi0) / 256.0 if max_step is None else float(max_step)
    solver = DormandPrince54(StepControl(rtol=rtol, atol=atol))
    for _ in range(max_refinements + 1):
        result, drift = _integrate_once(params, xi0, y0, xi_end, solver, cap, drift_tol)
        remainder = interpolation_remainder(params, result.t, result.y, solver)
        if remainder <= interpolation_budget:
            break
        # Hermite error scales like h^4
        shrink = min(0.5, max(0.1, 0.9 * (interpolation_budget / remainder) ** 0.25))
        cap = shrink * float(np.max(np.abs(np.diff(result.t))))
        logger.debug(f"interpolation remainder {remainder:.2e} over budget, step cap now {cap:.3e}")
    else:
        raise InterpolationBudgetError(
            f"Hermite remainder {remainder:.3e} exceeds {interpolation_budget:g} "
            f"after {max_refinements} refinements"
        )

    constraint = np.array([violation, *drift])
    logger.info(
        f"quadric trajectory [{xi0:g} -> {xi_end:g}]: {result.accepted} steps, "
        f"max constraint {constraint.max():.2e}, interpolation {remainder:.1e}"
    )
    return QuadricTrajectory(
        params, result.t, result.y, constraint, result.accepted, result.rejected, remainder
    )


def mp_class_drift(trajectory: QuadricTrajectory, sign: int = 1) -> dict[str, float]:
    """
    Largest deviation from the MP relations along a trajectory.

    Returns:
        phi: max |(n-2) phi'/phi - N'/N|
        psi_gradient: max |psi'^2 - c_n^2 N'^2|
        psi_value: max |psi - sign c_n (1 - N)|
    """
    n = trajectory.params.n
    c = mp_coefficient(n)
    y = trajectory.states
    phi, dphi, N, dN, psi, dpsi = (y[:, i] for i in range(6))
    return {
        "phi": float(np.max(np.abs((n - 2) * dphi / phi - dN / N))),
        "psi_gradient": float(np.max(np.abs(dpsi ** 2 - c * c * dN ** 2))),
        "psi_value": float(np.max(np.abs(psi - sign * c * (1.0 - N)))),
    }
