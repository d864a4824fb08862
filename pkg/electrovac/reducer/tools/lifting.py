"""
Lifting 1-D profiles back to fields on R^n.

A profile F(xi) is a UnaryFunction; the lifted field is Compose(F, xi),
so all jets follow from the chain rule on xi's closed-form jet.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from electrovac.core.jetcore import Affine, Compose, RealPower, ScalarField, UnaryFunction
from electrovac.core.residuals import SystemInstance
from electrovac.core.solutions import mp_coefficient
from electrovac.reducer.tools.lapse import LapseProfile
from electrovac.reducer.tools.quadric import QuadricTrajectory, quadric_rhs
from electrovac.shared.utils import (
    InvalidParameterError,
    OutOfProfileRangeError,
    SingularPointError,
)


_COMPONENTS = {"phi": 0, "N": 2, "psi": 4}


class ConstantProfile(UnaryFunction):
    name = "constant"
    interval = None

    def __init__(self, c: float):
        self.c = float(c)

    def derivatives(self, u):
        return self.c, 0.0, 0.0


class TrajectoryProfile(UnaryFunction):
    """
    One component of a quadric trajectory as a function of xi.

    The full state is interpolated by cubic Hermite splines with the ODE
    right-hand side as node slopes; F'' is the right-hand side evaluated at
    the interpolated state.
    The node grid meets the Hermite budget enforced by integrate_quadric_system.
    """

    def __init__(self, trajectory: QuadricTrajectory, component: str):
        if component not in _COMPONENTS:
            raise InvalidParameterError(f"component must be one of {sorted(_COMPONENTS)}, got {component!r}")
        order = np.argsort(trajectory.xi)
        xi = trajectory.xi[order]
        states = trajectory.states[order]
        slopes = trajectory.derivatives()[order]
        self.trajectory = trajectory
        self.component = component
        self.name = f"trajectory[{component}]"
        self.index = _COMPONENTS[component]
        self.interval = (float(xi[0]), float(xi[-1]))
        self._spline = CubicHermiteSpline(xi, states, slopes, axis=0, extrapolate=False)

    def state(self, xi: float) -> np.ndarray:
        lo, hi = self.interval
        if not lo <= xi <= hi:
            raise OutOfProfileRangeError(f"xi = {xi:.12g} outside trajectory interval [{lo:.12g}, {hi:.12g}]")
        return np.asarray(self._spline(xi), dtype=float)

    def derivatives(self, xi):
        y = self.state(xi)
        rhs = quadric_rhs(self.trajectory.params, xi, y)
        i = self.index
        return float(y[i]), float(y[i + 1]), float(rhs[i + 1])


class ChainedProfile(UnaryFunction):
    """outer(inner(xi)) for two UnaryFunctions."""

    def __init__(self, inner: UnaryFunction, outer: UnaryFunction, name: str = "chain"):
        self.inner, self.outer = inner, outer
        self.name = name
        self.interval = getattr(inner, "interval", None)

    def derivatives(self, xi):
        u, u1, u2 = self.inner.derivatives(xi)
        if self.outer.singular(u):
            raise SingularPointError(f"{self.outer.name} is singular at {u:.6g}")
        g, g1, g2 = self.outer.derivatives(u)
        return g, g1 * u1, g2 * u1 * u1 + g1 * u2


def mp_profiles_from_lapse(profile: LapseProfile, n: int, sign: int = 1) -> tuple[UnaryFunction, UnaryFunction, UnaryFunction]:
    """(phi, N, psi) profiles of the MP class from a profile of U = 1/N."""
    c = sign * mp_coefficient(n)
    phi = ChainedProfile(profile, RealPower(-1.0 / (n - 2)), "mp_phi")
    N = ChainedProfile(profile, RealPower(-1.0), "mp_N")
    psi = ChainedProfile(N, Affine(-c, c), "mp_psi")
    return phi, N, psi


@dataclass(frozen=True)
class LiftedSolution:
    """Origin of a lifted system: the invariant and the xi-interval its profiles cover."""

    invariant: ScalarField
    interval: Optional[tuple[float, float]]
    descriptor: dict = field(default_factory=dict)


def _common_interval(profiles) -> Optional[tuple[float, float]]:
    intervals = [getattr(p, "interval", None) for p in profiles]
    intervals = [iv for iv in intervals if iv is not None]
    if not intervals:
        return None
    lo = max(iv[0] for iv in intervals)
    hi = min(iv[1] for iv in intervals)
    if lo > hi:
        raise InvalidParameterError("profile intervals do not overlap")
    return lo, hi


def lift_profile_to_fields(
    xi: ScalarField,
    phi: UnaryFunction,
    N: UnaryFunction,
    psi: UnaryFunction,
    Lambda: float = 0.0,
    descriptor: Optional[dict] = None,
) -> SystemInstance:
    """
    Compose (phi, N, psi) profiles with an invariant.

    Evaluating the result outside the profiles' xi-interval raises
    OutOfProfileRangeError.
    """
    for profile in (phi, N, psi):
        if not isinstance(profile, UnaryFunction):
            raise InvalidParameterError(f"profiles must be functions of xi, got {type(profile).__name__}")
    descriptor = {"family": "lifted", "n": xi.n, "Lambda": float(Lambda), **(descriptor or {})}
    interval = _common_interval((phi, N, psi))
    return SystemInstance(
        n=xi.n,
        phi=Compose(phi, xi),
        N=Compose(N, xi),
        psi=Compose(psi, xi),
        Lambda=float(Lambda),
        label="lifted",
        descriptor=descriptor,
        solution=LiftedSolution(xi, interval, descriptor),
    )


def lift_trajectory(trajectory: QuadricTrajectory, xi: ScalarField, descriptor: Optional[dict] = None) -> SystemInstance:
    phi, N, psi = trajectory.profiles()
    return lift_profile_to_fields(xi, phi, N, psi, trajectory.params.Lambda, descriptor)
