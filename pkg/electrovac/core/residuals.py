"""
Residuals of the Electrostatic System

Pointwise violation of every equation defining an electrostatic system
(g_bar = g / phi^2, lapse N, electric potential psi, constant Lambda):

- covariant form: lapse equation, Maxwell equation, Hessian equation,
  scalar-curvature trace identity
- Cartesian form: the trace identity written in phi, and the four
  coordinate equations (off-diagonal, diagonal, psi, N)

Each equation is returned as (signed value, scale) where scale is the
largest magnitude among its individual summands; the normalized residual
is |value| / (1 + scale).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from electrovac.core.conformal import (
    check_conformal_factor,
    hessian_bar_jets,
    laplacian_bar_jets,
    metric_bar,
    ricci_bar_jets,
    scalar_curvature_bar_jets,
)
from electrovac.core.jetcore import Jet2, LinearForm, Product, ScalarField, eval_jet
from electrovac.shared.utils import (
    DimensionMismatchError,
    DomainViolationError,
    InvalidParameterError,
    max_abs,
)


CHANNELS = (
    "lapse",
    "maxwell",
    "hessian_max",
    "trace",
    "lemma23",
    "t1_offdiag",
    "t1_diag",
    "t1_psi",
    "t1_N",
)

HESSIAN_CHANNELS = frozenset({"hessian_max", "t1_offdiag", "t1_diag"})


# ============================================================
# SYSTEMS
# ============================================================

@dataclass(frozen=True)
class SystemJets:
    """Jets of (phi, N, psi) at one point."""

    n: int
    phi: Jet2
    N: Jet2
    psi: Jet2
    Lambda: float

    @property
    def E2(self) -> float:
        """|E|^2 in g_bar, with E = grad_bar(psi) / N."""
        return self.phi.value ** 2 * self.psi.grad_norm2 / self.N.value ** 2


@dataclass(frozen=True)
class SystemInstance:
    """A candidate electrostatic system (n, phi, N, psi, Lambda)."""

    n: int
    phi: ScalarField
    N: ScalarField
    psi: ScalarField
    Lambda: float = 0.0
    label: str = "custom"
    descriptor: dict[str, Any] = field(default_factory=dict)
    solution: Optional[Any] = None

    def __post_init__(self):
        for name in ("phi", "N", "psi"):
            if getattr(self, name).n != self.n:
                raise DimensionMismatchError(f"{name} has n={getattr(self, name).n}, system has n={self.n}")

    def jets(self, p) -> SystemJets:
        phi = eval_jet(self.phi, p)
        check_conformal_factor(phi)
        N = eval_jet(self.N, p)
        if not N.value > 0.0:
            raise DomainViolationError(f"lapse N = {N.value:.6g} is not positive")
        psi = eval_jet(self.psi, p)
        return SystemJets(self.n, phi, N, psi, self.Lambda)

    def with_lambda(self, Lambda: float) -> "SystemInstance":
        descriptor = {**self.descriptor, "Lambda": float(Lambda)}
        return dataclasses.replace(self, Lambda=float(Lambda), descriptor=descriptor)

    def perturbed(self, epsilon: float, axis: int = 0) -> "SystemInstance":
        """Same system with N replaced by N * (1 + epsilon * x_axis)."""
        if not 0 <= axis < self.n:
            raise InvalidParameterError(f"axis {axis} outside 0..{self.n - 1}")
        coeffs = np.zeros(self.n)
        coeffs[axis] = epsilon
        N = Product(self.N, LinearForm(coeffs, 1.0))
        descriptor = {**self.descriptor, "lapse_perturbation": {"epsilon": epsilon, "axis": axis}}
        return dataclasses.replace(self, N=N, descriptor=descriptor)


# ============================================================
# EQUATIONS (signed value, summand scale)
# ============================================================

def lapse_equation(s: SystemJets) -> tuple[float, float]:
    n, ph, N = s.n, s.phi.value, s.N.value
    E2 = s.E2
    source = 2.0 * N * (n - 2) * E2 / (n - 1)
    cosmological = 2.0 * N * s.Lambda / (n - 1)
    value = laplacian_bar_jets(s.phi, s.N) - source + cosmological
    scale = max_abs(
        ph * ph * np.diag(s.N.hessian),
        (n - 2) * ph * s.phi.gradient * s.N.gradient,
        source,
        cosmological,
    )
    return value, scale


def maxwell_equation(s: SystemJets) -> tuple[float, float]:
    n, ph, N = s.n, s.phi.value, s.N.value
    flux = ph * ph * float(s.psi.gradient @ s.N.gradient)
    value = N * laplacian_bar_jets(s.phi, s.psi) - flux
    scale = max_abs(
        N * ph * ph * np.diag(s.psi.hessian),
        N * (n - 2) * ph * s.phi.gradient * s.psi.gradient,
        ph * ph * s.psi.gradient * s.N.gradient,
    )
    return value, scale


def hessian_equation(s: SystemJets) -> tuple[np.ndarray, float]:
    n, ph, N = s.n, s.phi.value, s.N.value
    gbar = metric_bar(s.phi)
    ricci = ricci_bar_jets(s.phi)
    field_part = 2.0 * np.outer(s.psi.gradient, s.psi.gradient) / (N * N)
    rhs = N * (
        ricci
        - (2.0 * s.Lambda / (n - 1)) * gbar
        + field_part
        - (2.0 / (n - 1)) * s.E2 * gbar
    )
    tensor = hessian_bar_jets(s.phi, s.N) - rhs
    scale = max_abs(
        s.N.hessian,
        np.outer(s.phi.gradient, s.N.gradient) / ph,
        float(s.phi.gradient @ s.N.gradient) / ph,
        N * (n - 2) * s.phi.hessian / ph,
        N * (ph * s.phi.laplacian - (n - 1) * s.phi.grad_norm2) / (ph * ph),
        N * 2.0 * s.Lambda / ((n - 1) * ph * ph),
        N * field_part,
        N * 2.0 * s.E2 / ((n - 1) * ph * ph),
    )
    return tensor, scale


def trace_equation(s: SystemJets) -> tuple[float, float]:
    n, ph = s.n, s.phi.value
    value = scalar_curvature_bar_jets(s.phi) - 2.0 * (s.E2 + s.Lambda)
    scale = max_abs(
        2.0 * (n - 1) * ph * np.diag(s.phi.hessian),
        n * (n - 1) * s.phi.gradient ** 2,
        2.0 * s.E2,
        2.0 * s.Lambda,
    )
    return value, scale


def expanded_trace_equation(s: SystemJets) -> tuple[float, float]:
    """Trace identity with the scalar curvature expanded in phi (Cartesian form)."""
    n, ph, N = s.n, s.phi.value, s.N.value
    curvature = 2.0 * (n - 1) * N * np.diag(s.phi.hessian)
    gradient = n * (n - 1) * (N / ph) * s.phi.gradient ** 2
    electric = 2.0 * (ph / N) * s.psi.gradient ** 2
    cosmological = 2.0 * N * s.Lambda / ph
    value = float(np.sum(curvature - gradient - electric)) - cosmological
    return value, max_abs(curvature, gradient, electric, cosmological)


def coordinate_equations(s: SystemJets) -> dict[str, tuple[float, float]]:
    """Off-diagonal, diagonal, psi and N equations in Cartesian form."""
    n, ph, N, L = s.n, s.phi.value, s.N.value, s.Lambda
    gp, gN, gs = s.phi.gradient, s.N.gradient, s.psi.gradient
    Hp, HN, Hs = s.phi.hessian, s.N.hessian, s.psi.hessian

    off_terms = (
        (n - 2) * N * Hp,
        -ph * HN,
        -np.outer(gp, gN),
        -np.outer(gN, gp),
        2.0 * (ph / N) * np.outer(gs, gs),
    )
    off = sum(off_terms[1:], off_terms[0])
    mask = ~np.eye(n, dtype=bool)
    offdiag = (float(np.max(np.abs(off[mask]))), max_abs(*(t[mask] for t in off_terms)))

    sum_terms = (
        ph * np.diag(Hp) * N,
        ph * gp * gN,
        -(n - 1) * N * gp ** 2,
        -2.0 * ph * ph * gs ** 2 / ((n - 1) * N),
    )
    S = float(np.sum(sum(sum_terms[1:], sum_terms[0])))
    local_terms = (
        (n - 2) * N * np.diag(Hp),
        -ph * np.diag(HN),
        -2.0 * gp * gN,
        2.0 * (ph / N) * gs ** 2,
    )
    cosmological = 2.0 * L * N / (n - 1)
    diag_vec = ph * sum(local_terms[1:], local_terms[0]) + S - cosmological
    diagonal = (
        float(np.max(np.abs(diag_vec))),
        max_abs(*(ph * t for t in local_terms), *sum_terms, cosmological),
    )

    psi_terms = (N * ph * np.diag(Hs), -(n - 2) * N * gp * gs, -ph * gs * gN)
    psi_eq = float(np.sum(sum(psi_terms[1:], psi_terms[0])))

    N_terms = (
        ph * ph * N * np.diag(HN),
        -(n - 2) * ph * N * gp * gN,
        -(2.0 * (n - 2) / (n - 1)) * ph * ph * gs ** 2,
    )
    N_cosmological = 2.0 * L * N * N / (n - 1)
    N_eq = float(np.sum(sum(N_terms[1:], N_terms[0]))) + N_cosmological

    return {
        "t1_offdiag": offdiag,
        "t1_diag": diagonal,
        "t1_psi": (psi_eq, max_abs(*psi_terms)),
        "t1_N": (N_eq, max_abs(*N_terms, N_cosmological)),
    }


# ============================================================
# RESIDUAL VECTORS
# ============================================================

@dataclass(frozen=True)
class ResidualVector:
    lapse: float
    maxwell: float
    hessian_max: float
    trace: float
    lemma23: float
    theo1_offdiag_max: float
    theo1_diag_max: float
    theo1_psi: float
    theo1_N: float

    def as_channels(self) -> dict[str, float]:
        values = dataclasses.astuple(self)
        return dict(zip(CHANNELS, values))

    @classmethod
    def from_channels(cls, channels: dict[str, float]) -> "ResidualVector":
        return cls(*(float(channels[name]) for name in CHANNELS))


@dataclass(frozen=True)
class Theo1Residuals:
    offdiag_max: float
    diag_max: float
    psi: float
    N: float


@dataclass(frozen=True)
class ResidualEvaluation:
    """Absolute residuals together with their per-channel summand scales."""

    absolute: ResidualVector
    scale: ResidualVector

    def normalized(self) -> ResidualVector:
        a, s = self.absolute.as_channels(), self.scale.as_channels()
        return ResidualVector.from_channels({k: a[k] / (1.0 + s[k]) for k in CHANNELS})


def evaluate_jets(s: SystemJets) -> ResidualEvaluation:
    lapse = lapse_equation(s)
    maxwell = maxwell_equation(s)
    tensor, hessian_scale = hessian_equation(s)
    trace = trace_equation(s)
    expanded = expanded_trace_equation(s)
    coords = coordinate_equations(s)

    absolute = {
        "lapse": abs(lapse[0]),
        "maxwell": abs(maxwell[0]),
        "hessian_max": float(np.max(np.abs(tensor))),
        "trace": abs(trace[0]),
        "lemma23": abs(expanded[0]),
    }
    scale = {
        "lapse": lapse[1],
        "maxwell": maxwell[1],
        "hessian_max": hessian_scale,
        "trace": trace[1],
        "lemma23": expanded[1],
    }
    for name, (value, summand) in coords.items():
        absolute[name] = abs(value)
        scale[name] = summand
    return ResidualEvaluation(ResidualVector.from_channels(absolute), ResidualVector.from_channels(scale))


def evaluate_residuals(sys: SystemInstance, p) -> ResidualEvaluation:
    """All nine channels at p from a single evaluation of the field jets."""
    return evaluate_jets(sys.jets(p))


def residual_lapse(sys: SystemInstance, p) -> float:
    return abs(lapse_equation(sys.jets(p))[0])


def residual_maxwell(sys: SystemInstance, p) -> float:
    return abs(maxwell_equation(sys.jets(p))[0])


def residual_hessian(sys: SystemInstance, p) -> np.ndarray:
    """Signed residual tensor of the Hessian equation (use .max() of abs for the channel)."""
    return hessian_equation(sys.jets(p))[0]


def residual_trace(sys: SystemInstance, p) -> float:
    return abs(trace_equation(sys.jets(p))[0])


def residual_lemma23(sys: SystemInstance, p) -> float:
    return abs(expanded_trace_equation(sys.jets(p))[0])


def residual_theo1(sys: SystemInstance, p) -> Theo1Residuals:
    coords = coordinate_equations(sys.jets(p))
    return Theo1Residuals(
        offdiag_max=coords["t1_offdiag"][0],
        diag_max=coords["t1_diag"][0],
        psi=abs(coords["t1_psi"][0]),
        N=abs(coords["t1_N"][0]),
    )
