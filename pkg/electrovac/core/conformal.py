"""
Operators of the conformal metric g_bar = g / phi^2 over Euclidean R^n.

All tensors are Cartesian components in the flat chart. The `*_jets`
variants work on precomputed jets so a residual evaluation differentiates
each field once; the frame-level functions evaluate the fields themselves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from electrovac.core.jetcore import Jet2, ScalarField, eval_jet
from electrovac.shared.utils import NonPositiveConformalFactorError


@dataclass(frozen=True)
class ConformalFrame:
    """Conformal factor phi of g_bar = g / phi^2."""

    phi: ScalarField

    @property
    def n(self) -> int:
        return self.phi.n

    def phi_jet(self, p: Sequence[float]) -> Jet2:
        jet = eval_jet(self.phi, p)
        check_conformal_factor(jet)
        return jet


def check_conformal_factor(phi: Jet2):
    if not phi.value > 0.0:
        raise NonPositiveConformalFactorError(f"phi = {phi.value:.6g} is not positive")


# -- jet level -------------------------------------------------------------

def christoffel_jets(phi: Jet2) -> np.ndarray:
    """Gamma[k, i, j] = d_ki f_j + d_kj f_i - d_ij f_k with f = -grad(phi)/phi."""
    n = phi.n
    f = -phi.gradient / phi.value
    eye = np.eye(n)
    return (
        np.einsum("ki,j->kij", eye, f)
        + np.einsum("kj,i->kij", eye, f)
        - np.einsum("ij,k->kij", eye, f)
    )


def hessian_bar_jets(phi: Jet2, F: Jet2) -> np.ndarray:
    gp, gf = phi.gradient, F.gradient
    mixed = (np.outer(gp, gf) + np.outer(gf, gp)) / phi.value
    return F.hessian + mixed - (float(gp @ gf) / phi.value) * np.eye(phi.n)


def hessian_bar_christoffel_jets(phi: Jet2, F: Jet2) -> np.ndarray:
    gamma = christoffel_jets(phi)
    return F.hessian - np.einsum("kij,k->ij", gamma, F.gradient)


def laplacian_bar_jets(phi: Jet2, F: Jet2) -> float:
    n = phi.n
    p = phi.value
    return p * p * F.laplacian - (n - 2) * p * float(phi.gradient @ F.gradient)


def ricci_bar_jets(phi: Jet2) -> np.ndarray:
    n = phi.n
    p = phi.value
    trace_part = p * phi.laplacian - (n - 1) * phi.grad_norm2
    return ((n - 2) * p * phi.hessian + trace_part * np.eye(n)) / (p * p)


def scalar_curvature_bar_jets(phi: Jet2) -> float:
    n = phi.n
    return (n - 1) * (2.0 * phi.value * phi.laplacian - n * phi.grad_norm2)


def inner_bar_jets(phi: Jet2, F: Jet2, G: Jet2) -> float:
    return phi.value * phi.value * float(F.gradient @ G.gradient)


def metric_bar(phi: Jet2) -> np.ndarray:
    return np.eye(phi.n) / (phi.value * phi.value)


# -- frame level -----------------------------------------------------------

def christoffel(frame: ConformalFrame, p) -> np.ndarray:
    """All n^3 Christoffel symbols Gamma_bar^k_ij, indexed [k, i, j]."""
    return christoffel_jets(frame.phi_jet(p))


def hessian_bar(frame: ConformalFrame, F: ScalarField, p) -> np.ndarray:
    return hessian_bar_jets(frame.phi_jet(p), eval_jet(F, p))


def hessian_bar_via_christoffel(frame: ConformalFrame, F: ScalarField, p) -> np.ndarray:
    """F_ij - Gamma^k_ij F_k; second path used to check hessian_bar."""
    return hessian_bar_christoffel_jets(frame.phi_jet(p), eval_jet(F, p))


def laplacian_bar(frame: ConformalFrame, F: ScalarField, p) -> float:
    return laplacian_bar_jets(frame.phi_jet(p), eval_jet(F, p))


def ricci_bar(frame: ConformalFrame, p) -> np.ndarray:
    return ricci_bar_jets(frame.phi_jet(p))


def scalar_curvature_bar(frame: ConformalFrame, p) -> float:
    return scalar_curvature_bar_jets(frame.phi_jet(p))


def inner_bar(frame: ConformalFrame, F: ScalarField, G: ScalarField, p) -> float:
    return inner_bar_jets(frame.phi_jet(p), eval_jet(F, p), eval_jet(G, p))


def grad_norm_bar(frame: ConformalFrame, F: ScalarField, p) -> float:
    phi = frame.phi_jet(p)
    jet = eval_jet(F, p)
    return inner_bar_jets(phi, jet, jet)
