"""
Closed-Form Solution Families

Majumdar-Papapetrou class systems built from a positive potential U = 1/N:
    N = 1/U,  phi = N^(1/(n-2)),  psi = sign * c_n * (1 - N),  Lambda = 0
with c_n = sqrt((n-1)/(2(n-2))). Two families are shipped:

- MultiCenterMP: U = sum_l k lambda_l / r_l^(n-2) - k1
- DilationMP:    U = k1 + (2k/sqrt(D)) arctan((2 eta xi + theta)/sqrt(D))

plus the flat Minkowski instance, the MP structural identities and the
uniform bounds of the dilation lapse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from electrovac.core.invariants import EPS_CENTER, DilationInvariant, HarmonicPoleInvariant
from electrovac.core.jetcore import (
    Affine,
    Compose,
    Constant,
    LinearCombination,
    Power,
    ScalarField,
    arctan,
    eval_jet,
)
from electrovac.core.residuals import SystemInstance
from electrovac.shared.utils import (
    DomainViolationError,
    InvalidParameterError,
    NonPositiveLowerBoundError,
    ZeroSlopeError,
    logger,
)


HYPERPLANE_MARGIN = 1e-6
FORM_AGREEMENT_TOL = 1e-12


def mp_coefficient(n: int) -> float:
    """sqrt((n-1)/(2(n-2))), equal to 1 at n = 3."""
    return math.sqrt((n - 1) / (2.0 * (n - 2)))


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise InvalidParameterError(f"sign must be +1 or -1, got {sign}")
    return int(sign)


def _check_slope(k: float) -> float:
    if k == 0.0:
        raise ZeroSlopeError("k must be non-null")
    return float(k)


@dataclass(frozen=True)
class MPProfile:
    n: int
    sign: int
    k: float
    k1: float

    @property
    def coefficient(self) -> float:
        return mp_coefficient(self.n)


# ============================================================
# CONSTRUCTORS
# ============================================================

def mp_system_from_potential(
    U: ScalarField,
    n: int,
    sign: int = 1,
    label: str = "mp",
    descriptor: Optional[dict] = None,
    solution: Any = None,
) -> SystemInstance:
    """
    Build the MP-class system determined by a potential U = 1/N.

    Args:
        U: Positive potential field on the domain.
        n: Dimension.
        sign: Branch of psi (+1 or -1).
        label: Short name used in logs and reports.
        descriptor: JSON descriptor of the source family.
        solution: The family object, kept for region construction.

    Returns:
        SystemInstance with Lambda = 0.
    """
    sign = _check_sign(sign)
    if U.n != n:
        raise InvalidParameterError(f"potential has n={U.n}, expected n={n}")
    N = 1.0 / U
    phi = Power(N, 1.0 / (n - 2))
    c = sign * mp_coefficient(n)
    psi = LinearCombination([(-c, N)], c)
    return SystemInstance(
        n=n,
        phi=phi,
        N=N,
        psi=psi,
        Lambda=0.0,
        label=label,
        descriptor=descriptor or {"family": label, "n": n, "sign": sign},
        solution=solution,
    )


def minkowski(n: int, Lambda: float = 0.0) -> SystemInstance:
    """Flat data N = phi = 1, psi = 0 (a solution only when Lambda = 0)."""
    return SystemInstance(
        n=n,
        phi=Constant(1.0, n),
        N=Constant(1.0, n),
        psi=Constant(0.0, n),
        Lambda=float(Lambda),
        label="minkowski",
        descriptor={"family": "minkowski", "n": n, "Lambda": float(Lambda)},
    )


@dataclass(frozen=True)
class MultiCenterMP:
    profile: MPProfile
    invariant: HarmonicPoleInvariant

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def centers(self) -> np.ndarray:
        return self.invariant.centers

    def potential_field(self) -> ScalarField:
        # U = -k xi - k1 with xi = -sum lambda_l r_l^(2-n)
        return LinearCombination([(-self.profile.k, self.invariant)], -self.profile.k1)

    def to_descriptor(self) -> dict:
        return {
            "family": "multicenter",
            "n": self.n,
            "centers": self.invariant.centers.tolist(),
            "weights": self.invariant.weights.tolist(),
            "k": self.profile.k,
            "k1": self.profile.k1,
            "sign": self.profile.sign,
        }


def build_multicenter(
    n: int,
    centers: Sequence[Sequence[float]],
    weights: Sequence[float],
    k: float = 1.0,
    k1: float = -1.0,
    sign: int = 1,
    eps_center: float = EPS_CENTER,
) -> SystemInstance:
    """
    Multi-center MP system; k = 1, k1 = -1 gives U = 1 + sum lambda_l / r_l^(n-2).

    Raises:
        CoincidentCentersError: Two centers are equal.
        ZeroSlopeError: k = 0.
    """
    k = _check_slope(k)
    profile = MPProfile(n, _check_sign(sign), k, float(k1))
    invariant = HarmonicPoleInvariant(n, centers, weights, eps_center)
    solution = MultiCenterMP(profile, invariant)
    logger.debug(f"multicenter MP: n={n}, {len(invariant.centers)} centers, k={k}, k1={k1}")
    return mp_system_from_potential(
        solution.potential_field(), n, sign, "multicenter", solution.to_descriptor(), solution
    )


@dataclass(frozen=True)
class DilationMP:
    profile: MPProfile
    invariant: DilationInvariant

    @property
    def n(self) -> int:
        return self.profile.n

    @property
    def sqrt_disc(self) -> float:
        return math.sqrt(self.invariant.disc)

    def potential_field(self) -> ScalarField:
        inv, r = self.invariant, self.sqrt_disc
        inner = Compose(Affine(2.0 * inv.eta / r, inv.theta_q / r), inv)
        return LinearCombination([(2.0 * self.profile.k / r, arctan(inner))], self.profile.k1)

    def potential(self, xi: float) -> float:
        """U as a function of the invariant value."""
        inv, r = self.invariant, self.sqrt_disc
        return self.profile.k1 + (2.0 * self.profile.k / r) * math.atan(
            (2.0 * inv.eta * xi + inv.theta_q) / r
        )

    def ratio_form(self, p) -> float:
        """U written through M and P directly: arctan((theta P + 2 eta M)/(sqrt(D) P))."""
        inv, r = self.invariant, self.sqrt_disc
        M, P = inv.numerator(p), inv.denominator(p)
        if P == 0.0:
            raise DomainViolationError(f"P vanishes at {p}")
        return self.profile.k1 + (2.0 * self.profile.k / r) * math.atan(
            (inv.theta_q * P + 2.0 * inv.eta * M) / (r * P)
        )

    def to_descriptor(self) -> dict:
        return {
            "family": "dilation",
            "n": self.n,
            "a": list(self.invariant.a),
            "b": list(self.invariant.b),
            "k": self.profile.k,
            "k1": self.profile.k1,
            "sign": self.profile.sign,
        }


def hyperplane_margin(p) -> float:
    return HYPERPLANE_MARGIN * (1.0 + float(np.linalg.norm(p)))


def _probe_points(inv: DilationInvariant) -> list[np.ndarray]:
    eye = np.eye(inv.n)
    probes = [sign * eye[k] for k in range(inv.m2) for sign in (1.0, -1.0)]
    probes.append(np.ones(inv.n))
    return probes


def build_dilation(
    n: int,
    inv: DilationInvariant,
    k: float,
    k1: float,
    sign: int = 1,
) -> SystemInstance:
    """
    Dilation-invariant MP system with U = k1 + (2k/sqrt(D)) arctan((2 eta xi + theta)/sqrt(D)).

    Both arctan displays are compared on the probe set {+-e_k, k <= m2} and
    the all-ones vector, skipping probes too close to P = 0.

    Raises:
        ZeroSlopeError: k = 0.
        DegenerateDiscriminantError: raised by the invariant when D <= 0.
    """
    k = _check_slope(k)
    if inv.n != n:
        raise InvalidParameterError(f"invariant has n={inv.n}, expected n={n}")
    solution = DilationMP(MPProfile(n, _check_sign(sign), k, float(k1)), inv)

    for p in _probe_points(inv):
        if abs(inv.denominator(p)) < hyperplane_margin(p):
            continue
        U = solution.potential(eval_jet(inv, p).value)
        gap = abs(U - solution.ratio_form(p))
        if gap > FORM_AGREEMENT_TOL * (1.0 + abs(U)):
            raise InvalidParameterError(f"arctan forms disagree by {gap:.3e} at {p.tolist()}")

    logger.debug(f"dilation MP: n={n}, a={inv.a}, b={inv.b}, D={inv.disc:g}")
    return mp_system_from_potential(
        solution.potential_field(), n, sign, "dilation", solution.to_descriptor(), solution
    )


# ============================================================
# STRUCTURAL IDENTITIES AND BOUNDS
# ============================================================

def mp_identity_residuals(sys: SystemInstance, p) -> tuple[float, float]:
    """
    Deviation from the MP relations phi'/phi = N'/((n-2)N) and |grad psi|^2 = c_n^2 |grad N|^2.

    Returns:
        (r_phi, r_psi): max component of (n-2) grad(phi)/phi - grad(N)/N, and
        the gap between |grad psi|^2 and c_n^2 |grad N|^2 relative to
        1 + the larger of the two.
    """
    jets = sys.jets(p)
    n = sys.n
    log_gap = (n - 2) * jets.phi.gradient / jets.phi.value - jets.N.gradient / jets.N.value
    r_phi = float(np.max(np.abs(log_gap)))
    electric = jets.psi.grad_norm2
    gravitational = mp_coefficient(n) ** 2 * jets.N.grad_norm2
    r_psi = abs(electric - gravitational) / (1.0 + max(electric, gravitational))
    return r_phi, r_psi


def lapse_bounds(sol: DilationMP) -> tuple[float, float]:
    """(A, B) = k1 -+ k pi / sqrt(D); U lies strictly between them."""
    spread = sol.profile.k * math.pi / sol.sqrt_disc
    return sol.profile.k1 - spread, sol.profile.k1 + spread


def uniform_equivalence(sol: DilationMP, region: Any = None) -> tuple[float, float]:
    """
    Constants c1, c2 with c1 g <= g_bar <= c2 g away from P = 0.

    g_bar_11 / g_11 = 1/phi^2 = U^(2/(n-2)), so the constants are the
    bounds of U raised to 2/(n-2).

    Args:
        sol: A dilation solution.
        region: Optional sampling region; it must exclude the hyperplane P = 0.

    Raises:
        NonPositiveLowerBoundError: min(A, B) <= 0.
    """
    if region is not None and getattr(region, "hyperplane", None) is None:
        raise DomainViolationError("region does not exclude the hyperplane P = 0")
    A, B = lapse_bounds(sol)
    lo, hi = min(A, B), max(A, B)
    if lo <= 0.0:
        raise NonPositiveLowerBoundError(f"lower bound {lo:.6g} of N^-1 is not positive")
    exponent = 2.0 / (sol.n - 2)
    return lo ** exponent, hi ** exponent


# ============================================================
# DESCRIPTORS
# ============================================================

def system_from_descriptor(desc: Mapping[str, Any]) -> SystemInstance:
    """
    Build a system from its JSON descriptor (`family` plus parameters).

    An optional `perturbation` entry applies `lambda_override` and
    `lapse_epsilon` / `axis` after construction.
    """
    family = desc.get("family")
    n = int(desc["n"])
    if family == "minkowski":
        sys = minkowski(n, float(desc.get("Lambda", 0.0)))
    elif family == "multicenter":
        sys = build_multicenter(
            n,
            desc["centers"],
            desc["weights"],
            float(desc.get("k", 1.0)),
            float(desc.get("k1", -1.0)),
            int(desc.get("sign", 1)),
        )
    elif family == "dilation":
        sys = build_dilation(
            n,
            DilationInvariant(n, desc["a"], desc["b"]),
            float(desc["k"]),
            float(desc["k1"]),
            int(desc.get("sign", 1)),
        )
    else:
        raise InvalidParameterError(f"unknown solution family: {family!r}")

    perturbation = desc.get("perturbation") or {}
    if perturbation.get("lambda_override") is not None:
        sys = sys.with_lambda(perturbation["lambda_override"])
    if perturbation.get("lapse_epsilon"):
        sys = sys.perturbed(float(perturbation["lapse_epsilon"]), int(perturbation.get("axis", 0)))
    return sys
