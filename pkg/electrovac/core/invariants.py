"""
Invariant Fields

Ansatz functions xi whose level sets carry the symmetry of a solution:
- QuadricInvariant:  Gamma(sum tau x_k^2 + gamma_k x_k + theta_k)
- DilationInvariant: (sum a_i x_i) / (sum b_j x_j)
- HarmonicPoleInvariant: -sum lambda_l r_l^(2-n)

Each carries closed-form jets, an equivalent composition through jetcore,
and (where known) the level ratio h(xi) = lap(xi) / |grad xi|^2.
"""

from __future__ import annotations

import math
from abc import abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from electrovac.core.jetcore import (
    EPS_SING,
    Compose,
    Coordinate,
    Jet2,
    LinearCombination,
    LinearForm,
    Power,
    Quotient,
    ScalarField,
    UnaryFunction,
    eval_jet,
    polynomial,
)
from electrovac.shared.utils import (
    CoincidentCentersError,
    DegenerateDiscriminantError,
    DegenerateGradientError,
    DimensionMismatchError,
    DomainViolationError,
    EmptyLevelSetError,
    InvalidParameterError,
    NonFiniteResultError,
    SingularPointError,
    logger,
    make_rng,
)


EPS_CENTER = 1e-6
EPS_GRAD = 1e-10
TOL_SEP = 1e-8


class InvariantField(ScalarField):
    """Common interface of the three ansatz families."""

    kind: str = "invariant"

    @abstractmethod
    def generic_field(self) -> ScalarField:
        """The same xi assembled from generic jetcore nodes."""

    def level_ratio(self) -> Optional[Callable[[float], float]]:
        """h(xi) = lap(xi)/|grad xi|^2 as a function of xi, when known."""
        return None

    @abstractmethod
    def to_descriptor(self) -> dict:
        ...


# ============================================================
# QUADRIC
# ============================================================

class QuadricInvariant(InvariantField):
    kind = "quadric"

    def __init__(
        self,
        n: int,
        tau: float,
        gamma: Sequence[float],
        theta: Sequence[float],
        outer: Optional[UnaryFunction] = None,
    ):
        gamma = np.asarray(gamma, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if n < 3:
            raise DimensionMismatchError(f"fields need n >= 3, got n={n}")
        if gamma.shape != (n,) or theta.shape != (n,):
            raise DimensionMismatchError(f"gamma and theta must have length n={n}")
        if tau == 0.0 and not np.any(gamma):
            raise InvalidParameterError("quadric invariant is constant: tau and gamma all zero")
        gamma.setflags(write=False)
        theta.setflags(write=False)
        self.n = n
        self.tau = float(tau)
        self.gamma = gamma
        self.theta = theta
        self.outer = outer
        self.beta = sum(float(g * g - 4.0 * self.tau * t) for g, t in zip(gamma, theta))
        self._theta_sum = float(theta.sum())

    def s(self, xi: float) -> float:
        """Coefficient 4 tau xi + beta of the reduced quadric system."""
        return 4.0 * self.tau * xi + self.beta

    def jet(self, p):
        u = Jet2(
            self.tau * float(p @ p) + float(self.gamma @ p) + self._theta_sum,
            2.0 * self.tau * p + self.gamma,
            2.0 * self.tau * np.eye(self.n),
        )
        if self.outer is None:
            return u
        if self.outer.singular(u.value):
            raise SingularPointError(f"{self.outer.name} is singular at u={u.value:.6g}")
        return u.compose(*self.outer.derivatives(u.value))

    def generic_field(self):
        terms = [(self.tau, Power(Coordinate(k, self.n), 2)) for k in range(self.n)]
        terms.append((1.0, LinearForm(self.gamma, self._theta_sum)))
        inner = LinearCombination(terms)
        return inner if self.outer is None else Compose(self.outer, inner)

    def level_ratio(self):
        if self.outer is not None:
            return None
        two_n_tau = 2.0 * self.n * self.tau
        return lambda xi: two_n_tau / self.s(xi)

    def to_descriptor(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "tau": self.tau,
            "gamma": self.gamma.tolist(),
            "theta": self.theta.tolist(),
        }


# ============================================================
# DILATION
# ============================================================

class DilationInvariant(InvariantField):
    """xi = M/P with M = sum_{i<=m1} a_i x_i and P = sum_{j<=m2} b_j x_j."""

    kind = "dilation"

    def __init__(self, n: int, a: Sequence[float], b: Sequence[float], eps_sing: float = EPS_SING):
        if n < 3:
            raise DimensionMismatchError(f"fields need n >= 3, got n={n}")
        a = [float(v) for v in a]
        b = [float(v) for v in b]
        m1, m2 = len(a), len(b)
        if not 1 <= m1 <= m2 <= n:
            raise InvalidParameterError(f"need 1 <= m1 <= m2 <= n, got m1={m1}, m2={m2}, n={n}")
        if sum(a) == 0.0:
            raise InvalidParameterError("sum of a_i must be nonzero")
        if any(v == 0.0 for v in b):
            raise InvalidParameterError("every b_j must be nonzero")

        self.n = n
        self.m1, self.m2 = m1, m2
        self.a, self.b = tuple(a), tuple(b)
        self.eps_sing = eps_sing
        self.a_full = np.zeros(n)
        self.a_full[:m1] = a
        self.b_full = np.zeros(n)
        self.b_full[:m2] = b
        self.a_full.setflags(write=False)
        self.b_full.setflags(write=False)

        self.eta = math.fsum(v * v for v in b)
        self.theta_q = -2.0 * math.fsum(a[k] * b[k] for k in range(m1))
        self.delta = math.fsum(v * v for v in a)
        self.disc = 4.0 * self.eta * self.delta - self.theta_q ** 2
        if self.disc <= 0.0:
            raise DegenerateDiscriminantError(
                f"4*eta*delta - theta^2 = {self.disc:.3e}; xi is constant when it vanishes"
            )

    def quadratic(self, xi: float) -> float:
        """eta xi^2 + theta xi + delta, equal to P^2 |grad xi|^2."""
        return (self.eta * xi + self.theta_q) * xi + self.delta

    def numerator(self, p) -> float:
        return float(self.a_full @ np.asarray(p, dtype=float))

    def denominator(self, p) -> float:
        return float(self.b_full @ np.asarray(p, dtype=float))

    def jet(self, p):
        P = float(self.b_full @ p)
        if abs(P) <= self.eps_sing:
            raise SingularPointError(f"P(x) = {P:.3e} vanishes at {p}")
        xi = float(self.a_full @ p) / P
        gradient = (self.a_full - self.b_full * xi) / P
        hessian = -(np.outer(self.b_full, gradient) + np.outer(gradient, self.b_full)) / P
        return Jet2(xi, gradient, hessian)

    def generic_field(self):
        return Quotient(LinearForm(self.a_full), LinearForm(self.b_full), self.eps_sing)

    def level_ratio(self):
        return lambda xi: (2.0 * self.eta * xi + self.theta_q) / self.quadratic(xi)

    def to_descriptor(self):
        return {"kind": self.kind, "n": self.n, "a": list(self.a), "b": list(self.b)}


# ============================================================
# HARMONIC POLES
# ============================================================

class HarmonicPoleInvariant(InvariantField):
    """xi = -sum_l lambda_l |x - c_l|^(2-n), harmonic away from the centers."""

    kind = "pole"

    def __init__(
        self,
        n: int,
        centers: Sequence[Sequence[float]],
        weights: Sequence[float],
        eps_center: float = EPS_CENTER,
    ):
        if n < 3:
            raise DimensionMismatchError(f"fields need n >= 3, got n={n}")
        centers = np.array(centers, dtype=float)
        weights = np.array(weights, dtype=float)
        if centers.size == 0:
            raise InvalidParameterError("at least one center is required")
        if centers.ndim != 2 or centers.shape[1] != n:
            raise DimensionMismatchError(f"centers must be points of R^{n}, got shape {centers.shape}")
        if weights.shape != (centers.shape[0],):
            raise InvalidParameterError("one weight per center is required")
        for i in range(len(centers)):
            for j in range(i + 1, len(centers)):
                if np.array_equal(centers[i], centers[j]):
                    raise CoincidentCentersError(f"centers {i} and {j} coincide at {centers[i]}")
        centers.setflags(write=False)
        weights.setflags(write=False)
        self.n = n
        self.centers = centers
        self.weights = weights
        self.eps_center = eps_center

    def min_distance(self, p) -> float:
        return float(np.min(np.linalg.norm(self.centers - np.asarray(p, dtype=float), axis=1)))

    def jet(self, p):
        n = self.n
        value = 0.0
        gradient = np.zeros(n)
        hessian = np.zeros((n, n))
        eye = np.eye(n)
        for c, lam in zip(self.centers, self.weights):
            d = p - c
            r2 = float(d @ d)
            r = math.sqrt(r2)
            if r <= self.eps_center:
                raise SingularPointError(f"point {p} within {self.eps_center:g} of center {c}")
            r_n = r ** (-n)
            value -= lam * r ** (2 - n)
            gradient += (n - 2) * lam * r_n * d
            hessian += (n - 2) * lam * r_n * (eye - (n / r2) * np.outer(d, d))
        return Jet2(value, gradient, hessian)

    def generic_field(self):
        terms = []
        for c, lam in zip(self.centers, self.weights):
            r2 = LinearCombination(
                [(1.0, Power(Coordinate(k, self.n) - float(c[k]), 2)) for k in range(self.n)]
            )
            terms.append((-float(lam), Power(r2, (2 - self.n) / 2.0)))
        return LinearCombination(terms)

    def level_ratio(self):
        return lambda xi: 0.0

    def to_descriptor(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "centers": self.centers.tolist(),
            "weights": self.weights.tolist(),
        }


# ============================================================
# OPERATIONS
# ============================================================

def invariant_from_descriptor(desc: Mapping[str, Any]) -> ScalarField:
    """
    Rebuild an invariant from its JSON descriptor.

    Args:
        desc: Mapping with `kind` in {dilation, pole, quadric, polynomial}
              and the parameters of that kind.

    Returns:
        The invariant; `polynomial` yields a plain jetcore field.
    """
    kind = desc.get("kind")
    n = int(desc["n"])
    if kind == "dilation":
        return DilationInvariant(n, desc["a"], desc["b"])
    if kind == "pole":
        return HarmonicPoleInvariant(n, desc["centers"], desc["weights"])
    if kind == "quadric":
        return QuadricInvariant(n, desc["tau"], desc["gamma"], desc["theta"])
    if kind == "polynomial":
        return polynomial(n, desc["terms"])
    raise InvalidParameterError(f"unknown invariant kind: {kind!r}")


def xi_jet(inv: InvariantField, p: Sequence[float]) -> Jet2:
    """Closed-form jet of an invariant; raises SingularPointError on its singular set."""
    return eval_jet(inv, p)


def quadratic_coefficients(inv: DilationInvariant) -> tuple[float, float, float]:
    """(eta, theta, delta) with P^2 |grad xi|^2 = eta xi^2 + theta xi + delta."""
    return inv.eta, inv.theta_q, inv.delta


def fundamental_relation_residual(inv: DilationInvariant, p: Sequence[float]) -> float:
    """|(2 eta xi + theta)/P^2 - lap(xi)| at p."""
    jet = xi_jet(inv, p)
    P = inv.denominator(p)
    return abs((2.0 * inv.eta * jet.value + inv.theta_q) / (P * P) - jet.laplacian)


@dataclass
class LevelSpread:
    level: float
    samples: int
    ratio_min: float
    ratio_max: float
    hessian_spreads: dict[str, float] = field(default_factory=dict)

    @property
    def spread(self) -> float:
        return self.ratio_max - self.ratio_min

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "samples": self.samples,
            "ratio_min": self.ratio_min,
            "ratio_max": self.ratio_max,
            "spread": self.spread,
            "hessian_spreads": dict(sorted(self.hessian_spreads.items())),
        }


@dataclass
class SeparabilityReport:
    levels: list[LevelSpread]
    tol_sep: float

    @property
    def separable(self) -> bool:
        return all(level.spread <= self.tol_sep for level in self.levels)

    @property
    def hessian_ratio_separable(self) -> bool:
        return all(
            s <= self.tol_sep for level in self.levels for s in level.hessian_spreads.values()
        )

    def to_dict(self) -> dict:
        return {
            "verdict": "separable" if self.separable else "non-separable",
            "hessian_ratio_separable": self.hessian_ratio_separable,
            "tol_sep": self.tol_sep,
            "levels": [level.to_dict() for level in self.levels],
        }


def _level_gap(xi: ScalarField, origin: np.ndarray, direction: np.ndarray, c: float):
    def gap(t: float) -> float:
        return xi.value(origin + t * direction) - c
    return gap


def _sample_level(
    xi: ScalarField,
    c: float,
    count: int,
    rng: np.random.Generator,
    lower: np.ndarray,
    upper: np.ndarray,
    root_tol: float,
    grid: int = 65,
) -> list[np.ndarray]:
    n = xi.n
    reach = float(np.linalg.norm(upper - lower))
    ts = np.linspace(-reach, reach, grid)
    found: list[np.ndarray] = []
    attempts = 0
    while len(found) < count and attempts < 200 * count:
        attempts += 1
        origin = rng.uniform(lower, upper)
        direction = rng.normal(size=n)
        direction /= np.linalg.norm(direction)
        gap = _level_gap(xi, origin, direction, c)

        values = []
        for t in ts:
            q = origin + t * direction
            if np.any(q < lower) or np.any(q > upper):
                values.append(None)
                continue
            try:
                values.append(gap(t))
            except (DomainViolationError, NonFiniteResultError, OverflowError, ZeroDivisionError):
                values.append(None)

        brackets = [
            (ts[i], ts[i + 1])
            for i in range(grid - 1)
            if values[i] is not None and values[i + 1] is not None and values[i] * values[i + 1] <= 0.0
        ]
        if not brackets:
            continue
        t0, t1 = brackets[int(rng.integers(len(brackets)))]
        try:
            t_root = brentq(gap, t0, t1, xtol=1e-15, maxiter=200)
        except (ValueError, RuntimeError, DomainViolationError, NonFiniteResultError):
            continue
        q = origin + t_root * direction
        try:
            if abs(gap(t_root)) > root_tol * (1.0 + abs(c)):
                continue  # sign change across a singular set, not a root
        except DomainViolationError:
            continue
        found.append(q)
    return found


def separability_check(
    xi: ScalarField,
    level_values: Sequence[float],
    samples_per_level: int = 64,
    seed: int = 0,
    box: Optional[tuple[Sequence[float], Sequence[float]]] = None,
    tol_sep: float = TOL_SEP,
    eps_grad: float = EPS_GRAD,
    root_tol: float = 1e-10,
) -> SeparabilityReport:
    """
    Check that lap(xi)/|grad xi|^2 is constant on level sets of xi.

    Args:
        xi: The candidate invariant.
        level_values: Levels c to probe.
        samples_per_level: Points located on each level set.
        seed: Seed of the deterministic stream (one sub-stream per level).
        box: (lower, upper) corners of the sampling box; default [-2, 2]^n.
        tol_sep: Largest admissible spread.
        eps_grad: Minimum gradient norm at samples.
        root_tol: Accepted |xi(q) - c| for located points.

    Returns:
        SeparabilityReport with per-level spreads of the Laplacian ratio and
        of the Hessian ratios xi_ij / (xi_i xi_j).
    """
    n = xi.n
    if box is None:
        lower, upper = -2.0 * np.ones(n), 2.0 * np.ones(n)
    else:
        lower, upper = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    if lower.shape != (n,) or upper.shape != (n,) or np.any(upper <= lower):
        raise InvalidParameterError(f"invalid sampling box {box}")

    levels = []
    for index, c in enumerate(level_values):
        rng = make_rng(seed, stream=index)
        points = _sample_level(xi, float(c), samples_per_level, rng, lower, upper, root_tol)
        if not points:
            raise EmptyLevelSetError(f"no points found on level xi = {c} inside the box")
        if len(points) < samples_per_level:
            logger.warning(f"level {c}: located {len(points)} of {samples_per_level} points")

        ratios = []
        pair_values: dict[str, list[float]] = {}
        for q in points:
            jet = eval_jet(xi, q)
            norm2 = jet.grad_norm2
            if math.sqrt(norm2) <= eps_grad:
                raise DegenerateGradientError(f"|grad xi| <= {eps_grad:g} at {q}")
            ratios.append(jet.laplacian / norm2)
            g = jet.gradient
            for i in range(n):
                for j in range(i + 1, n):
                    if abs(g[i] * g[j]) > eps_grad:
                        pair_values.setdefault(f"{i + 1},{j + 1}", []).append(
                            jet.hessian[i, j] / (g[i] * g[j])
                        )

        hessian_spreads = {
            pair: max(values) - min(values) for pair, values in pair_values.items() if len(values) > 1
        }
        level = LevelSpread(float(c), len(points), min(ratios), max(ratios), hessian_spreads)
        logger.debug(f"level {c}: {len(points)} points, spread {level.spread:.3e}")
        levels.append(level)

    return SeparabilityReport(levels, tol_sep)
