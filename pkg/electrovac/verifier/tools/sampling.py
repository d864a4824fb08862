"""
Sampling Domains

A Region is an axis-aligned box with exclusion predicates: balls around
the centers of a multi-center solution, a margin around the hyperplane
P = 0 of a dilation invariant, the xi-window covered by lifted profiles,
and positivity of the lapse. Points are drawn uniformly from the box and
kept only when every predicate accepts them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from electrovac.core.invariants import EPS_CENTER, DilationInvariant, HarmonicPoleInvariant
from electrovac.core.jetcore import ScalarField, eval_jet
from electrovac.core.residuals import SystemInstance
from electrovac.core.solutions import HYPERPLANE_MARGIN, DilationMP, MultiCenterMP
from electrovac.shared.utils import (
    DomainViolationError,
    EmptyRegionError,
    InvalidParameterError,
    NonFiniteResultError,
    OutOfProfileRangeError,
    logger,
    make_rng,
)


REJECTION_REASONS = (
    "center_ball",
    "hyperplane",
    "profile_range",
    "nonpositive_lapse",
    "singular",
    "evaluation_failure",
)

OVERSAMPLING = 100
DEFAULT_HALF_WIDTH = 2.0


@dataclass(frozen=True, eq=False)
class Region:
    """
    Sampling box plus exclusion predicates.

    Attributes:
        lower, upper: Box corners.
        centers: (k, n) array of excluded centers (may be empty).
        eps_center: Radius of the excluded balls.
        hyperplane: Normal b of the excluded hyperplane b.x = 0, or None.
        margin: Relative half-width of the hyperplane exclusion.
        invariant: Field whose value must lie inside xi_window.
        xi_window: Closed interval of admissible invariant values.
    """

    lower: np.ndarray
    upper: np.ndarray
    centers: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    eps_center: float = EPS_CENTER
    hyperplane: Optional[np.ndarray] = None
    margin: float = HYPERPLANE_MARGIN
    invariant: Optional[ScalarField] = None
    xi_window: Optional[tuple[float, float]] = None

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise InvalidParameterError("box corners must be vectors of equal length")
        if not np.all(upper > lower):
            raise InvalidParameterError(f"empty box: lower={lower.tolist()}, upper={upper.tolist()}")
        if self.eps_center <= 0.0 or self.margin <= 0.0:
            raise InvalidParameterError("exclusion radii must be positive")
        centers = np.asarray(self.centers, dtype=float)
        centers = centers.reshape(-1, lower.size) if centers.size else np.empty((0, lower.size))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "centers", centers)
        if self.hyperplane is not None:
            object.__setattr__(self, "hyperplane", np.asarray(self.hyperplane, dtype=float))

    @property
    def n(self) -> int:
        return self.lower.size

    @classmethod
    def box(
        cls,
        lower: Sequence[float],
        upper: Sequence[float],
        centers: Sequence[Sequence[float]] = (),
        eps_center: float = EPS_CENTER,
        hyperplane: Optional[Sequence[float]] = None,
        margin: float = HYPERPLANE_MARGIN,
    ) -> "Region":
        return cls(
            np.asarray(lower, dtype=float),
            np.asarray(upper, dtype=float),
            np.asarray(centers, dtype=float),
            eps_center,
            None if hyperplane is None else np.asarray(hyperplane, dtype=float),
            margin,
        )

    @classmethod
    def from_system(
        cls,
        system: SystemInstance,
        lower: Optional[Sequence[float]] = None,
        upper: Optional[Sequence[float]] = None,
        eps_center: float = EPS_CENTER,
        margin: float = HYPERPLANE_MARGIN,
    ) -> "Region":
        """
        Region whose exclusions follow the family the system was built from.

        The box defaults to [-2, 2]^n.
        """
        n = system.n
        lower = -DEFAULT_HALF_WIDTH * np.ones(n) if lower is None else np.asarray(lower, dtype=float)
        upper = DEFAULT_HALF_WIDTH * np.ones(n) if upper is None else np.asarray(upper, dtype=float)
        if lower.shape != (n,) or upper.shape != (n,):
            raise InvalidParameterError(f"region corners need {n} coordinates")

        solution = system.solution
        centers = np.empty((0, n))
        hyperplane = None
        invariant = None
        window = None

        if isinstance(solution, MultiCenterMP):
            centers = solution.centers
        elif isinstance(solution, DilationMP):
            hyperplane = solution.invariant.b_full
        elif solution is not None and hasattr(solution, "invariant") and hasattr(solution, "interval"):
            # lifted profiles
            invariant = solution.invariant
            window = solution.interval
            if isinstance(invariant, DilationInvariant):
                hyperplane = invariant.b_full
            elif isinstance(invariant, HarmonicPoleInvariant):
                centers = invariant.centers

        return cls(lower, upper, centers, eps_center, hyperplane, margin, invariant, window)

    def classify(self, p: np.ndarray, system: Optional[SystemInstance] = None) -> Optional[str]:
        """First exclusion predicate rejecting p, or None when p is admissible."""
        if self.centers.size:
            if float(np.min(np.linalg.norm(self.centers - p, axis=1))) < self.eps_center:
                return "center_ball"
        if self.hyperplane is not None:
            if abs(float(self.hyperplane @ p)) < self.margin * (1.0 + float(np.linalg.norm(p))):
                return "hyperplane"
        if self.invariant is not None and self.xi_window is not None:
            try:
                xi = eval_jet(self.invariant, p).value
            except (DomainViolationError, NonFiniteResultError):
                return "singular"
            lo, hi = self.xi_window
            if not lo <= xi <= hi:
                return "profile_range"
        if system is not None:
            try:
                lapse = eval_jet(system.N, p).value
            except OutOfProfileRangeError:
                return "profile_range"
            except (DomainViolationError, NonFiniteResultError):
                return "singular"
            if not lapse > 0.0:
                return "nonpositive_lapse"
        return None

    def to_dict(self) -> dict:
        return {
            "lower": self.lower.tolist(),
            "upper": self.upper.tolist(),
            "centers": self.centers.tolist(),
            "eps_center": self.eps_center,
            "hyperplane": None if self.hyperplane is None else self.hyperplane.tolist(),
            "margin": self.margin,
            "xi_window": None if self.xi_window is None else list(self.xi_window),
        }


@dataclass
class SampleSet:
    """Accepted points with the rejection histogram of the draws that produced them."""

    points: np.ndarray
    requested: int
    rejections: dict[str, int]

    @property
    def accepted(self) -> int:
        return len(self.points)


def empty_histogram() -> dict[str, int]:
    return {reason: 0 for reason in REJECTION_REASONS}


def sample_domain(
    region: Region,
    count: int,
    seed: int = 0,
    system: Optional[SystemInstance] = None,
    batch: int = 256,
) -> SampleSet:
    """
    Draw exactly `count` admissible points, uniform on the box conditioned on the predicates.

    Args:
        region: Box and exclusion predicates.
        count: Number of points to return.
        seed: Seed of the counter-based stream.
        system: When given, points where N <= 0 or the fields are singular are rejected.
        batch: Uniform draws generated per round.

    Returns:
        SampleSet; `requested` counts every draw examined.

    Raises:
        EmptyRegionError: Fewer than `count` points accepted within 100 * count draws.
    """
    if count < 1:
        raise InvalidParameterError(f"count must be positive, got {count}")
    if system is not None and system.n != region.n:
        raise InvalidParameterError(f"region has n={region.n}, system has n={system.n}")

    rng = make_rng(seed, stream=0)
    budget = OVERSAMPLING * count
    rejections = empty_histogram()
    accepted: list[np.ndarray] = []
    draws = 0

    while len(accepted) < count:
        if draws >= budget:
            raise EmptyRegionError(
                f"accepted {len(accepted)} of {count} points after {draws} draws; rejections {rejections}"
            )
        chunk = rng.uniform(region.lower, region.upper, size=(min(batch, budget - draws), region.n))
        for p in chunk:
            draws += 1
            reason = region.classify(p, system)
            if reason is None:
                accepted.append(p)
                if len(accepted) == count:
                    break
            else:
                rejections[reason] += 1

    logger.debug(f"sampled {count} points in {draws} draws, rejections {rejections}")
    return SampleSet(np.array(accepted), draws, rejections)
