"""
Residual Aggregation

verify() samples a region, evaluates the nine residual channels at every
accepted point on a thread pool, and reduces them to per-channel max,
mean and 95th percentile. Reductions are order independent: the mean uses
exactly rounded summation, max and percentile work on sorted values.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Mapping, Optional

import numpy as np

from electrovac.core.residuals import CHANNELS, HESSIAN_CHANNELS, SystemInstance, evaluate_residuals
from electrovac.shared.utils import (
    ElectrovacError,
    InvalidParameterError,
    logger,
    resolve_threads,
    stable_mean,
)

from .export import ChannelStats, PointCounts, ResidualReport
from .sampling import Region, sample_domain


FIRST_ORDER_TOLERANCE = 1e-8
HESSIAN_TOLERANCE = 1e-7
FAILURE_BUDGET = 0.01


def default_tolerances() -> dict[str, float]:
    return {
        name: HESSIAN_TOLERANCE if name in HESSIAN_CHANNELS else FIRST_ORDER_TOLERANCE
        for name in CHANNELS
    }


def resolve_tolerances(
    overrides: Optional[Mapping[str, float]] = None,
    default: Optional[float] = None,
) -> dict[str, float]:
    """
    Per-channel tolerances.

    Args:
        overrides: Channel -> tolerance entries replacing the defaults.
        default: Uniform base tolerance instead of the 1e-8 / 1e-7 split.

    Raises:
        InvalidParameterError: Unknown channel or non-positive tolerance.
    """
    tolerances = default_tolerances() if default is None else {name: float(default) for name in CHANNELS}
    for name, value in (overrides or {}).items():
        if name not in tolerances:
            raise InvalidParameterError(f"unknown residual channel {name!r}")
        if not value > 0.0:
            raise InvalidParameterError(f"tolerance for {name} must be positive, got {value}")
        tolerances[name] = float(value)
    return tolerances


def aggregate(values: np.ndarray, tolerance: float) -> ChannelStats:
    """max / mean / p95 of one channel; empty input gives None statistics."""
    if values.size == 0:
        return ChannelStats(max=None, mean=None, p95=None, tolerance=tolerance)
    ordered = np.sort(values)
    return ChannelStats(
        max=float(ordered[-1]),
        mean=stable_mean(ordered.tolist()),
        p95=float(np.percentile(ordered, 95.0)),
        tolerance=tolerance,
    )


def _evaluate_point(system: SystemInstance, p: np.ndarray) -> Optional[np.ndarray]:
    try:
        channels = evaluate_residuals(system, p).normalized().as_channels()
    except ElectrovacError as e:
        logger.debug(f"evaluation failed at {p.tolist()}: {type(e).__name__}: {e}")
        return None
    row = np.array([channels[name] for name in CHANNELS])
    if not np.all(np.isfinite(row)):
        logger.debug(f"non-finite residuals at {p.tolist()}")
        return None
    return row


def evaluate_points(
    system: SystemInstance,
    points: np.ndarray,
    threads: Optional[int] = None,
) -> list[Optional[np.ndarray]]:
    """Normalized residual rows in sample order (None where evaluation failed)."""
    workers = resolve_threads(threads)
    if workers == 1 or len(points) < 2:
        return [_evaluate_point(system, p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: _evaluate_point(system, p), points))


def verify(
    system: SystemInstance,
    region: Region,
    count: int,
    tolerances: Optional[Mapping[str, float]] = None,
    seed: int = 0,
    threads: Optional[int] = None,
) -> ResidualReport:
    """
    Sample a region and certify every residual channel of a system.

    Args:
        system: The candidate electrostatic system.
        region: Sampling box and exclusions.
        count: Number of admissible points to evaluate.
        tolerances: Complete channel -> tolerance map (see resolve_tolerances);
                    missing channels fall back to the defaults.
        seed: Seed of the sampling stream.
        threads: Worker threads (None reads ELECTROVAC_THREADS).

    Returns:
        ResidualReport carrying the evaluated samples for CSV export.

    Raises:
        EmptyRegionError: Propagated from sampling.
    """
    tolerances = resolve_tolerances(tolerances)
    sample = sample_domain(region, count, seed, system)
    rows = evaluate_points(system, sample.points, threads)

    good = [i for i, row in enumerate(rows) if row is not None]
    failures = len(rows) - len(good)
    matrix = np.array([rows[i] for i in good]) if good else np.empty((0, len(CHANNELS)))
    points = sample.points[good] if good else np.empty((0, system.n))

    channels = {
        name: aggregate(matrix[:, j], tolerances[name]) for j, name in enumerate(CHANNELS)
    }
    rejections = {**sample.rejections, "evaluation_failure": sample.rejections["evaluation_failure"] + failures}

    within = all(stats.max is not None and stats.max <= stats.tolerance for stats in channels.values())
    budget_ok = failures <= FAILURE_BUDGET * count
    verdict = "pass" if within and budget_ok else "fail"
    if not budget_ok:
        logger.warning(f"{failures} of {count} points failed to evaluate (budget {FAILURE_BUDGET:.0%})")

    report = ResidualReport(
        solution=system.descriptor,
        region=region.to_dict(),
        seed=seed,
        channels=channels,
        points=PointCounts(requested=sample.requested, accepted=len(good), rejections=rejections),
        verdict=verdict,
    )
    logger.info(
        f"verify {system.label}: {len(good)}/{count} points, verdict {verdict}"
        + ("" if verdict == "pass" else f" (failing: {', '.join(report.failing_channels()) or 'failure budget'})")
    )
    return report.attach_samples(points, matrix)
