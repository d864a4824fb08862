"""
Diagnostics - separability of candidate invariants and the uniform bounds
of the dilation lapse.
"""

from typing import Optional, Sequence

import numpy as np

from electrovac.core.invariants import separability_check
from electrovac.core.jetcore import ScalarField, eval_jet
from electrovac.core.residuals import SystemInstance
from electrovac.core.solutions import DilationMP, lapse_bounds, uniform_equivalence
from electrovac.shared.utils import InvalidParameterError, NonPositiveLowerBoundError, logger

from .sampling import Region, sample_domain


def separability_report(
    xi: ScalarField,
    levels: Sequence[float],
    samples_per_level: int = 64,
    seed: int = 0,
    box: Optional[tuple[Sequence[float], Sequence[float]]] = None,
    tol_sep: float = 1e-8,
) -> dict:
    """
    Run separability_check and shape its result for the CLI.

    Returns:
        Dictionary with `verdict` ("separable" / "non-separable"), the
        per-level spreads, and `max_spread`.
    """
    report = separability_check(xi, levels, samples_per_level, seed, box, tol_sep)
    payload = report.to_dict()
    payload["max_spread"] = max(level.spread for level in report.levels)
    payload["seed"] = seed
    logger.info(f"separability: {payload['verdict']} (max spread {payload['max_spread']:.3e})")
    return payload


def bounds_report(system: SystemInstance, region: Region, count: int, seed: int = 0) -> dict:
    """
    Certified bounds of U = 1/N and of the metric ratio, checked by sampling.

    A and B bound U for every point off P = 0. When min(A, B) > 0 the
    constants c1, c2 bracket g_bar_11 / g_11 = 1/phi^2; the observed ratio
    is computed from phi itself so the exponent of the certificate is
    tested rather than assumed.

    Args:
        system: A dilation MP system.
        region: Region excluding the hyperplane P = 0.
        count: Number of sampled points.
        seed: Sampling seed.

    Returns:
        JSON-ready dictionary; `verdict` is "pass" only when the
        certificate exists and every observation lies inside it.
    """
    solution = system.solution
    if not isinstance(solution, DilationMP):
        raise InvalidParameterError("bounds are defined for dilation solutions only")

    A, B = lapse_bounds(solution)
    sample = sample_domain(region, count, seed)
    potential = solution.potential_field()
    U = np.array([eval_jet(potential, p).value for p in sample.points])
    u_inside = bool(np.all((U > min(A, B)) & (U < max(A, B))))

    result = {
        "A": A,
        "B": B,
        "certified": False,
        "c1": None,
        "c2": None,
        "points": sample.accepted,
        "seed": seed,
        "observed": {"U_min": float(U.min()), "U_max": float(U.max()), "ratio_min": None, "ratio_max": None},
        "U_inside": u_inside,
        "ratio_inside": None,
        "error": None,
    }

    try:
        c1, c2 = uniform_equivalence(solution, region)
    except NonPositiveLowerBoundError as e:
        logger.warning(f"uniform equivalence not certified: {e}")
        result["error"] = e.to_dict()
        result["verdict"] = "fail"
        return result

    ratios = []
    for p in sample.points:
        phi = eval_jet(system.phi, p).value
        ratios.append(1.0 / (phi * phi))
    ratios = np.array(ratios)
    # c1, c2 are images of the open interval (A, B); allow one rounding of pow
    slack = 4.0 * np.finfo(float).eps
    ratio_inside = bool(np.all((ratios >= c1 * (1.0 - slack)) & (ratios <= c2 * (1.0 + slack))))

    result.update(
        certified=True,
        c1=c1,
        c2=c2,
        ratio_inside=ratio_inside,
        observed={
            **result["observed"],
            "ratio_min": float(ratios.min()),
            "ratio_max": float(ratios.max()),
        },
    )
    result["verdict"] = "pass" if u_inside and ratio_inside else "fail"
    logger.info(
        f"bounds: A={A:.12g}, B={B:.12g}, c1={c1:.6g}, c2={c2:.6g}, verdict {result['verdict']}"
    )
    return result
