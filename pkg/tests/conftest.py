"""Shared fixtures: reference systems, conformal factors and point batches."""

from pathlib import Path

import numpy as np
import pytest

from electrovac.core.invariants import DilationInvariant
from electrovac.core.jetcore import Coordinate, LinearCombination, Power
from electrovac.core.solutions import build_dilation, build_multicenter
from electrovac.shared.utils import make_rng


CONFIG_DIR = Path(__file__).resolve().parent.parent / "data" / "configs"


def sphere_factor(n: int):
    """phi = 1 + |x|^2 / 4, the round unit sphere under g / phi^2."""
    return LinearCombination([(0.25, Power(Coordinate(k, n), 2)) for k in range(n)], 1.0)


def points_away_from(rng: np.random.Generator, count: int, n: int, centers=(), radius=0.5, half_width=2.0):
    """Uniform points of [-half_width, half_width]^n at distance >= radius from every center."""
    centers = np.asarray(centers, dtype=float).reshape(-1, n)
    found = []
    while len(found) < count:
        p = rng.uniform(-half_width, half_width, size=n)
        if centers.size and np.min(np.linalg.norm(centers - p, axis=1)) < radius:
            continue
        found.append(p)
    return np.array(found)


def points_off_hyperplane(rng: np.random.Generator, count: int, b_full, min_gap=0.5, half_width=2.0):
    """Uniform points with |b . p| >= min_gap."""
    found = []
    while len(found) < count:
        p = rng.uniform(-half_width, half_width, size=len(b_full))
        if abs(float(np.dot(b_full, p))) >= min_gap:
            found.append(p)
    return np.array(found)


@pytest.fixture
def rng():
    return make_rng(2024, stream=0)


@pytest.fixture(scope="session")
def mp_single():
    """U = 1 + 1/r in R^3."""
    return build_multicenter(3, [[0.0, 0.0, 0.0]], [1.0], k=1.0, k1=-1.0)


@pytest.fixture(scope="session")
def mp_three():
    return build_multicenter(
        4,
        [[1.0, 0.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.5, 0.0]],
        [0.5, 0.5, 1.0],
    )


@pytest.fixture(scope="session")
def dilation_inv():
    """xi = x1 / (x1 + x2): eta = 2, theta = -2, delta = 1, D = 4."""
    return DilationInvariant(3, [1.0], [1.0, 1.0])


@pytest.fixture(scope="session")
def dilation_n3(dilation_inv):
    return build_dilation(3, dilation_inv, k=1.0, k1=2.0)


@pytest.fixture
def config_path():
    def _path(name: str) -> str:
        return str(CONFIG_DIR / name)
    return _path
