import numpy as np
import pytest

from electrovac.core.conformal import (
    ConformalFrame,
    christoffel,
    grad_norm_bar,
    hessian_bar,
    inner_bar,
    hessian_bar_via_christoffel,
    laplacian_bar,
    ricci_bar,
    scalar_curvature_bar,
)
from electrovac.core.jetcore import Constant, Coordinate, LinearForm, arctan, exp
from electrovac.shared.utils import NonPositiveConformalFactorError
from tests.conftest import sphere_factor


def _factors(n):
    x = [Coordinate(k, n) for k in range(n)]
    return [
        sphere_factor(n),
        exp(0.3 * x[0] - 0.2 * x[1]),
        2.0 + arctan(x[0] * x[1] + x[2]),
    ]


def _test_field(n):
    x = [Coordinate(k, n) for k in range(n)]
    return x[0] * x[0] * x[1] + exp(0.5 * x[2])


@pytest.mark.parametrize("n", [3, 4])
def test_hessian_forms_agree(n, rng):
    F = _test_field(n)
    for phi in _factors(n):
        frame = ConformalFrame(phi)
        for p in rng.uniform(-1.5, 1.5, size=(200, n)):
            direct = hessian_bar(frame, F, p)
            assembled = hessian_bar_via_christoffel(frame, F, p)
            assert float(np.max(np.abs(direct - assembled))) <= 1e-12 * (1.0 + float(np.max(np.abs(direct))))


@pytest.mark.parametrize("n", [3, 5])
def test_ricci_trace_matches_scalar_curvature(n, rng):
    for phi in _factors(n):
        frame = ConformalFrame(phi)
        for p in rng.uniform(-1.5, 1.5, size=(200, n)):
            ph = frame.phi_jet(p).value
            trace = ph * ph * float(np.trace(ricci_bar(frame, p)))
            R = scalar_curvature_bar(frame, p)
            assert abs(trace - R) <= 1e-10 * (1.0 + abs(R))


@pytest.mark.parametrize("n", [3, 4, 6])
def test_round_sphere(n, rng):
    frame = ConformalFrame(sphere_factor(n))
    for p in rng.uniform(-2.0, 2.0, size=(50, n)):
        ph = frame.phi_jet(p).value
        assert scalar_curvature_bar(frame, p) == pytest.approx(n * (n - 1), rel=1e-12)
        np.testing.assert_allclose(ricci_bar(frame, p), (n - 1) * np.eye(n) / ph ** 2, rtol=1e-12, atol=1e-14)


def test_flat_frame(rng):
    frame = ConformalFrame(Constant(1.0, 3))
    F = _test_field(3)
    for p in rng.uniform(-1.0, 1.0, size=(10, 3)):
        assert not np.any(christoffel(frame, p))
        assert not np.any(ricci_bar(frame, p))
        assert laplacian_bar(frame, F, p) == pytest.approx(np.trace(hessian_bar(frame, F, p)))


def test_christoffel_symmetry(rng):
    frame = ConformalFrame(_factors(3)[1])
    gamma = christoffel(frame, rng.uniform(-1.0, 1.0, size=3))
    assert gamma.shape == (3, 3, 3)
    np.testing.assert_array_equal(gamma, np.transpose(gamma, (0, 2, 1)))


def test_gradient_norm_scales_with_phi():
    frame = ConformalFrame(Constant(2.0, 3))
    assert grad_norm_bar(frame, LinearForm([1.0, 0.0, 0.0]), [0.0, 0.0, 0.0]) == 4.0


def test_inner_product_is_symmetric_and_matches_norm():
    frame = ConformalFrame(sphere_factor(3))
    F = _test_field(3)
    G = LinearForm([1.0, -2.0, 0.5])
    p = [0.3, -0.4, 0.9]
    assert inner_bar(frame, F, G, p) == inner_bar(frame, G, F, p)
    assert inner_bar(frame, F, F, p) == grad_norm_bar(frame, F, p)


def test_nonpositive_factor():
    frame = ConformalFrame(Coordinate(0, 3))
    with pytest.raises(NonPositiveConformalFactorError):
        laplacian_bar(frame, _test_field(3), [-1.0, 0.0, 0.0])
