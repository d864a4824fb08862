import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from electrovac.core.jetcore import (
    Arctan,
    Constant,
    Coordinate,
    Jet2,
    LinearCombination,
    Polynomial1D,
    Power,
    Quotient,
    RealPower,
    arctan,
    eval_jet,
    exp,
    fd_jet,
    log,
    polynomial,
    sqrt,
)
from electrovac.shared.utils import (
    DimensionMismatchError,
    InvalidParameterError,
    NonFiniteResultError,
    SingularPointError,
)


coords = st.floats(min_value=0.5, max_value=1.5, allow_nan=False, allow_infinity=False)
points3 = st.tuples(coords, coords, coords)


def _composite(n=3):
    x1, x2, x3 = (Coordinate(k, n) for k in range(3))
    radial = LinearCombination([(1.0, Power(x1, 2)), (1.0, Power(x2, 2))], 1.0)
    return arctan(x1 * x2) + log(x3 + 3.0) + Power(radial, 0.7) / (x3 + 2.0) + exp(0.3 * x2)


def _close(a, b, rel):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b))) <= rel * (1.0 + float(np.max(np.abs(b))))


# ============================================================
# Jet arithmetic
# ============================================================

def test_product_of_coordinates():
    p = np.array([2.0, 3.0, 5.0])
    jet = eval_jet(Coordinate(0, 3) * Coordinate(1, 3), p)
    assert jet.value == 6.0
    np.testing.assert_array_equal(jet.gradient, [3.0, 2.0, 0.0])
    np.testing.assert_array_equal(jet.hessian, [[0, 1, 0], [1, 0, 0], [0, 0, 0]])


def test_quotient_and_power_rules():
    p = np.array([2.0, 1.0, 1.0])
    jet = eval_jet(1.0 / Coordinate(0, 3), p)
    assert jet.value == 0.5
    assert jet.gradient[0] == pytest.approx(-0.25)
    assert jet.hessian[0, 0] == pytest.approx(0.25)

    cube = eval_jet(Coordinate(1, 3) ** 3, np.array([0.0, 2.0, 0.0]))
    assert (cube.value, cube.gradient[1], cube.hessian[1, 1]) == (8.0, 12.0, 12.0)


def test_linear_combination_is_exactly_linear():
    p = np.array([0.3, -0.7, 1.1])
    F = _composite()
    G = sqrt(Coordinate(2, 3) + 2.0)
    combined = eval_jet(2.0 * F + 3.0 * G, p)
    manual = 2.0 * eval_jet(F, p) + 3.0 * eval_jet(G, p)
    assert combined.value == manual.value
    np.testing.assert_array_equal(combined.gradient, manual.gradient)
    np.testing.assert_array_equal(combined.hessian, manual.hessian)


def test_hessian_is_exactly_symmetric():
    jet = eval_jet(_composite(), [0.9, 1.2, 0.7])
    np.testing.assert_array_equal(jet.hessian, jet.hessian.T)


def test_jet_shapes_are_checked():
    with pytest.raises(DimensionMismatchError):
        Jet2(1.0, np.zeros(3), np.zeros((2, 2)))


def test_polynomial1d_horner_derivatives():
    assert Polynomial1D([1.0, 2.0, 3.0]).derivatives(2.0) == (17.0, 14.0, 6.0)


def test_unary_functions():
    assert Arctan().derivatives(1.0) == pytest.approx((math.pi / 4, 0.5, -0.5))
    assert RealPower(0.5).singular(0.0)
    assert not RealPower(2.0).singular(0.0)
    assert RealPower(-1.0).singular(0.0)


def test_polynomial_builder():
    field = polynomial(3, [{"coefficient": 1.0, "powers": [1, 0, 0]}, {"coefficient": 1.0, "powers": [0, 3, 0]}])
    jet = eval_jet(field, [1.0, 2.0, 0.0])
    assert jet.value == 9.0
    np.testing.assert_allclose(jet.gradient, [1.0, 12.0, 0.0])
    assert jet.laplacian == pytest.approx(12.0)

    with pytest.raises(InvalidParameterError):
        polynomial(3, [{"coefficient": 1.0, "powers": [1, 0]}])


# ============================================================
# Errors
# ============================================================

def test_singular_quotient():
    with pytest.raises(SingularPointError):
        eval_jet(Quotient(Constant(1.0, 3), Coordinate(0, 3)), [0.0, 1.0, 1.0])


def test_singular_log():
    with pytest.raises(SingularPointError):
        eval_jet(log(Coordinate(0, 3)), [-1.0, 0.0, 0.0])


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        eval_jet(Coordinate(0, 3), [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(DimensionMismatchError):
        Constant(1.0, 2)


def test_overflow_is_reported():
    with pytest.raises(NonFiniteResultError):
        eval_jet(exp(1000.0 * Coordinate(0, 3)), [1.0, 0.0, 0.0])


def test_fd_step_must_be_positive():
    with pytest.raises(InvalidParameterError):
        fd_jet(Coordinate(0, 3), [1.0, 1.0, 1.0], h=0.0)


# ============================================================
# Finite-difference oracle
# ============================================================

@settings(max_examples=60, deadline=None)
@given(points3)
def test_jets_match_finite_differences(p):
    field = _composite()
    exact = eval_jet(field, p)
    approx = fd_jet(field, p)
    assert approx.value == exact.value
    assert _close(approx.gradient, exact.gradient, 1e-6)
    assert _close(approx.hessian, exact.hessian, 1e-6)


@pytest.mark.parametrize("h", [1e-4, 1e-5])
def test_gradient_matches_finite_differences_for_both_steps(h, rng):
    field = _composite()
    for p in rng.uniform(0.5, 1.5, size=(50, 3)):
        assert _close(fd_jet(field, p, h=h).gradient, eval_jet(field, p).gradient, 1e-6)


def test_shipped_fields_match_finite_differences(mp_single, dilation_n3, rng):
    from tests.conftest import points_off_hyperplane

    far = [p for p in rng.uniform(-2.0, 2.0, size=(400, 3)) if np.linalg.norm(p) >= 1.0][:100]
    for system, batch in (
        (mp_single, far),
        (dilation_n3, points_off_hyperplane(rng, 100, [1.0, 1.0, 0.0], min_gap=1.0)),
    ):
        for field in (system.phi, system.N, system.psi):
            for p in batch:
                exact = eval_jet(field, p)
                approx = fd_jet(field, p)
                assert _close(approx.gradient, exact.gradient, 1e-6)
                assert _close(approx.hessian, exact.hessian, 1e-6)
