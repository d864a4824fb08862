import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from electrovac.core.invariants import (
    DilationInvariant,
    HarmonicPoleInvariant,
    InvariantField,
    QuadricInvariant,
    fundamental_relation_residual,
    invariant_from_descriptor,
    quadratic_coefficients,
    separability_check,
    xi_jet,
)
from electrovac.core.jetcore import Jet2, Log, ScalarField, eval_jet, polynomial
from electrovac.shared.utils import (
    CoincidentCentersError,
    DegenerateDiscriminantError,
    DimensionMismatchError,
    EmptyLevelSetError,
    InvalidParameterError,
    NonFiniteResultError,
    SingularPointError,
)
from tests.conftest import points_away_from, points_off_hyperplane


def _jets_agree(a, b, rel=1e-10):
    scale = 1.0 + max(abs(b.value), float(np.max(np.abs(b.gradient))), float(np.max(np.abs(b.hessian))))
    return (
        abs(a.value - b.value) <= rel * scale
        and float(np.max(np.abs(a.gradient - b.gradient))) <= rel * scale
        and float(np.max(np.abs(a.hessian - b.hessian))) <= rel * scale
    )


# ============================================================
# Closed-form jets against generic compositions
# ============================================================

def test_dilation_closed_form_matches_generic(dilation_inv, rng):
    generic = dilation_inv.generic_field()
    for p in points_off_hyperplane(rng, 200, dilation_inv.b_full):
        assert _jets_agree(xi_jet(dilation_inv, p), eval_jet(generic, p))


def test_pole_closed_form_matches_generic(rng):
    inv = HarmonicPoleInvariant(4, [[1, 0, 0, 0], [0, -1, 0, 0]], [1.0, 2.0])
    generic = inv.generic_field()
    for p in points_away_from(rng, 200, 4, inv.centers):
        assert _jets_agree(xi_jet(inv, p), eval_jet(generic, p))


def test_quadric_closed_form_matches_generic(rng):
    inv = QuadricInvariant(3, 0.5, [1.0, -2.0, 0.0], [0.1, 0.2, 0.3])
    generic = inv.generic_field()
    for p in rng.uniform(-2.0, 2.0, size=(200, 3)):
        assert _jets_agree(xi_jet(inv, p), eval_jet(generic, p), rel=1e-12)


def test_quadric_with_outer_function():
    inv = QuadricInvariant(3, 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], outer=Log())
    jet = xi_jet(inv, [1.0, 0.0, 0.0])
    assert jet.value == 0.0
    assert jet.gradient[0] == pytest.approx(2.0)
    assert inv.level_ratio() is None
    with pytest.raises(SingularPointError):
        xi_jet(inv, [0.0, 0.0, 0.0])


# ============================================================
# Dilation structure
# ============================================================

def test_quadratic_coefficients(dilation_inv):
    eta, theta, delta = quadratic_coefficients(dilation_inv)
    assert (eta, theta, delta) == (2.0, -2.0, 1.0)
    assert dilation_inv.disc == 4.0


def test_gradient_norm_identity(dilation_inv, rng):
    for p in points_off_hyperplane(rng, 200, dilation_inv.b_full):
        jet = xi_jet(dilation_inv, p)
        P = dilation_inv.denominator(p)
        expected = dilation_inv.quadratic(jet.value)
        assert abs(P * P * jet.grad_norm2 - expected) <= 1e-12 * (1.0 + abs(expected))


def test_fundamental_relation(rng):
    inv = DilationInvariant(5, [1.0, -1.0], [1.0, 1.0, 1.0, 1.0])
    for p in points_off_hyperplane(rng, 200, inv.b_full):
        lap = abs(xi_jet(inv, p).laplacian)
        assert fundamental_relation_residual(inv, p) <= 1e-10 * (1.0 + lap)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(min_value=-2, max_value=2), min_size=3, max_size=3),
    st.sampled_from([0.5, 2.0, 10.0]),
)
def test_dilation_homogeneity(p, s):
    inv = DilationInvariant(3, [1.0], [1.0, 1.0])
    p = np.asarray(p)
    if abs(inv.denominator(p)) < 0.1:
        return
    xi, scaled = xi_jet(inv, p).value, xi_jet(inv, s * p).value
    assert abs(xi - scaled) <= 1e-13 * (1.0 + abs(xi))


def test_level_ratios_match_jets(dilation_inv, rng):
    h = dilation_inv.level_ratio()
    for p in points_off_hyperplane(rng, 100, dilation_inv.b_full):
        jet = xi_jet(dilation_inv, p)
        ratio = jet.laplacian / jet.grad_norm2
        assert abs(ratio - h(jet.value)) <= 1e-10 * (1.0 + abs(ratio))

    quadric = QuadricInvariant(4, 1.0, [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0])
    for p in rng.uniform(-1.0, 1.0, size=(100, 4)):
        jet = xi_jet(quadric, p)
        if jet.grad_norm2 < 1e-3:
            continue
        assert jet.laplacian / jet.grad_norm2 == pytest.approx(quadric.level_ratio()(jet.value), rel=1e-10)


# ============================================================
# Constructor errors
# ============================================================

def test_degenerate_discriminant():
    with pytest.raises(DegenerateDiscriminantError):
        DilationInvariant(3, [1.0], [1.0])


def test_dilation_arity():
    with pytest.raises(InvalidParameterError):
        DilationInvariant(3, [1.0, 1.0], [1.0])
    with pytest.raises(InvalidParameterError):
        DilationInvariant(3, [1.0], [1.0, 0.0])


def test_coincident_centers():
    with pytest.raises(CoincidentCentersError):
        HarmonicPoleInvariant(3, [[0, 0, 0], [0, 0, 0]], [1.0, 1.0])


def test_constant_quadric_rejected():
    with pytest.raises(InvalidParameterError):
        QuadricInvariant(3, 0.0, [0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    with pytest.raises(DimensionMismatchError):
        QuadricInvariant(3, 1.0, [0.0, 0.0], [0.0, 0.0, 0.0])


def test_singular_sets(dilation_inv):
    with pytest.raises(SingularPointError):
        xi_jet(dilation_inv, [1.0, -1.0, 0.5])
    pole = HarmonicPoleInvariant(3, [[0, 0, 0]], [1.0])
    with pytest.raises(SingularPointError):
        xi_jet(pole, [0.0, 0.0, 1e-7])


def test_descriptor_round_trip(dilation_inv):
    rebuilt = invariant_from_descriptor(dilation_inv.to_descriptor())
    assert isinstance(rebuilt, DilationInvariant)
    assert rebuilt.a == dilation_inv.a and rebuilt.b == dilation_inv.b
    with pytest.raises(InvalidParameterError):
        invariant_from_descriptor({"kind": "torus", "n": 3})


# ============================================================
# Separability
# ============================================================

def test_dilation_invariant_is_separable(dilation_inv):
    report = separability_check(dilation_inv, [0.25, 0.5, 2.0], samples_per_level=32, seed=3)
    assert report.separable
    assert all(level.samples == 32 for level in report.levels)
    assert max(level.spread for level in report.levels) <= 1e-8


def test_pole_invariant_is_separable():
    inv = HarmonicPoleInvariant(3, [[0.5, 0, 0], [-0.5, 0, 0]], [1.0, 1.0])
    report = separability_check(inv, [-3.0, -1.5], samples_per_level=16, seed=1)
    assert report.separable


def test_cubic_is_not_separable():
    xi = polynomial(3, [{"coefficient": 1.0, "powers": [1, 0, 0]}, {"coefficient": 1.0, "powers": [0, 3, 0]}])
    report = separability_check(xi, [0.5, 1.0], samples_per_level=32, seed=0)
    assert not report.separable
    assert report.to_dict()["verdict"] == "non-separable"
    assert max(level.spread for level in report.levels) > 1e-2


def test_separability_is_deterministic(dilation_inv):
    first = separability_check(dilation_inv, [0.5], samples_per_level=8, seed=11).to_dict()
    second = separability_check(dilation_inv, [0.5], samples_per_level=8, seed=11).to_dict()
    assert first == second


def test_empty_level_set():
    inv = QuadricInvariant(3, 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    with pytest.raises(EmptyLevelSetError):
        separability_check(inv, [100.0], samples_per_level=2, seed=0)


class NanHessianField(ScalarField):
    """xi = x_1 with finite values but a broken Hessian."""

    n = 3

    def value(self, p):
        return float(p[0])

    def jet(self, p):
        return Jet2(p[0], [1.0, 0.0, 0.0], np.full((3, 3), np.nan))


def test_separability_rejects_non_finite_jets():
    with pytest.raises(NonFiniteResultError):
        separability_check(NanHessianField(), [0.5], samples_per_level=4, seed=0)


def test_invariant_interface_is_abstract():
    class Incomplete(InvariantField):
        n = 3

        def jet(self, p):
            return Jet2.constant(0.0, 3)

        def to_descriptor(self):
            return {"kind": "incomplete"}

    with pytest.raises(TypeError):
        Incomplete()
    with pytest.raises(TypeError):
        InvariantField()
