import math

import numpy as np
import pytest

from electrovac.core.invariants import HarmonicPoleInvariant, QuadricInvariant
from electrovac.core.jetcore import Log, eval_jet, polynomial
from electrovac.core.residuals import evaluate_residuals
from electrovac.reducer.graph import LIFTED_TOLERANCE
from electrovac.reducer.tools import (
    AffineLapseProfile,
    ArctanLapseProfile,
    LapseProfile,
    QuadricODEState,
    QuadricParameters,
    complete_initial_state,
    constraint_residual,
    integrate_quadric_system,
    interpolation_remainder,
    lapse_ode_forms,
    lapse_ode_residual,
    lift_profile_to_fields,
    lift_trajectory,
    mp_class_drift,
    mp_initial_state,
    mp_profiles_from_lapse,
    solve_lapse_from_invariant,
)
from electrovac.shared.utils import (
    ConstraintDriftError,
    DegenerateGradientError,
    InconsistentInitialDataError,
    InterpolationBudgetError,
    InvalidParameterError,
    NotSeparableError,
    OutOfProfileRangeError,
    SingularCoefficientError,
    StationaryLapseError,
    ZeroSlopeError,
)
from electrovac.verifier.tools import Region, resolve_tolerances, verify
from tests.conftest import points_away_from, points_off_hyperplane


class QuadraticLapseProfile(LapseProfile):
    """U = 1 + xi + xi^2, not a solution of the lapse equation."""

    name = "quadratic"

    def derivatives(self, xi):
        return 1.0 + xi + xi * xi, 1.0 + 2.0 * xi, 2.0


def _rotation_trajectory(xi_end=4.0, **kwargs):
    inv = QuadricInvariant(3, 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    params = QuadricParameters.from_invariant(inv)
    initial = mp_initial_state(params, 1.0, 2.0, -0.5)
    return inv, integrate_quadric_system(initial, params, xi_end, **kwargs)


# ============================================================
# Lapse equation
# ============================================================

def test_arctan_profile_solves_lapse_equation(dilation_inv, rng):
    profile = ArctanLapseProfile.from_invariant(dilation_inv, 1.0, 2.0)
    for p in points_off_hyperplane(rng, 100, dilation_inv.b_full):
        assert lapse_ode_residual(profile, dilation_inv, p) <= 1e-10
        forms = lapse_ode_forms(profile, dilation_inv, p)
        assert forms.max_disagreement() <= 1e-9


def test_affine_profile_solves_pole_lapse(rng):
    inv = HarmonicPoleInvariant(3, [[0.5, 0, 0], [-0.5, 0, 0]], [1.0, 2.0])
    profile = AffineLapseProfile(1.0, -1.0)
    for p in points_away_from(rng, 50, 3, inv.centers):
        assert lapse_ode_residual(profile, inv, p) <= 1e-10


def test_non_solution_profile_is_rejected(dilation_inv, rng):
    profile = QuadraticLapseProfile()
    checked = 0
    for p in points_off_hyperplane(rng, 40, dilation_inv.b_full, min_gap=1.0):
        xi = eval_jet(dilation_inv, p).value
        # U''/U' + h vanishes at xi = 0 and xi = 1/3 only
        if abs(xi) < 0.1 or abs(xi - 1.0 / 3.0) < 0.1 or abs(1.0 + 2.0 * xi) < 0.1:
            continue
        assert lapse_ode_residual(profile, dilation_inv, p) > 1e-6
        assert lapse_ode_forms(profile, dilation_inv, p).harmonic_form > 1e-9
        checked += 1
    assert checked > 0


def test_lapse_residual_errors():
    inv = QuadricInvariant(3, 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    with pytest.raises(StationaryLapseError):
        lapse_ode_residual(AffineLapseProfile(0.0, 1.0), inv, [1.0, 0.0, 0.0])
    with pytest.raises(DegenerateGradientError):
        lapse_ode_residual(AffineLapseProfile(1.0, 1.0), inv, [0.0, 0.0, 0.0])


# ============================================================
# Solving for the lapse
# ============================================================

def test_solve_lapse_matches_closed_form(dilation_inv):
    solution = solve_lapse_from_invariant(dilation_inv, 1.0, 2.0, (0.1, 3.0))
    assert solution.anchor == 0.5
    assert solution.closed_form_gap <= 1e-10 * 5.0
    assert solution.profile(0.5) == pytest.approx(2.0, abs=1e-10)
    summary = solution.to_dict()
    assert summary["closed_form"] == "arctan_lapse"
    assert summary["interval"] == [0.1, 3.0]


def test_solve_lapse_for_quadric_invariant():
    inv = QuadricInvariant(3, 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    solution = solve_lapse_from_invariant(inv, 1.0, 1.0, (1.0, 4.0), check_separability=False)
    # U = 1 + 2 (1 - xi^(-1/2)) has U(1) = 1 and U'(1) = 1
    for xi in (1.0, 2.0, 3.5):
        assert solution.profile(xi) == pytest.approx(1.0 + 2.0 * (1.0 - xi ** -0.5), abs=1e-9)
    assert solution.closed_form is None


def test_solve_lapse_errors(dilation_inv):
    with pytest.raises(ZeroSlopeError):
        solve_lapse_from_invariant(dilation_inv, 0.0, 2.0, (0.1, 3.0))
    cubic = polynomial(3, [{"coefficient": 1.0, "powers": [1, 0, 0]}, {"coefficient": 1.0, "powers": [0, 3, 0]}])
    with pytest.raises(NotSeparableError):
        solve_lapse_from_invariant(cubic, 1.0, 0.0, (0.0, 1.0))
    log_quadric = QuadricInvariant(3, 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0], outer=Log())
    with pytest.raises(NotSeparableError):
        solve_lapse_from_invariant(log_quadric, 1.0, 0.0, (0.5, 1.0))


def test_lapse_csv(dilation_inv, tmp_path):
    solution = solve_lapse_from_invariant(dilation_inv, 1.0, 2.0, (0.5, 1.0), check_separability=False)
    lines = solution.to_csv(tmp_path / "profile.csv").read_text().splitlines()
    assert lines[0] == "xi,U,dU,ddU,N,U_closed_form"
    assert len(lines) == solution.xi.size + 1


def test_lifted_lapse_profile_verifies(dilation_inv):
    solution = solve_lapse_from_invariant(dilation_inv, 1.0, 2.0, (0.1, 3.0), check_separability=False)
    phi, N, psi = mp_profiles_from_lapse(solution.profile, 3)
    system = lift_profile_to_fields(dilation_inv, phi, N, psi)
    region = Region.from_system(system, [0.2, -1.0, -1.0], [1.5, 1.0, 1.0])
    assert region.xi_window == (0.1, 3.0)
    report = verify(system, region, 200, resolve_tolerances(default=1e-6))
    assert report.passed, report.failing_channels()


# ============================================================
# Quadric reduction
# ============================================================

def test_rotation_trajectory_matches_radial_solution():
    _, trajectory = _rotation_trajectory()
    assert trajectory.max_constraint <= 1e-8
    assert trajectory.interval == (1.0, 4.0)
    for xi, state in zip(trajectory.xi, trajectory.states):
        assert 1.0 / state[2] == pytest.approx(1.0 + xi ** -0.5, abs=1e-8)
    drift = mp_class_drift(trajectory)
    assert max(drift.values()) <= 1e-8


def test_translation_trajectory_is_linear():
    inv = QuadricInvariant(3, 0.0, [1.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    params = QuadricParameters.from_invariant(inv)
    assert params.s(0.3) == 1.0
    trajectory = integrate_quadric_system(mp_initial_state(params, 0.0, 2.0, 0.5), params, 1.0)
    assert trajectory.max_constraint <= 1e-8
    final = trajectory.state(-1)
    assert final.xi == 1.0
    assert 1.0 / final.N == pytest.approx(2.5, abs=1e-9)


def test_lifted_rotation_verifies():
    inv, trajectory = _rotation_trajectory()
    system = lift_trajectory(trajectory, inv)
    region = Region.from_system(system, [-1.8] * 3, [1.8] * 3)
    report = verify(system, region, 200, resolve_tolerances(default=1e-6))
    assert report.passed, report.failing_channels()

    p = np.array([1.2, 0.5, 0.3])
    r = float(np.linalg.norm(p))
    assert eval_jet(system.N, p).value == pytest.approx(1.0 / (1.0 + 1.0 / r), abs=1e-8)
    with pytest.raises(OutOfProfileRangeError):
        eval_jet(system.N, [0.1, 0.0, 0.0])


def test_singular_coefficient():
    inv = QuadricInvariant(3, 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    params = QuadricParameters.from_invariant(inv)
    with pytest.raises(SingularCoefficientError):
        integrate_quadric_system(mp_initial_state(params, 0.0, 2.0, 1.0), params, 1.0)
    with pytest.raises(SingularCoefficientError):
        integrate_quadric_system(mp_initial_state(params, -1.0, 2.0, 1.0), params, 1.0)
    with pytest.raises(SingularCoefficientError):
        QuadricParameters(3, 0.0, 0.0)


def test_inconsistent_initial_data():
    params = QuadricParameters(3, 1.0, 0.0)
    state = QuadricODEState(1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0)
    assert constraint_residual(params, 1.0, state.as_array()) == pytest.approx(1.6)
    with pytest.raises(InconsistentInitialDataError):
        integrate_quadric_system(state, params, 2.0)


def test_complete_initial_state_solves_constraint():
    params = QuadricParameters(3, 1.0, 0.0, Lambda=-0.4)
    state = complete_initial_state(params, 1.0, 1.0, 0.0, 1.0, 0.0)
    assert state.dpsi ** 2 == pytest.approx(0.1, abs=1e-12)
    assert constraint_residual(params, 1.0, state.as_array()) <= 1e-12

    with pytest.raises(InconsistentInitialDataError):
        complete_initial_state(QuadricParameters(3, 1.0, 0.0, Lambda=0.4), 1.0, 1.0, 0.0, 1.0, 0.0)


def test_lifted_cosmological_trajectory_with_nonconstant_factor():
    params = QuadricParameters(3, 1.0, 0.0, Lambda=-0.4)
    initial = complete_initial_state(params, 1.0, 1.5, 0.0, 1.0, 0.0)
    trajectory = integrate_quadric_system(initial, params, 1.5)
    assert trajectory.max_constraint <= 1e-6
    assert float(np.min(trajectory.states[:, 0])) > 0.0

    inv = QuadricInvariant(3, 1.0, [0.0, 0.0, 0.0], [0.0, 0.0, 0.0])
    system = lift_trajectory(trajectory, inv)
    assert system.Lambda == -0.4
    # xi = |x|^2 lies in [1, 1.5] at each point
    for p in ([1.1, 0.2, 0.1], [0.0, 1.2, 0.0], [0.7, -0.6, 0.6], [-0.5, 0.5, -0.9]):
        channels = evaluate_residuals(system, p).normalized().as_channels()
        assert max(channels.values()) <= LIFTED_TOLERANCE, channels


def test_trajectory_meets_interpolation_budget():
    _, coarse = _rotation_trajectory(max_step=1.0)
    assert coarse.interpolation_error <= 1e-9
    assert coarse.to_dict()["interpolation_error"] == coarse.interpolation_error
    recomputed = interpolation_remainder(coarse.params, coarse.xi, coarse.states)
    assert recomputed == pytest.approx(coarse.interpolation_error, rel=1e-9, abs=1e-18)


def test_interpolation_budget_errors():
    with pytest.raises(InterpolationBudgetError):
        _rotation_trajectory(xi_end=2.0, interpolation_budget=1e-30, max_refinements=0)
    with pytest.raises(InvalidParameterError):
        _rotation_trajectory(xi_end=2.0, interpolation_budget=0.0)


def test_constraint_drift_is_detected():
    with pytest.raises(ConstraintDriftError):
        _rotation_trajectory(drift_tol=1e-300)


def test_trajectory_csv(tmp_path):
    _, trajectory = _rotation_trajectory(xi_end=2.0)
    lines = trajectory.to_csv(tmp_path / "trajectory.csv").read_text().splitlines()
    assert lines[0] == "xi,phi,dphi,N,dN,psi,dpsi,constraint_residual"
    assert len(lines) == trajectory.xi.size + 1
    assert math.isclose(float(lines[1].split(",")[0]), 1.0)
