from .quadrature import QuadratureResult, gauss_kronrod_15, integrate_adaptive, rational_arctan_antiderivative
from .integrator import DormandPrince54, ExplicitRungeKutta, IntegrationResult, StepControl
from .lapse import (
    AffineLapseProfile,
    ArctanLapseProfile,
    LapseODEForms,
    LapseProfile,
    LapseSolution,
    TabulatedLapseProfile,
    lapse_ode_forms,
    lapse_ode_residual,
    solve_lapse_from_invariant,
)
from .quadric import (
    QuadricODEState,
    QuadricParameters,
    QuadricTrajectory,
    complete_initial_state,
    constraint_residual,
    integrate_quadric_system,
    interpolation_remainder,
    mp_class_drift,
    mp_initial_state,
    quadric_rhs,
)
from .lifting import (
    ConstantProfile,
    LiftedSolution,
    TrajectoryProfile,
    lift_profile_to_fields,
    lift_trajectory,
    mp_profiles_from_lapse,
)

__all__ = [
    "QuadratureResult",
    "gauss_kronrod_15",
    "integrate_adaptive",
    "rational_arctan_antiderivative",
    "DormandPrince54",
    "ExplicitRungeKutta",
    "IntegrationResult",
    "StepControl",
    "AffineLapseProfile",
    "ArctanLapseProfile",
    "LapseODEForms",
    "LapseProfile",
    "LapseSolution",
    "TabulatedLapseProfile",
    "lapse_ode_forms",
    "lapse_ode_residual",
    "solve_lapse_from_invariant",
    "QuadricODEState",
    "QuadricParameters",
    "QuadricTrajectory",
    "complete_initial_state",
    "constraint_residual",
    "integrate_quadric_system",
    "interpolation_remainder",
    "mp_class_drift",
    "mp_initial_state",
    "quadric_rhs",
    "ConstantProfile",
    "LiftedSolution",
    "TrajectoryProfile",
    "lift_profile_to_fields",
    "lift_trajectory",
    "mp_profiles_from_lapse",
]
