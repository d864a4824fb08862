from .jetcore import Jet2, ScalarField, UnaryFunction, eval_jet, fd_jet, polynomial
from .invariants import (
    DilationInvariant,
    HarmonicPoleInvariant,
    InvariantField,
    QuadricInvariant,
    SeparabilityReport,
    fundamental_relation_residual,
    invariant_from_descriptor,
    separability_check,
    xi_jet,
)
from .conformal import (
    ConformalFrame,
    christoffel,
    hessian_bar,
    hessian_bar_via_christoffel,
    laplacian_bar,
    ricci_bar,
    scalar_curvature_bar,
)
from .residuals import (
    CHANNELS,
    ResidualVector,
    SystemInstance,
    evaluate_residuals,
    residual_hessian,
    residual_lapse,
    residual_lemma23,
    residual_maxwell,
    residual_theo1,
    residual_trace,
)
from .solutions import (
    build_dilation,
    build_multicenter,
    lapse_bounds,
    minkowski,
    mp_identity_residuals,
    system_from_descriptor,
    uniform_equivalence,
)

__all__ = [
    "Jet2",
    "ScalarField",
    "UnaryFunction",
    "eval_jet",
    "fd_jet",
    "polynomial",
    "DilationInvariant",
    "HarmonicPoleInvariant",
    "InvariantField",
    "QuadricInvariant",
    "SeparabilityReport",
    "fundamental_relation_residual",
    "invariant_from_descriptor",
    "separability_check",
    "xi_jet",
    "ConformalFrame",
    "christoffel",
    "hessian_bar",
    "hessian_bar_via_christoffel",
    "laplacian_bar",
    "ricci_bar",
    "scalar_curvature_bar",
    "CHANNELS",
    "ResidualVector",
    "SystemInstance",
    "evaluate_residuals",
    "residual_hessian",
    "residual_lapse",
    "residual_lemma23",
    "residual_maxwell",
    "residual_theo1",
    "residual_trace",
    "build_dilation",
    "build_multicenter",
    "lapse_bounds",
    "minkowski",
    "mp_identity_residuals",
    "system_from_descriptor",
    "uniform_equivalence",
]
