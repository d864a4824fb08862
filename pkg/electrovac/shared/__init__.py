from .state import RunState
from .utils import (
    setup_logger,
    logger,
    get_env_config,
    resolve_threads,
    ensure_parent,
    make_rng,
    max_abs,
    stable_mean,
    ElectrovacError,
    ConfigError,
    InvalidParameterError,
    DimensionMismatchError,
    DomainViolationError,
    SingularPointError,
    NonPositiveConformalFactorError,
    NonFiniteResultError,
    CoincidentCentersError,
    ZeroSlopeError,
    DegenerateDiscriminantError,
    NonPositiveLowerBoundError,
    EmptyLevelSetError,
    DegenerateGradientError,
    StationaryLapseError,
    NotSeparableError,
    QuadratureFailureError,
    SingularCoefficientError,
    ConstraintDriftError,
    InconsistentInitialDataError,
    StepFailureError,
    InterpolationBudgetError,
    OutOfProfileRangeError,
    EmptyRegionError,
)

__all__ = [
    "RunState",
    "setup_logger",
    "logger",
    "get_env_config",
    "resolve_threads",
    "ensure_parent",
    "make_rng",
    "max_abs",
    "stable_mean",
    "ElectrovacError",
    "ConfigError",
    "InvalidParameterError",
    "DimensionMismatchError",
    "DomainViolationError",
    "SingularPointError",
    "NonPositiveConformalFactorError",
    "NonFiniteResultError",
    "CoincidentCentersError",
    "ZeroSlopeError",
    "DegenerateDiscriminantError",
    "NonPositiveLowerBoundError",
    "EmptyLevelSetError",
    "DegenerateGradientError",
    "StationaryLapseError",
    "NotSeparableError",
    "QuadratureFailureError",
    "SingularCoefficientError",
    "ConstraintDriftError",
    "InconsistentInitialDataError",
    "StepFailureError",
    "InterpolationBudgetError",
    "OutOfProfileRangeError",
    "EmptyRegionError",
]
