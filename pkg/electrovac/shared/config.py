"""
Run Configuration - pydantic models for every CLI command.

A run configuration is one JSON document. `command` selects the model;
solution descriptors are discriminated by `family`, invariants by `kind`.
Unknown keys are rejected everywhere.
"""

import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator, model_validator

from electrovac.core.residuals import CHANNELS
from electrovac.shared.utils import ConfigError, logger


SCHEMA_VERSION = "1.0"


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ============================================================
# SOLUTIONS
# ============================================================

class PerturbationConfig(StrictModel):
    """Negative controls applied after a solution is built."""
    lapse_epsilon: float = Field(0.0, description="N is replaced by N * (1 + epsilon * x_axis).")
    axis: int = Field(0, ge=0)
    lambda_override: Optional[float] = Field(None, description="Replace Lambda of the built system.")


class MinkowskiSolution(StrictModel):
    family: Literal["minkowski"]
    n: int = Field(ge=3)
    Lambda: float = 0.0
    perturbation: Optional[PerturbationConfig] = None


class MultiCenterSolution(StrictModel):
    family: Literal["multicenter"]
    n: int = Field(ge=3)
    centers: list[list[float]] = Field(min_length=1)
    weights: list[float] = Field(min_length=1)
    k: float = 1.0
    k1: float = -1.0
    sign: Literal[1, -1] = 1
    perturbation: Optional[PerturbationConfig] = None

    @model_validator(mode="after")
    def _check_shapes(self):
        if len(self.centers) != len(self.weights):
            raise ValueError("one weight per center is required")
        if any(len(c) != self.n for c in self.centers):
            raise ValueError(f"every center needs n={self.n} coordinates")
        return self


class DilationSolution(StrictModel):
    family: Literal["dilation"]
    n: int = Field(ge=3)
    a: list[float] = Field(min_length=1)
    b: list[float] = Field(min_length=1)
    k: float = 1.0
    k1: float
    sign: Literal[1, -1] = 1
    perturbation: Optional[PerturbationConfig] = None


SolutionConfig = Annotated[
    Union[MinkowskiSolution, MultiCenterSolution, DilationSolution],
    Field(discriminator="family"),
]


# ============================================================
# INVARIANTS
# ============================================================

class DilationInvariantConfig(StrictModel):
    kind: Literal["dilation"]
    n: int = Field(ge=3)
    a: list[float] = Field(min_length=1)
    b: list[float] = Field(min_length=1)


class PoleInvariantConfig(StrictModel):
    kind: Literal["pole"]
    n: int = Field(ge=3)
    centers: list[list[float]] = Field(min_length=1)
    weights: list[float] = Field(min_length=1)


class QuadricInvariantConfig(StrictModel):
    kind: Literal["quadric"]
    n: int = Field(ge=3)
    tau: float
    gamma: list[float]
    theta: list[float]


class MonomialConfig(StrictModel):
    coefficient: float
    powers: list[int]


class PolynomialInvariantConfig(StrictModel):
    kind: Literal["polynomial"]
    n: int = Field(ge=3)
    terms: list[MonomialConfig] = Field(min_length=1)


InvariantConfig = Annotated[
    Union[DilationInvariantConfig, PoleInvariantConfig, QuadricInvariantConfig, PolynomialInvariantConfig],
    Field(discriminator="kind"),
]


# ============================================================
# REGIONS AND OUTPUTS
# ============================================================

class RegionConfig(StrictModel):
    """Axis-aligned box; defaults to [-2, 2]^n."""
    lower: Optional[list[float]] = None
    upper: Optional[list[float]] = None
    eps_center: float = Field(1e-6, gt=0)
    hyperplane_margin: float = Field(1e-6, gt=0)


class OutputConfig(StrictModel):
    report: Optional[str] = Field(None, description="Report JSON path; stdout when absent.")
    csv: Optional[str] = Field(None, description="Per-point or profile CSV path.")


def _check_tolerances(value: dict[str, float]) -> dict[str, float]:
    unknown = sorted(set(value) - set(CHANNELS))
    if unknown:
        raise ValueError(f"unknown residual channels: {unknown}")
    if any(v <= 0 for v in value.values()):
        raise ValueError("tolerances must be positive")
    return value


# ============================================================
# COMMANDS
# ============================================================

class VerifyConfig(StrictModel):
    command: Literal["verify"] = "verify"
    solution: SolutionConfig
    region: RegionConfig = Field(default_factory=RegionConfig)
    points: int = Field(1000, ge=1)
    seed: int = Field(0, ge=0)
    tolerances: dict[str, float] = Field(default_factory=dict)
    threads: Optional[int] = Field(None, ge=0)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("tolerances")
    @classmethod
    def _known_channels(cls, value: dict[str, float]) -> dict[str, float]:
        return _check_tolerances(value)


class LapseReduction(StrictModel):
    mode: Literal["lapse"]
    invariant: InvariantConfig
    k: float = 1.0
    k1: float = 0.0
    interval: tuple[float, float]
    sign: Literal[1, -1] = 1
    abs_tol: float = Field(1e-12, gt=0)
    check_separability: bool = True


class MPInitialData(StrictModel):
    kind: Literal["mp"]
    xi0: float
    U: float
    dU: float
    sign: Literal[1, -1] = 1


class StateInitialData(StrictModel):
    kind: Literal["state"]
    xi0: float
    phi: float
    dphi: float
    N: float
    dN: float
    psi: float = 0.0
    dpsi: float


class CompleteInitialData(StrictModel):
    """psi' is solved from the first-order constraint."""
    kind: Literal["complete"]
    xi0: float
    phi: float
    dphi: float
    N: float
    dN: float
    psi: float = 0.0
    sign: Literal[1, -1] = 1


InitialDataConfig = Annotated[
    Union[MPInitialData, StateInitialData, CompleteInitialData],
    Field(discriminator="kind"),
]


class QuadricReduction(StrictModel):
    mode: Literal["quadric"]
    invariant: QuadricInvariantConfig
    Lambda: float = 0.0
    initial: InitialDataConfig
    xi_end: float
    rtol: float = Field(1e-10, gt=0)
    atol: float = Field(1e-12, gt=0)
    drift_tol: float = Field(1e-6, gt=0)


class ReduceConfig(StrictModel):
    command: Literal["reduce"] = "reduce"
    reduction: Annotated[Union[LapseReduction, QuadricReduction], Field(discriminator="mode")]
    region: RegionConfig = Field(default_factory=RegionConfig)
    points: int = Field(200, ge=0, description="Lifted-field verification points (0 disables).")
    seed: int = Field(0, ge=0)
    tolerances: dict[str, float] = Field(default_factory=dict)
    threads: Optional[int] = Field(None, ge=0)
    output: OutputConfig = Field(default_factory=OutputConfig)

    @field_validator("tolerances")
    @classmethod
    def _known_channels(cls, value: dict[str, float]) -> dict[str, float]:
        return _check_tolerances(value)


class BoxConfig(StrictModel):
    lower: list[float]
    upper: list[float]


class SeparabilityConfig(StrictModel):
    command: Literal["separability"] = "separability"
    invariant: InvariantConfig
    levels: list[float] = Field(min_length=1)
    points: int = Field(64, ge=1, description="Samples per level.")
    seed: int = Field(0, ge=0)
    box: Optional[BoxConfig] = None
    tol_sep: float = Field(1e-8, gt=0)
    output: OutputConfig = Field(default_factory=OutputConfig)


class BoundsConfig(StrictModel):
    command: Literal["bounds"] = "bounds"
    solution: DilationSolution
    region: RegionConfig = Field(default_factory=RegionConfig)
    points: int = Field(1000, ge=1)
    seed: int = Field(0, ge=0)
    output: OutputConfig = Field(default_factory=OutputConfig)


RunConfig = Annotated[
    Union[VerifyConfig, ReduceConfig, SeparabilityConfig, BoundsConfig],
    Field(discriminator="command"),
]

RUN_CONFIG_ADAPTER = TypeAdapter(RunConfig)


# ============================================================
# LOADING
# ============================================================

def parse_run_config(data: dict, command: Optional[str] = None):
    """
    Validate a decoded configuration document.

    Args:
        data: Decoded JSON object.
        command: Expected command; injected when the document omits it.

    Returns:
        The validated command model.

    Raises:
        ConfigError: Schema violation or command mismatch.
    """
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    if command is not None:
        declared = data.get("command")
        if declared is None:
            data = {**data, "command": command}
        elif declared != command:
            raise ConfigError(f"configuration is for '{declared}', not '{command}'")
    try:
        return RUN_CONFIG_ADAPTER.validate_python(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {e}") from e


def load_run_config(path: str | Path, command: Optional[str] = None):
    """
    Read and validate a JSON run configuration.

    Raises:
        ConfigError: Unreadable file, malformed JSON, or schema violation.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read configuration {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON in {path}: {e}") from e
    config = parse_run_config(data, command)
    logger.debug(f"loaded {config.command} configuration from {path}")
    return config


def run_config_schema() -> dict:
    """Published JSON schema of RunConfig."""
    schema = RUN_CONFIG_ADAPTER.json_schema()
    schema["$comment"] = f"electrovac run configuration, schema {SCHEMA_VERSION}"
    return schema
