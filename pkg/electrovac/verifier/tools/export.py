"""
Report Export

ResidualReport is the JSON document written by every verification run;
the per-point CSV carries the sampled coordinates and the normalized
residual of each channel.
"""

import csv
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr

from electrovac.core.residuals import CHANNELS
from electrovac.shared.utils import InvalidParameterError, ensure_parent, logger


SCHEMA_VERSION = "1.0"


class ChannelStats(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max: Optional[float] = Field(description="Largest normalized residual (None when no point was evaluated).")
    mean: Optional[float]
    p95: Optional[float]
    tolerance: float


class PointCounts(BaseModel):
    model_config = ConfigDict(extra="forbid")

    requested: int = Field(description="Every draw examined, accepted or not.")
    accepted: int
    rejections: dict[str, int]


class ResidualReport(BaseModel):
    """Per-channel residual statistics over a sampled domain."""

    model_config = ConfigDict(extra="forbid")

    schema_version: str = SCHEMA_VERSION
    solution: dict[str, Any]
    region: dict[str, Any]
    seed: int
    channels: dict[str, ChannelStats]
    points: PointCounts
    verdict: Literal["pass", "fail"]
    timestamp: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    config: Optional[dict[str, Any]] = None

    _samples: Optional[np.ndarray] = PrivateAttr(default=None)
    _residuals: Optional[np.ndarray] = PrivateAttr(default=None)

    def attach_samples(self, samples: np.ndarray, residuals: np.ndarray) -> "ResidualReport":
        """Keep the evaluated points and their residual rows for CSV export."""
        self._samples = samples
        self._residuals = residuals
        return self

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def failing_channels(self) -> list[str]:
        return [
            name for name, stats in self.channels.items()
            if stats.max is None or stats.max > stats.tolerance
        ]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)


def write_report(report: BaseModel, path: Optional[str | Path] = None) -> str:
    """
    Serialize a report model.

    Args:
        report: Any pydantic report model.
        path: Destination; when None the document is only returned.

    Returns:
        The JSON text.
    """
    text = report.model_dump_json(indent=2)
    if path is not None:
        target = ensure_parent(path)
        target.write_text(text + "\n")
        logger.info(f"report written to {target}")
    return text


def write_points_csv(report: ResidualReport, path: str | Path) -> Path:
    """
    Write one row per evaluated point: x1..xn followed by every channel.

    Floats are written with repr so the file round-trips bitwise.
    """
    samples, residuals = report._samples, report._residuals
    if samples is None or residuals is None:
        raise InvalidParameterError("report carries no per-point samples")
    n = samples.shape[1] if samples.ndim == 2 else 0
    target = ensure_parent(path)
    with target.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([f"x{i + 1}" for i in range(n)] + list(CHANNELS))
        for point, row in zip(samples, residuals):
            writer.writerow([repr(float(v)) for v in point] + [repr(float(v)) for v in row])
    logger.info(f"{len(samples)} residual rows written to {target}")
    return target


def write_payload(payload: dict, path: Optional[str | Path] = None) -> str:
    """JSON text of a plain diagnostics payload, written to `path` when given."""
    text = json.dumps(payload, indent=2)
    if path is not None:
        target = ensure_parent(path)
        target.write_text(text + "\n")
        logger.info(f"report written to {target}")
    return text
