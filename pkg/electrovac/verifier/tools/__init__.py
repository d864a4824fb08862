from .sampling import REJECTION_REASONS, Region, SampleSet, sample_domain
from .aggregation import aggregate, default_tolerances, evaluate_points, resolve_tolerances, verify
from .export import ChannelStats, PointCounts, ResidualReport, write_payload, write_points_csv, write_report
from .diagnostics import bounds_report, separability_report

__all__ = [
    "REJECTION_REASONS",
    "Region",
    "SampleSet",
    "sample_domain",
    "aggregate",
    "default_tolerances",
    "evaluate_points",
    "resolve_tolerances",
    "verify",
    "ChannelStats",
    "PointCounts",
    "ResidualReport",
    "write_payload",
    "write_points_csv",
    "write_report",
    "bounds_report",
    "separability_report",
]
