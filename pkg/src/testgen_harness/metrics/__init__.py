"""Coverage, mutation and smell metrics and their aggregation."""

from .aggregate import (
    METRICS,
    AggregateReport,
    EvaluationLedger,
    PerClassMetrics,
    SliceAggregate,
    aggregate,
    delta_table,
    slice_mean,
)
from .reports import Coverage, parse_coverage_report, parse_mutation_report
from .smells import SMELL_CODES, detect_smells, smells_for_source

__all__ = [
    "METRICS",
    "SMELL_CODES",
    "AggregateReport",
    "Coverage",
    "EvaluationLedger",
    "PerClassMetrics",
    "SliceAggregate",
    "aggregate",
    "delta_table",
    "detect_smells",
    "parse_coverage_report",
    "parse_mutation_report",
    "slice_mean",
    "smells_for_source",
]
