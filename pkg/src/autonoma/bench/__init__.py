"""Fault-injection workload harness computing the evaluation metrics."""

from .faults import FaultedSimAgent, FaultModel, derive_rng
from .report import REFERENCE, parse_json, render_json, render_table, report_metrics
from .runner import Metrics, metrics_from_logs, run_benchmark, run_filter_fuzz, run_one
from .verify import CellResult, check_cell, run_verify
from .workload import CAPABILITY, SHAPES, WorkflowSpec, generate_workload

__all__ = [
    "CAPABILITY",
    "REFERENCE",
    "SHAPES",
    "CellResult",
    "FaultModel",
    "FaultedSimAgent",
    "Metrics",
    "WorkflowSpec",
    "check_cell",
    "derive_rng",
    "generate_workload",
    "metrics_from_logs",
    "parse_json",
    "render_json",
    "render_table",
    "report_metrics",
    "run_benchmark",
    "run_filter_fuzz",
    "run_one",
    "run_verify",
]
