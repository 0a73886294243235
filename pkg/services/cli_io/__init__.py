"""Problem files, report rendering and the command-line surface."""

from services.cli_io.app import app, main
from services.cli_io.handlers import CommandOutcome, expect_kind, load_action, load_subspace
from services.cli_io.parser import locate, parse_problem
from services.cli_io.reports import (
    ReportFormat,
    canonical_json,
    format_float,
    render_problem,
    render_report,
    trace_rows,
    write_trace,
)
from services.cli_io.schemas import KINDS, PROBLEM_ADAPTER, ProblemFile, matrix_array

__all__ = [
    "KINDS",
    "PROBLEM_ADAPTER",
    "CommandOutcome",
    "ProblemFile",
    "ReportFormat",
    "app",
    "canonical_json",
    "expect_kind",
    "format_float",
    "load_action",
    "load_subspace",
    "locate",
    "main",
    "matrix_array",
    "parse_problem",
    "render_problem",
    "render_report",
    "trace_rows",
    "write_trace",
]
