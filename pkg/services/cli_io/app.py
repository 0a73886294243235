"""Command-line interface: one subcommand per construction."""

from pathlib import Path
from typing import Annotated, Any, Callable, Dict, Optional, Tuple

import typer

from shared.config import BoxOffset, ScheduleKind, apply_overrides, reload_config
from shared.exceptions import AmenableError, ConvergenceError, ProblemParseError
from shared.logging_setup import get_logger, setup_logging
from services.cli_io.handlers import (
    CommandOutcome,
    expect_kind,
    run_bounds,
    run_check_amenable,
    run_commuting_projection,
    run_decompose,
    run_enlarge_check,
    run_fixed_point,
    run_intertwine,
    run_isometrize,
    run_mean,
    run_renorm,
)
from services.cli_io.parser import parse_problem
from services.cli_io.reports import ReportFormat, render_report, write_trace

logger = get_logger(__name__)

INTERNAL_ERROR_CODE = 1

app = typer.Typer(
    name="amenable",
    help="Fixed-point constructions for amenable semigroup actions at finite dimension.",
    no_args_is_help=True,
    add_completion=False,
)

InputOption = Annotated[Path, typer.Option("--input", "-i", help="Problem file (JSON).")]
OutputOption = Annotated[ReportFormat, typer.Option("--output", "-o", help="Report format.")]
TolOption = Annotated[Optional[float], typer.Option("--tol", help="Rank tolerance override (default 1e-9).")]
MaxBoxOption = Annotated[Optional[int], typer.Option("--max-box", help="Cap on every Følner box side.")]
TraceOption = Annotated[Optional[Path], typer.Option("--trace", help="Write the residual history as CSV.")]
BoxOffsetOption = Annotated[
    Optional[BoxOffset],
    typer.Option("--box-offset", help="Følner boxes: translated {N+1..2N}, plain {1..N} or unital {0..N-1}."),
]
ScheduleOption = Annotated[
    Optional[ScheduleKind],
    typer.Option("--schedule", help="Box sides: composite (2, 6, 12, 60, ...) or dyadic (2, 4, 8, ...)."),
]


def _emit(payload, output: ReportFormat) -> None:
    typer.echo(render_report(payload, output), nl=False)


def _overrides(
    tol: Optional[float],
    max_box: Optional[int],
    box_offset: Optional[BoxOffset],
    schedule: Optional[ScheduleKind],
) -> Dict[str, Any]:
    return {"rank_rtol": tol, "max_box": max_box, "box_offset": box_offset, "schedule": schedule}


def _execute(
    input_path: Path,
    output: ReportFormat,
    overrides: Dict[str, Any],
    trace: Optional[Path],
    kinds: Tuple[str, ...],
    handler: Callable[..., CommandOutcome],
) -> None:
    """Parse, run and render one problem; exit with the error's code on failure."""
    try:
        reload_config()
        setup_logging()
        try:
            apply_overrides(**overrides)
        except ValueError as e:
            raise typer.BadParameter(str(e))
        try:
            data = input_path.read_bytes()
        except OSError as e:
            raise ProblemParseError(f"cannot read {input_path}: {e.strerror}") from e
        problem = parse_problem(data)
        expect_kind(problem, kinds)
        outcome = handler(problem)
    except AmenableError as e:
        logger.warning("command_failed", error=type(e).__name__, message=e.message, exit_code=e.exit_code)
        if trace is not None and isinstance(e, ConvergenceError) and e.report is not None:
            write_trace(trace, e.report.history)
        _emit(e.to_report(), output)
        raise typer.Exit(code=e.exit_code)
    except (typer.BadParameter, typer.Exit):
        raise
    except Exception as e:
        logger.exception("internal_error")
        _emit(
            {"kind": "error", "error": type(e).__name__, "message": str(e), "hypothesis": None, "details": {}},
            output,
        )
        raise typer.Exit(code=INTERNAL_ERROR_CODE)

    if trace is not None:
        write_trace(trace, outcome.history)
    _emit(outcome.payload, output)


@app.command("check-amenable")
def check_amenable(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
):
    """Decide whether a finite semigroup has a right invariant mean."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(input_path, output, overrides, trace, ("semigroup", "mean"), run_check_amenable)


@app.command("mean")
def mean(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
):
    """Right invariant mean of a finite semigroup, or its certificate."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(input_path, output, overrides, trace, ("semigroup", "mean"), run_mean)


@app.command("fixed-point")
def fixed_point(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
):
    """Fixed point of an affine semigroup action from its invariant mean."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(input_path, output, overrides, trace, ("fixed-point",), run_fixed_point)


@app.command("bounds")
def bounds(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
):
    """Word bound estimates m and M of a commuting action."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(input_path, output, overrides, trace, ("action",), run_bounds)


@app.command("decompose")
def decompose(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
):
    """Split the space into fixed vectors and the closed range span."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(input_path, output, overrides, trace, ("decompose",), run_decompose)


@app.command("commuting-projection")
def commuting_projection(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
    refine: Annotated[bool, typer.Option("--refine", help="Descend toward a least-norm projection.")] = False,
):
    """Projection onto an invariant subspace commuting with the action."""
    _execute(
        input_path,
        output,
        _overrides(tol, max_box, box_offset, schedule),
        trace,
        ("projection",),
        lambda problem: run_commuting_projection(problem, refine=refine),
    )


@app.command("intertwine")
def intertwine(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
    exact_fallback: Annotated[
        bool, typer.Option("--exact-fallback", help="Use the exact route when the averaging orbit grows.")
    ] = False,
):
    """Extend an intertwiner from an invariant subspace."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(
        input_path,
        output,
        overrides,
        trace,
        ("intertwine",),
        lambda problem: run_intertwine(problem, exact_fallback=exact_fallback),
    )


@app.command("isometrize")
def isometrize(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
):
    """Conjugate the action to isometries by an invariant Gram root."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(input_path, output, overrides, trace, ("isometrize",), run_isometrize)


@app.command("renorm")
def renorm(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
):
    """Equivalent norm invariant under the action."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(input_path, output, overrides, trace, ("renorm",), run_renorm)


@app.command("enlarge-check")
def enlarge_check(
    input_path: InputOption,
    output: OutputOption = ReportFormat.JSON,
    tol: TolOption = None,
    max_box: MaxBoxOption = None,
    trace: TraceOption = None,
    box_offset: BoxOffsetOption = None,
    schedule: ScheduleOption = None,
):
    """Check semigroup bounds on every signed word of the generated group."""
    overrides = _overrides(tol, max_box, box_offset, schedule)
    _execute(input_path, output, overrides, trace, ("enlarge",), run_enlarge_check)


def main() -> None:
    """Console entry point."""
    app()
