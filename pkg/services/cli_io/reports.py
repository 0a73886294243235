"""Canonical report rendering and residual traces."""

import csv
import io
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Sequence, Tuple

import numpy as np
import yaml
from pydantic import BaseModel

from shared.logging_setup import get_logger

logger = get_logger(__name__)

FLOAT_FORMAT = ".17g"
TRACE_HEADER = ("box", "residual")


class ReportFormat(str, Enum):
    """Output format of a report."""

    TEXT = "text"
    JSON = "json"


def format_float(value: float) -> str:
    """17 significant digits; non-finite values become quoted strings."""
    if math.isnan(value):
        return '"nan"'
    if math.isinf(value):
        return '"inf"' if value > 0 else '"-inf"'
    return format(value, FLOAT_FORMAT)


def to_plain(value: Any) -> Any:
    """Convert numpy, enum and complex values to plain JSON-compatible data."""
    if isinstance(value, BaseModel):
        return to_plain(value.model_dump(by_alias=True, exclude_none=True))
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


def _canonical(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=True)
    if isinstance(value, list):
        return "[" + ",".join(_canonical(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(f"{json.dumps(k, ensure_ascii=True)}:{_canonical(v)}" for k, v in items) + "}"
    raise TypeError(f"cannot render {type(value).__name__}")


def canonical_json(payload: Any) -> str:
    """Sorted keys, no whitespace, floats with 17 significant digits, newline-terminated."""
    return _canonical(to_plain(payload)) + "\n"


def _text_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {k: _text_safe(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_text_safe(v) for v in value]
    return value


def render_report(payload: Any, fmt: ReportFormat = ReportFormat.JSON) -> bytes:
    """
    Render a result payload.

    Args:
        payload: Report dictionary (numpy values allowed)
        fmt: json (canonical, byte-stable) or text (YAML for reading)

    Returns:
        Encoded report
    """
    fmt = ReportFormat(fmt)
    if fmt == ReportFormat.JSON:
        return canonical_json(payload).encode("ascii")
    plain = _text_safe(to_plain(payload))
    return yaml.safe_dump(plain, sort_keys=True, default_flow_style=None, width=100).encode("utf-8")


def render_problem(problem: BaseModel) -> bytes:
    """Canonical JSON of a parsed problem; parse_problem reads it back unchanged."""
    return canonical_json(problem).encode("ascii")


def trace_rows(history: Iterable[Tuple[int, float]]) -> Sequence[Tuple[str, str]]:
    """Rows of the residual trace with canonical float text."""
    rows = []
    for side, residual in history:
        text = format_float(float(residual)).strip('"')
        rows.append((str(int(side)), text))
    return rows


def write_trace(path: Path, history: Iterable[Tuple[int, float]]) -> None:
    """
    Write the per-box residual history as CSV.

    Args:
        path: Output file
        history: (box side, residual) pairs
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(TRACE_HEADER)
    writer.writerows(trace_rows(history))
    Path(path).write_bytes(buffer.getvalue().encode("ascii"))
    logger.debug("trace_written", path=str(path))
