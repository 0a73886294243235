"""Strict parsing of problem files."""

import json
import math
from typing import Sequence, Tuple, Union

from pydantic import ValidationError

from shared.exceptions import ProblemParseError
from shared.logging_setup import get_logger
from services.cli_io.schemas import PROBLEM_ADAPTER, ProblemFile

logger = get_logger(__name__)


def _position(text: str, offset: int) -> Tuple[int, int]:
    """1-based line and column of a character offset."""
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def locate(text: str, loc: Sequence[Union[str, int]]) -> Tuple[int, int]:
    """
    Line and column of the deepest key of a validation path found in the text.

    Keys are searched in order, each after the previous one; list indices
    are skipped, so the reported position is that of the enclosing key.

    Args:
        text: Problem file contents
        loc: Validation error path

    Returns:
        (line, column), (1, 1) when no key is found
    """
    offset = 0
    for part in loc:
        if not isinstance(part, str):
            continue
        found = text.find(json.dumps(part), offset)
        if found >= 0:
            offset = found
    return _position(text, offset)


def _reject_constant(token: str):
    raise ValueError(token)


def _finite_float(token: str) -> float:
    value = float(token)
    if not math.isfinite(value):
        raise ValueError(token)
    return value


def parse_problem(data: Union[bytes, str]) -> ProblemFile:
    """
    Parse and validate a problem file.

    Args:
        data: UTF-8 JSON text

    Returns:
        The typed problem model selected by its "kind"
    """
    if isinstance(data, bytes):
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ProblemParseError(f"problem file is not UTF-8: {e.reason}", line=1, column=e.start + 1) from e
    else:
        text = data

    try:
        raw = json.loads(text, parse_constant=_reject_constant, parse_float=_finite_float)
    except json.JSONDecodeError as e:
        raise ProblemParseError(f"malformed JSON: {e.msg}", line=e.lineno, column=e.colno) from e
    except ValueError as e:
        token = str(e)
        line, column = _position(text, max(text.find(token), 0))
        raise ProblemParseError(
            f"non-finite number {token} is not allowed",
            line=line,
            column=column,
            details={"token": token},
        ) from e

    try:
        problem = PROBLEM_ADAPTER.validate_python(raw)
    except ValidationError as e:
        first = e.errors()[0]
        loc = list(first["loc"])
        line, column = locate(text, loc)
        logger.debug("problem_rejected", loc=loc, message=first["msg"])
        raise ProblemParseError(
            f"schema violation at {'.'.join(str(p) for p in loc) or '<root>'}: {first['msg']}",
            line=line,
            column=column,
            details={"loc": [str(p) for p in loc], "errors": len(e.errors())},
        ) from e
    logger.debug("problem_parsed", kind=problem.kind)
    return problem
