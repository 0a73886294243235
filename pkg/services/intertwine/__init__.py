"""Intertwining operators between commuting actions."""

from services.intertwine.extension import (
    IntertwinerProblem,
    IntertwinerResult,
    extend_intertwiner,
    intertwiner_family,
    intertwiner_residuals,
)

__all__ = [
    "IntertwinerProblem",
    "IntertwinerResult",
    "extend_intertwiner",
    "intertwiner_family",
    "intertwiner_residuals",
]
