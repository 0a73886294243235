"""Custom exceptions for the amenable fixed-point toolkit."""

from typing import Any, Dict, Optional


class AmenableError(Exception):
    """Base exception for the toolkit."""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = dict(details or {})

    def to_report(self) -> Dict[str, Any]:
        """Render the error as a report payload."""
        return {
            "kind": "error",
            "error": type(self).__name__,
            "message": self.message,
            "hypothesis": getattr(self, "hypothesis", None),
            "details": self.details,
        }


class ConfigurationError(AmenableError):
    """Raised when configuration is invalid."""

    pass


class InvalidInputError(AmenableError):
    """Raised when input validation fails."""

    exit_code = 2


class DimensionMismatchError(InvalidInputError):
    """Raised when operand shapes do not agree."""

    pass


class AssociativityError(InvalidInputError):
    """Raised when a multiplication table is not associative."""

    pass


class HomomorphismError(InvalidInputError):
    """Raised when an index map does not respect multiplication."""

    pass


class NonCommutingError(InvalidInputError):
    """Raised when two generators fail to commute."""

    pass


class ActionLawError(InvalidInputError):
    """Raised when an affine action violates (x.s).t = x.(st)."""

    pass


class HypothesisError(AmenableError):
    """Raised when a hypothesis of a construction fails on the input."""

    exit_code = 2
    hypothesis: str = "unspecified"

    def __init__(
        self,
        message: str,
        details: Optional[Dict[str, Any]] = None,
        hypothesis: Optional[str] = None,
    ):
        super().__init__(message, details)
        if hypothesis is not None:
            self.hypothesis = hypothesis


class InvarianceViolationError(HypothesisError):
    """Raised when T_g(Y) is not contained in Y."""

    hypothesis = "invariant-subspace: T_s(Y) = Y and the restriction T_s|Y is invertible"


class SingularRestrictionError(HypothesisError):
    """Raised when T_g restricted to Y is not invertible."""

    hypothesis = "invariant-subspace: T_s(Y) = Y and the restriction T_s|Y is invertible"


class NonInvertibleError(HypothesisError):
    """Raised when an operator required to be invertible is singular."""

    hypothesis = "invertible-target: every B_g is an isomorphism"


class NoCommutingProjectionError(HypothesisError):
    """Raised when no projection onto Y commutes with the action."""

    hypothesis = "commuting-projection: fixed set of the projection action is nonempty"


class NoIntertwinerError(HypothesisError):
    """Raised when no intertwining extension exists."""

    hypothesis = "intertwiner-extension: B_g T = T A_g with T|E = T0 is solvable"


class SandwichError(HypothesisError):
    """Raised when the two-sided bound m|x| <= |T_s x| <= M|x| fails."""

    hypothesis = "uniform-sandwich: 0 < m <= |T_s x|/|x| <= M < inf"


class BoundViolationError(HypothesisError):
    """Raised when a signed word leaves the enlarged bound interval."""

    hypothesis = "uniform-sandwich on the generated semigroup"


class NotDirectSumError(HypothesisError):
    """Raised when N and R overlap or fail to span."""

    hypothesis = "power-bounded: N + R is a direct sum spanning the space"


class OrbitGrowthError(HypothesisError):
    """Raised when an averaging orbit grows without bound."""

    hypothesis = "bounded-orbit: sup over s of |X.s| is finite"


class NumericalError(AmenableError):
    """Raised when the numerics fail to produce a verified answer."""

    exit_code = 3


class ConvergenceError(NumericalError):
    """Raised when averaging does not converge within the schedule."""

    def __init__(self, message: str, report: Any = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.report = report


class RouteDisagreementError(NumericalError):
    """Raised when the averaging and exact routes disagree."""

    pass


class CertificateError(NumericalError):
    """Raised when an infeasibility certificate fails verification."""

    pass


class FixedPointError(NumericalError):
    """Raised when an averaged point is not fixed by every element."""

    pass


class SingularMatrixError(NumericalError):
    """Raised when a matrix is numerically singular."""

    pass


class ProblemParseError(AmenableError):
    """Raised when a problem file cannot be parsed."""

    exit_code = 4

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        details: Optional[Dict[str, Any]] = None,
    ):
        details = dict(details or {})
        details.setdefault("line", line)
        details.setdefault("column", column)
        super().__init__(message, details)
        self.line = line
        self.column = column
