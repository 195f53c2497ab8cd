"""Error types and the violation record shared by the validators."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Violation:
    """One broken invariant: a stable code, the offending element and a message."""

    code: str
    where: str
    message: str = ""

    def __str__(self) -> str:
        text = f"{self.code} at {self.where}"
        return f"{text}: {self.message}" if self.message else text


class MlsynthError(Exception):
    """Base error. ``code`` is a stable machine-readable tag."""

    code = "ERROR"

    def __init__(self, message: str = "", code: str | None = None):
        if code is not None:
            self.code = code
        super().__init__(f"{self.code}: {message}" if message else self.code)


class ParseError(MlsynthError):
    code = "PARSE_ERROR"


class ValidationError(MlsynthError):
    code = "VALIDATION_ERROR"

    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class ParamsInfeasible(MlsynthError):
    code = "PARAMS_INFEASIBLE"


class LayerNotFound(MlsynthError):
    code = "LAYER_NOT_FOUND"


class UnknownLogicalLink(MlsynthError):
    code = "UNKNOWN_LOGICAL_LINK"


class Unroutable(MlsynthError):
    code = "UNROUTABLE"

    def __init__(self, ordinal: int, message: str = ""):
        self.ordinal = ordinal
        super().__init__(message or f"demand {ordinal} has no path in the selected overlay")


class InfeasibleSolution(MlsynthError):
    code = "INFEASIBLE_SOLUTION"

    def __init__(self, violation: Violation):
        self.violation = violation
        super().__init__(str(violation))


class LimitsExceeded(MlsynthError):
    code = "LIMITS_EXCEEDED"


class NoData(MlsynthError):
    code = "NO_DATA"
