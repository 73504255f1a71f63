"""Exception hierarchy. Every error knows the CLI exit code it maps to."""

from __future__ import annotations

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class SipotError(Exception):
    exit_code = EXIT_VALIDATION


class ConfigError(SipotError):
    pass


class ExpressionSyntaxError(SipotError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class UnknownIdentifierError(SipotError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier '{name}' (at byte {offset})")
        self.name = name
        self.offset = offset


class UnknownFunctionError(SipotError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown function '{name}' (at byte {offset})")
        self.name = name
        self.offset = offset


class DomainError(SipotError):
    """ln of a non-positive number, sqrt of a negative one, division by zero."""

    exit_code = EXIT_NUMERICAL


class UnverifiedInvariantError(SipotError):
    pass


class RangeViolationError(SipotError):
    def __init__(self, family: str, inequality: str, values: dict[str, float]):
        shown = ", ".join(f"{k}={v:.17g}" for k, v in values.items())
        super().__init__(f"{family}: parameter range violated, requires {inequality} ({shown})")
        self.family = family
        self.inequality = inequality
        self.values = values


class IndexRangeError(SipotError):
    pass


class InadmissibleStateError(SipotError):
    pass


class PoleError(SipotError):
    exit_code = EXIT_NUMERICAL

    def __init__(self, message: str, location: float | None = None):
        if location is not None:
            message = f"{message} (near x={location:.17g})"
        super().__init__(message)
        self.location = location


class ConvergenceError(SipotError):
    exit_code = EXIT_NUMERICAL
