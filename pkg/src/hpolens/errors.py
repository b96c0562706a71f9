"""Exception types shared across the package."""
from __future__ import annotations


class HpolensError(Exception):
    """Base class for all errors raised by this package."""


class EmptySelectionError(HpolensError):
    """A filter (objective/budget/status) matched no trials or configs."""


class InsufficientDataError(HpolensError):
    """Not enough data points to fit or evaluate a model."""


class UnknownNameError(HpolensError, KeyError):
    """An objective, hyperparameter, run, config, or plugin name is not known."""

    def __init__(self, kind: str, name: str):
        super().__init__(f"unknown {kind}: {name!r}")
        self.kind = kind
        self.name = name

    def __str__(self) -> str:  # KeyError would quote the whole message
        return self.args[0]


class IncompatibleRunsError(HpolensError):
    """Runs cannot be grouped because their objectives disagree."""


class SchemaError(HpolensError):
    """A file violates the on-disk format."""

    def __init__(self, message: str, file: str | None = None, line: int | None = None):
        loc = ""
        if file is not None:
            loc = f"{file}: " if line is None else f"{file}:{line}: "
        super().__init__(loc + message)
        self.file = file
        self.line = line


class RunValidationError(HpolensError):
    """A run violates its structural invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("invalid run: " + "; ".join(violations))
        self.violations = violations


class InvalidParamsError(HpolensError):
    """A plugin or API call received an invalid parameter."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field
