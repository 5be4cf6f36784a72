"""Exception types shared across the package.

The hierarchy mirrors the exit-code contract of the command line tool:
input and domain problems map to exit 2, a failed stage of the build
pipeline maps to exit 3.
"""

from __future__ import annotations


class InputError(ValueError):
    """Invalid user-supplied data: shapes, ranges, schema violations."""


class DomainError(InputError):
    """Evaluation requested outside the valid parameter interval."""


class ExpressionError(InputError):
    """Scalar-field expression failed to parse.

    Carries the character position where parsing stopped.
    """

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class WitnessNotFoundError(RuntimeError):
    """A probe could not collect enough field values above threshold."""


class PipelineError(RuntimeError):
    """A stage of the path construction pipeline failed.

    ``stage`` names the failing stage so callers can report it.
    """

    def __init__(self, stage: str, message: str) -> None:
        super().__init__(f"stage '{stage}': {message}")
        self.stage = stage
