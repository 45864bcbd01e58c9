"""Exception hierarchy shared by every subpackage.

The CLI maps any :class:`CtcCrfError` to exit code 2.
"""

from __future__ import annotations


class CtcCrfError(Exception):
    """Base class for data and validation failures."""


class ConfigError(CtcCrfError, ValueError):
    """A configuration or policy violates its invariants."""


class LengthError(CtcCrfError, ValueError):
    """An input sequence is too short for the requested operation."""


class InsufficientFramesError(LengthError):
    pass


class EmptyInputError(CtcCrfError, ValueError):
    pass


class InfeasibleSizeError(ConfigError):
    """A requested vocabulary size cannot be reached."""


class VocabularyError(CtcCrfError, ValueError):
    """A label or symbol is outside the model's vocabulary."""


class TokenIndexError(CtcCrfError, IndexError):
    pass


class FormatError(CtcCrfError, ValueError):
    """A file does not follow its documented format."""


class ArpaParseError(FormatError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class LogProbError(CtcCrfError, ValueError):
    """Per-frame log-probabilities are non-finite or not normalized."""


class NoPathError(CtcCrfError):
    """No accepting path of the requested length exists."""


class DegenerateGraphError(CtcCrfError):
    pass


class SizeError(CtcCrfError, ValueError):
    pass


class StateError(CtcCrfError, RuntimeError):
    pass


class TrainingDivergedError(CtcCrfError, RuntimeError):
    pass
