"""Exception hierarchy and error codes shared by the engine and the CLI."""
from enum import Enum
from typing import Optional


class ErrorCode(str, Enum):
    """Standardized error codes for toolkit operations."""
    NONE = "none"
    NOT_FOUND = "not_found"
    IO_ERROR = "io_error"
    DATA_FORMAT = "data_format"
    SHAPE_MISMATCH = "shape_mismatch"
    VALIDATION_ERROR = "validation_error"
    LEARNER_FAILURE = "learner_failure"
    CONFIG_ERROR = "config_error"
    INTERNAL_ERROR = "internal_error"


class ClareError(Exception):
    """Base class for every error raised by the toolkit."""

    error_code: ErrorCode = ErrorCode.INTERNAL_ERROR


class DataFormatError(ClareError, ValueError):
    """Malformed CSV/CLRE input: ragged rows, non-numeric cells, bad headers."""

    error_code = ErrorCode.DATA_FORMAT


class ShapeError(ClareError, ValueError):
    """Array dimensions do not match what an operation expects."""

    error_code = ErrorCode.SHAPE_MISMATCH

    def __init__(self, what: str, expected: object, actual: object):
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected {expected}, got {actual}")


class DomainError(ClareError, ValueError):
    """A documented precondition or range was violated."""

    error_code = ErrorCode.VALIDATION_ERROR


class LearnerError(ClareError, ValueError):
    """A learner could not produce a codec (divergence, degenerate rows, ...)."""

    error_code = ErrorCode.LEARNER_FAILURE


class LearnerFitError(LearnerError):
    """A learner failure annotated with the (K, fold) task that raised it."""

    def __init__(self, method: str, k: int, fold: Optional[int], cause: Exception):
        self.method = method
        self.k = k
        self.fold = fold
        self.cause = cause
        where = "full-data refit" if fold is None else f"fold={fold}"
        super().__init__(f"{method} learner failed at K={k}, {where}: {cause}")


class ConfigError(ClareError, ValueError):
    """Run configuration could not be parsed or validated."""

    error_code = ErrorCode.CONFIG_ERROR

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None):
        self.key = key
        self.line = line
        location = f"line {line}: " if line is not None else ""
        super().__init__(f"{location}{message}")


class CodecFormatError(ClareError, ValueError):
    """A serialized codec is malformed, or a codec cannot be serialized."""

    error_code = ErrorCode.DATA_FORMAT
