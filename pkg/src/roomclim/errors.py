"""Exception types shared across the package."""

from __future__ import annotations


class RoomclimError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(RoomclimError):
    """A source file could not be tokenized or converted.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StructuralError(RoomclimError):
    """A file parsed cleanly but its overall shape is wrong.

    Examples: wrong record count, missing months, duplicate timestamps.
    """


class ValidationError(RoomclimError):
    """A parsed value is outside its documented physical or logical range."""

    def __init__(self, field: str, value, message: str = "", line: int | None = None):
        self.field = field
        self.value = value
        self.line = line
        text = f"{field}={value!r} out of range"
        if message:
            text += f": {message}"
        if line is not None:
            text = f"line {line}: {text}"
        super().__init__(text)


class ConfigError(RoomclimError):
    """A study or archetype configuration is incomplete or inconsistent."""
