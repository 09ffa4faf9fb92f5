"""Exception hierarchy shared by all modules."""


class PhrgError(Exception):
    """Base class for library errors."""


class TypingError(PhrgError):
    """A label is used with the wrong number of tentacles."""


class UnknownLabel(PhrgError, KeyError):
    def __init__(self, label: str):
        super().__init__(label)
        self.label = label

    def __str__(self) -> str:
        return f"unknown label {self.label!r}"


class ValidationError(PhrgError):
    """A grammar or document does not satisfy its invariants."""

    def __init__(self, message: str, problems: list[str] | None = None):
        super().__init__(message)
        self.problems = problems or []


class ParseError(PhrgError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class UnsupportedShape(PhrgError):
    """The input is valid but outside what a construction can handle."""


class BadTrace(PhrgError):
    """A trace names a table that does not exist."""
