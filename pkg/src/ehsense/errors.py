"""Shared exception types for the pipeline."""


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition or invariant."""


class ParseError(ValueError):
    """Raised when a file cannot be parsed; the message carries line context."""
