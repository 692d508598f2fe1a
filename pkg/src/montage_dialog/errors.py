"""Exception hierarchy shared across the toolkit.

Validation-class errors map to CLI exit code 2, I/O problems to 3.
"""


class MontageDialogError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(MontageDialogError):
    """A config object (vocabulary, templates, sim config) is invalid."""


class ValidationError(MontageDialogError):
    """User-supplied data violates a documented contract."""


class IngestionError(MontageDialogError):
    """An annotation/category file could not be parsed."""

    def __init__(self, message, line=None, position=None):
        detail = message
        if line is not None:
            detail = f"{message} (line {line}" + (
                f", position {position})" if position is not None else ")"
            )
        super().__init__(detail)
        self.line = line
        self.position = position


class SimulationError(MontageDialogError):
    """The simulator could not satisfy its sampling plan."""


class FrameParseError(MontageDialogError):
    """Malformed linearized frame text."""

    def __init__(self, message, offset, expected=None):
        detail = f"{message} at offset {offset}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)
        self.offset = offset
        self.expected = expected


class UnknownTokenError(MontageDialogError):
    """A linear frame names an act/activity outside the ontology."""
