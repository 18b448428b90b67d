"""Exception and warning types shared across the package."""


class SobscaleError(Exception):
    """Base class for all package-specific errors."""


class DomainError(SobscaleError, ValueError):
    """An argument lies outside a function's mathematical domain."""


class LatticeMismatchError(SobscaleError, ValueError):
    """Two spectral objects live on different frequency lattices."""


class PreconditionError(SobscaleError, ValueError):
    """A documented operation precondition was violated."""


class GrammarError(SobscaleError, ValueError):
    """A weight/parameter specification string failed to parse.

    Carries the offending text and the character position of the error.
    """

    def __init__(self, message: str, text: str = "", pos: int = -1):
        self.text = text
        self.pos = pos
        if pos >= 0:
            message = f"{message} (at position {pos} in {text!r})"
        super().__init__(message)


class ConfigError(SobscaleError, ValueError):
    """Invalid experiment configuration.

    ``line``/``column`` are 1-based when known, -1 otherwise.
    """

    def __init__(self, message: str, line: int = -1, column: int = -1):
        self.line = line
        self.column = column
        if line >= 0:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DiagnosticError(SobscaleError, RuntimeError):
    """Two computation routes that must agree disagreed.

    Raised instead of silently preferring one answer, e.g. when a numeric
    tail test contradicts the closed-form convergence rule.
    """


class DegenerateExtensionWarning(UserWarning):
    """Extension requested for a weight whose lower index is at or below 1/2."""
