"""Exception types shared across the package."""


class CadselectError(Exception):
    """Base class for all package errors."""


class NonConvergence(CadselectError):
    """An iterative geometry kernel or the LP solver did not reach its tolerance."""


class Unsupported(CadselectError):
    """The requested operation is not available for this combination of sets."""


class EmptyValue(CadselectError):
    """A set-valued mapping (or an intersection) evaluated to the empty set."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SelectionInfeasible(CadselectError):
    """A selection construction could not find an admissible anchor."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class ParseError(CadselectError):
    """Malformed spec file. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(ParseError):
    """Well-formed spec file whose content breaks an invariant."""


class ProbeCatalogTooCoarse(UserWarning):
    """No probe ball met a mapping near some breakpoint."""
