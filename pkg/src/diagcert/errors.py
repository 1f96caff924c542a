"""Exception hierarchy shared by all diagcert modules."""


class DiagcertError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(DiagcertError):
    """Caller violated a precondition (bad input, descriptor mismatch, parse error)."""


class ParseError(UsageError):
    """Malformed polynomial string or JSON document; carries a position."""

    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class NotEuclideanError(UsageError):
    """Operation requires Z, Q[x] or F_p[x]; use the diagonalizer instead."""


class FullRankRequiredError(UsageError):
    """Square input with nonzero determinant required."""


class DegenerateInputError(UsageError):
    """Input is outside the intended hypotheses (zero module, unit determinant...)."""


class StepBudgetExceeded(DiagcertError):
    """A computation hit its step budget; raise rather than hang."""


class InternalInvariantError(DiagcertError):
    """An internal cross-check failed.  Always a bug, never a verdict."""
