"""Exception hierarchy shared across the package.

Everything raised on purpose derives from MinOnesError so callers (and the
CLI) can tell deliberate signals from genuine bugs.
"""

from __future__ import annotations


class MinOnesError(Exception):
    """Base class for all errors raised by this package."""


class ArityMismatch(MinOnesError):
    """Tuples or argument lists of incompatible lengths were combined."""


class EmptyRelation(MinOnesError):
    """A construction produced a relation with no tuples."""


class UnknownRelation(MinOnesError):
    """A constraint refers to a relation name absent from the language."""


class UnsatisfiableConstraint(MinOnesError):
    """A single constraint admits no satisfying assignment at all.

    Raised during normalization when identifying repeated arguments empties
    the relation; the formula is trivially unsatisfiable.
    """

    def __init__(self, constraint, message: str = ""):
        self.constraint = constraint
        super().__init__(message or f"constraint {constraint} is unsatisfiable")


class TooLarge(MinOnesError):
    """An exhaustive routine was asked to exceed its size cap."""


class NotMergeableLanguage(MinOnesError):
    """Kernelization was requested for a language with a non-mergeable relation."""


class NotIHSBMinus(MinOnesError):
    """A zero-valid relation is not implementable by negative clauses and
    implications; equivalently, it is not mergeable."""


class LemmaContractViolated(MinOnesError):
    """An exhaustively checked internal construction failed its contract.

    This never fires on inputs that satisfy the documented preconditions;
    seeing it means a bug, not bad input.
    """


class BoundViolated(LemmaContractViolated):
    """The kernel size bound assertion failed."""


class OutOfScopeFallback(MinOnesError):
    """The instance falls outside the guaranteed parameter regime."""


class ParseError(MinOnesError):
    """A file failed to parse."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
