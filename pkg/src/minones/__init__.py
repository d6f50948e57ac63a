"""Kernelization toolkit for weight-bounded Boolean constraint satisfaction.

The package decides, for a finite set of Boolean relations, whether the
problem of satisfying a conjunction of constraints with at most k variables
set to true admits a polynomial-size kernel; it executes that kernelization
when it exists and builds the reduction certifying hardness when it does not.
"""

from .errors import (
    ArityMismatch,
    BoundViolated,
    EmptyRelation,
    LemmaContractViolated,
    MinOnesError,
    NotIHSBMinus,
    NotMergeableLanguage,
    OutOfScopeFallback,
    ParseError,
    TooLarge,
    UnknownRelation,
    UnsatisfiableConstraint,
)
from .relations import (
    MergeWitness,
    PropertyRecord,
    Relation,
    analyze,
    check_property,
    is_mergeable,
    merge_witness,
)

__all__ = [
    "ArityMismatch",
    "BoundViolated",
    "EmptyRelation",
    "LemmaContractViolated",
    "MergeWitness",
    "MinOnesError",
    "NotIHSBMinus",
    "NotMergeableLanguage",
    "OutOfScopeFallback",
    "ParseError",
    "PropertyRecord",
    "Relation",
    "TooLarge",
    "UnknownRelation",
    "UnsatisfiableConstraint",
    "analyze",
    "check_property",
    "is_mergeable",
    "merge_witness",
]

__version__ = "0.1.0"
