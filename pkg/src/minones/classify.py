"""Classification of constraint languages by kernelization behaviour.

For satisfiability with at most k true variables, a language falls into one
of three regimes:

* PTIME: every relation is zero-valid, or every relation is closed under
  componentwise AND, or every relation is expressible by constants,
  equalities and disequalities. The all-zero assignment, propagation, or
  2-colouring solves such instances outright.
* POLY_KERNEL: none of the above, but every relation is mergeable, so
  instances compress to a polynomial number of variables.
* NO_POLY_KERNEL: some relation is not mergeable; the witness quadruple
  drives a parameter-preserving reduction from exact hitting set, which
  rules out polynomial kernels under the standard assumption.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import ConstraintLanguage
from .relations import MergeWitness, PropertyRecord, analyze

PTIME = "PTIME"
POLY_KERNEL = "POLY_KERNEL"
NO_POLY_KERNEL = "NO_POLY_KERNEL"

_PTIME_REASONS = ("zero_valid", "horn", "width2_affine")


@dataclass(frozen=True)
class ClassificationReport:
    outcome: str
    ptime_reason: str | None
    witness_relation: str | None
    witness: MergeWitness | None
    records: tuple[PropertyRecord, ...]

    def record(self, name: str) -> PropertyRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)


def classify(language: ConstraintLanguage) -> ClassificationReport:
    """Place a language in the PTIME / POLY_KERNEL / NO_POLY_KERNEL trichotomy.

    The report always carries the per-relation property records; the witness
    fields are filled exactly when the outcome is NO_POLY_KERNEL, naming the
    first non-mergeable relation in language order.
    """
    records = tuple(analyze(rel) for rel in language)
    for reason in _PTIME_REASONS:
        if all(rec.flag(reason) for rec in records):
            return ClassificationReport(PTIME, reason, None, None, records)
    for rec in records:
        if not rec.mergeable:
            return ClassificationReport(
                NO_POLY_KERNEL, None, rec.name, rec.witness, records
            )
    return ClassificationReport(POLY_KERNEL, None, None, None, records)
