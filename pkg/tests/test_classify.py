"""Language classification across the three regimes."""

from __future__ import annotations

import random

from minones.classify import (
    NO_POLY_KERNEL,
    POLY_KERNEL,
    PTIME,
    classify,
)
from minones.formulas import ConstraintLanguage
from minones.relations import Relation

import oracles

OR2 = Relation.from_strings("OR2", ["01", "10", "11"])
EVEN3 = Relation.from_strings("EVEN3", ["000", "011", "101", "110"])
ODD3 = Relation.from_strings("ODD3", ["001", "010", "100", "111"])
NEQ2 = Relation.from_strings("NEQ2", ["01", "10"])
NAND2 = Relation.from_strings("NAND2", ["00", "01", "10"])
IMPL3 = Relation.from_strings("IMPL3", ["000", "001", "010", "011", "101", "110", "111"])

_RANK = {PTIME: 0, POLY_KERNEL: 1, NO_POLY_KERNEL: 2}


def outcome(*rels: Relation) -> str:
    return classify(ConstraintLanguage(rels)).outcome


class TestKnownLanguages:
    def test_single_relations(self):
        rep = classify(ConstraintLanguage([EVEN3]))
        assert rep.outcome == PTIME and rep.ptime_reason == "zero_valid"
        assert rep.witness is None
        assert not rep.record("EVEN3").mergeable

        rep = classify(ConstraintLanguage([NAND2]))
        assert rep.outcome == PTIME and rep.ptime_reason == "zero_valid"

        rep = classify(ConstraintLanguage([NEQ2]))
        assert rep.outcome == PTIME and rep.ptime_reason == "width2_affine"

        rep = classify(ConstraintLanguage([OR2]))
        assert rep.outcome == POLY_KERNEL and rep.ptime_reason is None

    def test_pairs(self):
        assert outcome(OR2, ODD3) == POLY_KERNEL
        assert outcome(OR2, EVEN3) == NO_POLY_KERNEL
        assert outcome(NEQ2, EVEN3) == NO_POLY_KERNEL
        assert outcome(OR2, IMPL3) == NO_POLY_KERNEL

    def test_witness_names_first_nonmergeable(self):
        rep = classify(ConstraintLanguage([OR2, EVEN3, IMPL3]))
        assert rep.outcome == NO_POLY_KERNEL
        assert rep.witness_relation == "EVEN3"
        assert rep.witness is not None and rep.witness.verify(EVEN3)

    def test_zero_valid_wins_before_horn(self):
        # NAND2 is both zero-valid and AND-closed; the first reason is reported
        rep = classify(ConstraintLanguage([NAND2]))
        assert rep.ptime_reason == "zero_valid"

    def test_horn_reason(self):
        impl = Relation.from_strings("GETS1", ["01", "11"])  # y = 1
        and_closed = Relation.from_strings("PICK", ["01", "11", "00"])
        rep = classify(ConstraintLanguage([impl, and_closed]))
        assert rep.outcome == PTIME and rep.ptime_reason == "horn"

    def test_records_cover_language_in_order(self):
        rep = classify(ConstraintLanguage([OR2, EVEN3]))
        assert [r.name for r in rep.records] == ["OR2", "EVEN3"]


class TestMonotonicity:
    def test_adding_relations_never_improves_the_regime(self):
        rng = random.Random(60312)
        for _ in range(80):
            rels = [
                oracles.random_relation(rng, rng.randint(1, 3)).renamed(f"R{i}")
                for i in range(rng.randint(1, 3))
            ]
            extra = oracles.random_relation(rng, rng.randint(1, 3)).renamed("EXTRA")
            base = classify(ConstraintLanguage(rels)).outcome
            grown = classify(ConstraintLanguage(rels + [extra])).outcome
            assert _RANK[grown] >= _RANK[base], (base, grown)
