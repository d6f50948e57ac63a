"""Both solvers against the power-set oracle and against each other."""

from __future__ import annotations

import random

import pytest

from minones.errors import TooLarge
from minones.formulas import Constraint, ConstraintLanguage, Formula
from minones.relations import Relation
from minones.solvers import SAT, UNSAT, solve_branch, solve_brute

import oracles

OR2 = Relation.from_strings("OR2", ["01", "10", "11"])
ODD3 = Relation.from_strings("ODD3", ["001", "010", "100", "111"])
EVEN3 = Relation.from_strings("EVEN3", ["000", "011", "101", "110"])
LANG = ConstraintLanguage([OR2, ODD3, EVEN3])


def formula(*constraints: Constraint, extra: int = 0) -> Formula:
    f = Formula(LANG, constraints)
    if extra:
        top = max((v for v in f.universe if isinstance(v, int)), default=0)
        f = Formula(LANG, constraints, f.universe | set(range(top + 1, top + 1 + extra)))
    return f


def random_formula(rng: random.Random, nvars: int, ncons: int) -> Formula:
    constraints = []
    for _ in range(ncons):
        rel = rng.choice(LANG.relations)
        args = tuple(rng.sample(range(1, nvars + 1), rel.arity))
        constraints.append(Constraint(rel.name, args))
    return Formula(LANG, tuple(constraints), frozenset(range(1, nvars + 1)))


class TestBrute:
    def test_finds_minimum_weight(self):
        f = formula(Constraint("OR2", (1, 2)), Constraint("OR2", (2, 3)))
        res = solve_brute(f)
        assert res.status == SAT and res.weight == 1
        assert res.assignment == {2}
        assert f.satisfied_by(res.assignment)

    def test_bound_respected(self):
        f = formula(Constraint("ODD3", (1, 2, 3)), Constraint("ODD3", (4, 5, 6)))
        assert solve_brute(f, k=1).status == UNSAT
        res = solve_brute(f, k=2)
        assert res.status == SAT and res.weight == 2

    def test_empty_formula(self):
        f = Formula(LANG, (), frozenset({1, 2}))
        res = solve_brute(f, k=0)
        assert res.status == SAT and res.weight == 0 and res.assignment == frozenset()

    def test_too_large_without_bound(self):
        f = Formula(LANG, (), frozenset(range(1, 26)))
        with pytest.raises(TooLarge):
            solve_brute(f)
        assert solve_brute(f, k=2).status == SAT

    def test_placeholder_semantics(self):
        f = formula(Constraint("OR2", (0, 1)))
        res = solve_brute(f)
        assert res.weight == 1 and res.assignment == {1}


class TestBranch:
    def test_matches_oracle_on_random_instances(self):
        rng = random.Random(314159)
        for _ in range(300):
            f = random_formula(rng, rng.randint(3, 8), rng.randint(1, 6))
            k = rng.randint(0, 4)
            expected = oracles.oracle_min_weight(f, k)
            got = solve_branch(f, k)
            if expected is None:
                assert got.status == UNSAT, (f, k)
            else:
                assert got.status == SAT and got.weight == expected, (f, k)
                assert f.satisfied_by(got.assignment)
                assert len(got.assignment) == expected

    def test_agrees_with_brute(self):
        rng = random.Random(2718)
        for _ in range(200):
            f = random_formula(rng, rng.randint(3, 9), rng.randint(1, 7))
            k = rng.randint(0, 3)
            a = solve_brute(f, k)
            b = solve_branch(f, k)
            assert a.status == b.status
            assert a.weight == b.weight

    def test_isolated_variables_do_not_matter(self):
        f = formula(Constraint("OR2", (1, 2)), extra=10)
        res = solve_branch(f, 1)
        assert res.status == SAT and res.weight == 1

    def test_k_zero(self):
        sat = formula(Constraint("EVEN3", (1, 2, 3)))
        assert solve_branch(sat, 0).weight == 0
        unsat = formula(Constraint("OR2", (1, 2)))
        assert solve_branch(unsat, 0).status == UNSAT

    def test_placeholder_never_branched(self):
        f = formula(Constraint("OR2", (0, 0)))
        assert solve_branch(f, 3).status == UNSAT

    def test_negative_k_rejected(self):
        with pytest.raises(ValueError):
            solve_branch(formula(Constraint("OR2", (1, 2))), -1)
