"""Reference solvers for weight-bounded satisfiability.

Two independent routes to the same answer: an exhaustive search over true
sets ordered by weight, and a depth-bounded branching search that only ever
sets variables to true in response to a falsified constraint. The branching
solver explores its whole tree rather than stopping at the first solution,
so both report the exact minimum weight and must agree; tests lean on that.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import TooLarge
from .formulas import Formula, Var, ZERO, token_key

SAT = "SAT"
UNSAT = "UNSAT"

_BRUTE_BUDGET = 1 << 24


@dataclass(frozen=True)
class SolveResult:
    status: str
    weight: int | None
    assignment: frozenset | None

    @property
    def satisfiable(self) -> bool:
        return self.status == SAT


def _compiled(formula: Formula) -> list[tuple[tuple[Var, ...], frozenset, Var | None]]:
    """Per constraint: args, allowed value tuples, relation name."""
    out = []
    for c in formula.constraints:
        rel = formula.language.get(c.relation)
        out.append((c.args, frozenset(rel.tuples), c.relation))
    return out


def _value(args: tuple[Var, ...], true_set) -> tuple[int, ...]:
    return tuple(1 if (a != ZERO and a in true_set) else 0 for a in args)


def solve_brute(formula: Formula, k: int | None = None) -> SolveResult:
    """Try every true set in order of weight, then lexicographically.

    With k given, only weights up to k are tried and UNSAT means no solution
    of weight at most k; with k omitted every weight is tried. Raises
    TooLarge when the enumeration would exceed the fixed budget.
    """
    universe = sorted(formula.universe, key=token_key)
    n = len(universe)
    kmax = n if k is None else min(k, n)
    budget = sum(math.comb(n, i) for i in range(kmax + 1))
    if budget > _BRUTE_BUDGET:
        raise TooLarge(
            f"brute-force enumeration of {budget} candidate sets exceeds the budget"
        )
    compiled = _compiled(formula)
    for size in range(kmax + 1):
        for combo in itertools.combinations(universe, size):
            T = set(combo)
            if all(_value(args, T) in allowed for args, allowed, _ in compiled):
                return SolveResult(SAT, size, frozenset(T))
    return SolveResult(UNSAT, None, None)


def solve_branch(formula: Formula, k: int) -> SolveResult:
    """Depth-bounded branching on the first falsified constraint.

    At each node all unassigned variables read false. If some constraint is
    falsified, a variable from its false-reading arguments must flip to
    true, so the search branches on exactly those; satisfied nodes are
    recorded and never deepened, since supersets only weigh more. The full
    tree is explored (with prefix-set memoization) and the lightest recorded
    node is the exact optimum among weights up to k.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    compiled = _compiled(formula)
    best: list[int | None] = [None]
    best_set: list[frozenset | None] = [None]
    seen: set[frozenset] = set()

    def first_falsified(T: set) -> tuple[Var, ...] | None:
        for args, allowed, _ in compiled:
            if _value(args, T) not in allowed:
                return args
        return None

    def descend(T: set) -> None:
        if best[0] is not None and len(T) >= best[0]:
            return
        frozen = frozenset(T)
        if frozen in seen:
            return
        seen.add(frozen)
        args = first_falsified(T)
        if args is None:
            best[0] = len(T)
            best_set[0] = frozen
            return
        if len(T) == k:
            return
        for a in args:
            if a != ZERO and a not in T:
                T.add(a)
                descend(T)
                T.remove(a)

    descend(set())
    if best[0] is None:
        return SolveResult(UNSAT, None, None)
    return SolveResult(SAT, best[0], best_set[0])
