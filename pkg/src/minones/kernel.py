"""Sunflower extraction and kernelization for mergeable languages.

For a formula over a language whose relations are all mergeable, kernelize
produces an equivalent instance (same language, same weight budget k) whose
variable count is bounded by a polynomial in k alone. The pipeline:

1. normalize constraint arguments,
2. shrink repetitive constraint groups via sunflowers until, per relation,
   the distinct argument projections onto non-zero-closed positions number
   at most k^d (d!)^2 where d is the language's maximum arity,
3. replace zero-valid constraints by negative clauses and implications,
4. force variables to zero when every occurrence is at a zero-closed
   position,
5. force to zero any variable that transitively implies at least k others,
6. force to zero everything neither demanded by a non-zero-valid constraint
   nor implied by such a variable,
7. trade the placeholder constant for k+1 fresh variables,
8. check the size bound and emit.

Steps 4-6 justify substitutions on the working copy but apply them to the
original-language formula, so the output stays inside the input language.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import (
    BoundViolated,
    EmptyRelation,
    LemmaContractViolated,
    NotMergeableLanguage,
    UnsatisfiableConstraint,
)
from .formulas import (
    ZERO,
    Constraint,
    ConstraintLanguage,
    Formula,
    Var,
    eliminate_zero_constants,
    normalize_formula,
    substitute_zero,
    token_key,
)
from .relations import (
    Relation,
    implement_sunflower_restriction,
    implement_zero_valid_ihsb,
    implication_relation,
    is_mergeable,
    negative_clause_relation,
    zero_closed_positions,
)

_IMPLICATION_TUPLES = {(0, 0), (0, 1), (1, 1)}


# ---------------------------------------------------------------------------
# sunflowers over families of variable tuples


@dataclass(frozen=True)
class Sunflower:
    """k+1 equal-length variable tuples agreeing on the core positions, with
    every variable occurring at non-core positions of at most one member."""

    members: tuple[tuple[Var, ...], ...]
    core_positions: frozenset[int]


def _member_key(member: Sequence[Var]):
    return tuple(token_key(v) for v in member)


def _validate_sunflower(sf: Sunflower, k: int) -> None:
    members = sf.members
    if len(members) != k + 1 or len(set(members)) != len(members) or len(members) < 2:
        raise LemmaContractViolated("sunflower must have k+1 distinct members")
    t = len(members[0])
    if any(len(m) != t for m in members):
        raise LemmaContractViolated("sunflower members differ in length")
    for p in sf.core_positions:
        if not 1 <= p <= t:
            raise LemmaContractViolated(f"core position {p} out of range")
        if len({m[p - 1] for m in members}) != 1:
            raise LemmaContractViolated(f"members disagree at core position {p}")
    petal_holders: dict[Var, int] = {}
    for m in members:
        petal_vars = {m[q - 1] for q in range(1, t + 1) if q not in sf.core_positions}
        for v in petal_vars:
            petal_holders[v] = petal_holders.get(v, 0) + 1
    if any(count > 1 for count in petal_holders.values()):
        raise LemmaContractViolated("a variable occurs at petal positions of two members")


def find_sunflower(family: Iterable[Sequence[Var]], k: int) -> Sunflower | None:
    """Search a family of equal-length variable tuples for a (k+1)-sunflower.

    Success is guaranteed whenever the family holds more than k^t (t!)^2
    distinct tuples of length t; below that the search is best-effort. The
    scan order is deterministic: members are considered sorted, and the
    recursion peels off the most frequent (variable, position) pair, ties
    broken by position then variable.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    members = sorted({tuple(m) for m in family}, key=_member_key)
    if not members:
        return None
    t = len(members[0])
    if t == 0:
        raise ValueError("family members must be non-empty tuples")
    if any(len(m) != t for m in members):
        raise ValueError("family members must all have the same length")
    sf = _search_sunflower(members, k)
    if sf is not None:
        _validate_sunflower(sf, k)
    return sf


def _search_sunflower(members: list[tuple[Var, ...]], k: int) -> Sunflower | None:
    t = len(members[0])
    chosen: list[tuple[Var, ...]] = []
    used: set[Var] = set()
    for m in members:
        vs = set(m)
        if not vs & used:
            chosen.append(m)
            used |= vs
            if len(chosen) == k + 1:
                return Sunflower(tuple(chosen), frozenset())
    if t == 1:
        return None
    counts: dict[tuple[Var, int], int] = {}
    for m in members:
        for p, v in enumerate(m, start=1):
            counts[(v, p)] = counts.get((v, p), 0) + 1
    candidates = sorted(
        counts.items(), key=lambda item: (-item[1], item[0][1], token_key(item[0][0]))
    )
    for (v, p), count in candidates:
        if count < k + 1:
            break
        sub = sorted(
            (m[: p - 1] + m[p:] for m in members if m[p - 1] == v), key=_member_key
        )
        inner = _search_sunflower(sub, k)
        if inner is None:
            continue
        core = frozenset({p} | {q if q < p else q + 1 for q in inner.core_positions})
        lifted = sorted(
            (m[: p - 1] + (v,) + m[p - 1 :] for m in inner.members), key=_member_key
        )
        return Sunflower(tuple(lifted), core)
    return None


# ---------------------------------------------------------------------------
# constraint-group reduction


def _require_normalized(formula: Formula) -> None:
    for c in formula.constraints:
        if ZERO in c.args or len(set(c.args)) != len(c.args):
            raise ValueError(
                f"expected a normalized formula; {c} has repeated or placeholder arguments"
            )


def _nonzero_positions(cache: dict[str, tuple[int, ...]], rel: Relation) -> tuple[int, ...]:
    got = cache.get(rel.name)
    if got is None:
        got = tuple(sorted(frozenset(rel.positions()) - zero_closed_positions(rel)))
        cache[rel.name] = got
    return got


def core_tuple_sets(formula: Formula) -> dict[str, set[tuple[Var, ...]]]:
    """Distinct argument projections onto non-zero-closed positions, per
    non-zero-valid relation appearing in the formula."""
    cache: dict[str, tuple[int, ...]] = {}
    sets: dict[str, set[tuple[Var, ...]]] = {}
    for c in formula.constraints:
        rel = formula.language.get(c.relation)
        if (0,) * rel.arity in rel:
            continue
        keep = _nonzero_positions(cache, rel)
        sets.setdefault(rel.name, set()).add(tuple(c.args[p - 1] for p in keep))
    return sets


def reduction_threshold(k: int, d: int) -> int:
    return (k**d) * math.factorial(d) ** 2


@dataclass(frozen=True)
class ReduceResult:
    formula: Formula
    iterations: int
    measure_trajectory: tuple[int, ...]
    unsat: bool
    unsat_relation: str | None


def reduce_formula(formula: Formula, k: int, arity_bound: int | None = None) -> ReduceResult:
    """Shrink constraint groups until every non-zero-valid relation carries
    at most k^d (d!)^2 distinct argument projections.

    Each round finds a (k+1)-sunflower among one relation's projections and
    replaces the matching constraints by the zero-closure of the sunflower
    restriction plus petal implications; the total projection count drops
    every round, which is asserted. When a restriction comes out empty the
    formula has no solution of weight at most k, reported via the unsat
    flag with the formula left as it stood.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    _require_normalized(formula)
    language = formula.language.copy()
    constraints = list(formula.constraints)
    d = arity_bound if arity_bound is not None else language.max_arity()
    threshold = reduction_threshold(k, d)
    position_cache: dict[str, tuple[int, ...]] = {}
    iterations = 0

    def current() -> tuple[Formula, dict[str, set[tuple[Var, ...]]]]:
        f = Formula(language, tuple(constraints), formula.universe)
        return f, core_tuple_sets(f)

    working, sets = current()
    trajectory = [sum(len(s) for s in sets.values())]
    while True:
        target = next(
            (
                rel
                for rel in language
                if rel.name in sets and len(sets[rel.name]) > threshold
            ),
            None,
        )
        if target is None:
            break
        keep = _nonzero_positions(position_cache, target)
        sf = find_sunflower(sets[target.name], k)
        if sf is None:
            raise LemmaContractViolated(
                f"no sunflower in {len(sets[target.name])} projections of {target.name}"
            )
        core = {keep[q - 1] for q in sf.core_positions}
        try:
            closed, implications = implement_sunflower_restriction(target, core)
        except EmptyRelation:
            return ReduceResult(working, iterations, tuple(trajectory), True, target.name)
        closed = language.add(closed)
        if implications:
            language.add(implication_relation())
        members = set(sf.members)
        rewritten: list[Constraint] = []
        for c in constraints:
            if c.relation == target.name and tuple(c.args[p - 1] for p in keep) in members:
                rewritten.append(Constraint(closed.name, c.args))
                rewritten.extend(
                    Constraint("_impl", (c.args[i - 1], c.args[j - 1]))
                    for i, j in implications
                )
            else:
                rewritten.append(c)
        constraints = rewritten
        iterations += 1
        working, sets = current()
        measure = sum(len(s) for s in sets.values())
        if measure >= trajectory[-1]:
            raise LemmaContractViolated(
                f"projection count did not decrease: {trajectory[-1]} -> {measure}"
            )
        trajectory.append(measure)
    return ReduceResult(working, iterations, tuple(trajectory), False, None)


# ---------------------------------------------------------------------------
# the kernelization pipeline


def size_bound(k: int, d: int, nonzero_valid_relations: int) -> int:
    """Guaranteed ceiling on the number of variables occurring in the kernel."""
    base = nonzero_valid_relations * d * math.factorial(d) ** 2
    return base * k ** (d + 1) + base * k**d + k + 1


@dataclass(frozen=True)
class KernelResult:
    """Outcome of kernelize: an equivalent instance over the input language.

    variable_count is the number of variables occurring in constraints (the
    quantity the size bound covers); the universe may additionally retain
    isolated variables from the input, which no minimal solution ever sets.
    """

    formula: Formula
    k: int
    bound: int
    variable_count: int
    universe_size: int
    shortcut: str | None
    reduce_iterations: int
    measure_trajectory: tuple[int, ...]
    forced_zero: tuple[Var, ...]


def _check_language_mergeable(language: ConstraintLanguage) -> None:
    for rel in language:
        ok, witness = is_mergeable(rel)
        if not ok:
            raise NotMergeableLanguage(
                f"relation {rel.name} is not mergeable; witness "
                f"{witness.alpha}/{witness.beta}/{witness.gamma}/{witness.delta}"
            )


def _zero_valid(rel: Relation) -> bool:
    return (0,) * rel.arity in rel


def _replace_zero_valid_constraints(fp: Formula) -> Formula:
    language = fp.language.copy()
    cache: dict[str, object] = {}
    out: list[Constraint] = []
    for c in fp.constraints:
        rel = language.get(c.relation)
        if not _zero_valid(rel):
            out.append(c)
            continue
        ci = cache.get(rel.name)
        if ci is None:
            ci = implement_zero_valid_ihsb(rel)
            cache[rel.name] = ci
        for clause in ci.negative_clauses:
            width = len(clause)
            language.add(negative_clause_relation(width))
            out.append(Constraint(f"_neg{width}", tuple(c.args[p - 1] for p in clause)))
        if ci.implications:
            language.add(implication_relation())
        out.extend(
            Constraint("_impl", (c.args[i - 1], c.args[j - 1]))
            for i, j in ci.implications
        )
    return Formula(language, tuple(out), fp.universe)


def _implication_edges(fp: Formula) -> dict[Var, set[Var]]:
    edges: dict[Var, set[Var]] = {}
    for c in fp.constraints:
        rel = fp.language.get(c.relation)
        if rel.arity == 2 and set(rel.tuples) == _IMPLICATION_TUPLES:
            a, b = c.args
            if a != ZERO and b != ZERO:
                edges.setdefault(a, set()).add(b)
    return edges


def _reachable(edges: dict[Var, set[Var]], start: Var) -> set[Var]:
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in edges.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _demanding_variables(fp: Formula, cache: dict[str, tuple[int, ...]]) -> set[Var]:
    """Variables at non-zero-closed positions of non-zero-valid constraints."""
    out: set[Var] = set()
    for c in fp.constraints:
        rel = fp.language.get(c.relation)
        if _zero_valid(rel):
            continue
        for p in _nonzero_positions(cache, rel):
            if c.args[p - 1] != ZERO:
                out.add(c.args[p - 1])
    return out


def _canonical_result(
    formula: Formula, k: int, d: int, nzv: int, shortcut: str
) -> KernelResult:
    bound = size_bound(k, d, nzv)
    count = len(formula.variables())
    if count > bound:
        raise BoundViolated(f"{count} variables exceed the bound {bound}")
    return KernelResult(
        formula, k, bound, count, len(formula.universe), shortcut, 0, (), ()
    )


def kernelize(formula: Formula, k: int) -> KernelResult:
    """Compress an instance over a mergeable language to O(k^(d+1)) variables.

    The result is an instance over the same language with the same budget k,
    having a solution of weight at most k exactly when the input does.
    Raises NotMergeableLanguage when some relation of the language is not
    mergeable, and BoundViolated if the emitted instance ever exceeded the
    advertised size bound (which indicates a bug, not bad input).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    language = formula.language
    _check_language_mergeable(language)
    d = language.max_arity()

    if k == 0:
        if formula.satisfied_by(frozenset()):
            empty = Formula(language, (), frozenset())
            return _canonical_result(empty, k, d, 0, "trivial-sat")
        offender = next(
            c
            for c in formula.constraints
            if tuple(0 for _ in c.args) not in language.get(c.relation)
        )
        rel = language.get(offender.relation)
        kernel = Formula(language, (Constraint(rel.name, (1,) * rel.arity),))
        return _canonical_result(kernel, k, d, 1, "trivial-unsat")

    # step 1: normalize argument patterns
    try:
        fp = normalize_formula(formula)
    except UnsatisfiableConstraint as exc:
        kernel = Formula(language, (exc.constraint,))
        return _canonical_result(kernel, k, d, 1, "unsat-constraint")

    # step 2: sunflower reduction of constraint groups
    rr = reduce_formula(fp, k, arity_bound=d)
    if rr.unsat:
        base = next(rel for rel in language if not _zero_valid(rel))
        copies = tuple(
            Constraint(
                base.name,
                tuple(range(i * base.arity + 1, (i + 1) * base.arity + 1)),
            )
            for i in range(k + 1)
        )
        result = _canonical_result(Formula(language, copies), k, d, 1, "unsat-budget")
        return KernelResult(
            result.formula,
            k,
            result.bound,
            result.variable_count,
            result.universe_size,
            "unsat-budget",
            rr.iterations,
            rr.measure_trajectory,
            (),
        )
    fp = rr.formula

    # step 3: zero-valid constraints become negative clauses and implications
    fp = _replace_zero_valid_constraints(fp)

    f = formula
    position_cache: dict[str, tuple[int, ...]] = {}
    forced: list[Var] = []

    # step 4: variables whose every occurrence sits at a zero-closed position
    occurrences: dict[Var, list[tuple[str, int]]] = {}
    for c in fp.constraints:
        for p, a in enumerate(c.args, start=1):
            if a != ZERO:
                occurrences.setdefault(a, []).append((c.relation, p))
    zero_positions = {
        name: zero_closed_positions(fp.language.get(name))
        for name in {c.relation for c in fp.constraints}
    }
    removable = {
        v
        for v in f.variables()
        if all(p in zero_positions[name] for name, p in occurrences.get(v, ()))
    }
    if removable:
        f = substitute_zero(f, removable)
        fp = substitute_zero(fp, removable)
        forced.extend(removable)

    # step 5: variables implying at least k distinct others
    edges = _implication_edges(fp)
    demanding = _demanding_variables(fp, position_cache)
    heavy = {
        x for x in demanding if len(_reachable(edges, x) - {x}) >= k
    }
    if heavy:
        f = substitute_zero(f, heavy)
        fp = substitute_zero(fp, heavy)
        forced.extend(heavy)

    # step 6: variables neither demanded nor implied by a demanded variable
    edges = _implication_edges(fp)
    demanding = _demanding_variables(fp, position_cache)
    keep: set[Var] = set()
    for x in demanding:
        keep |= _reachable(edges, x)
    idle = fp.variables() - keep
    if idle:
        f = substitute_zero(f, idle)
        fp = substitute_zero(fp, idle)
        forced.extend(idle)

    # step 7: placeholders become k+1 fresh variables
    f = eliminate_zero_constants(f, k)

    # step 8: size accounting
    nzv = len(
        {
            c.relation
            for c in fp.constraints
            if not _zero_valid(fp.language.get(c.relation))
        }
    )
    bound = size_bound(k, d, nzv)
    count = len(f.variables())
    if count > bound:
        raise BoundViolated(f"{count} variables exceed the bound {bound}")
    return KernelResult(
        f,
        k,
        bound,
        count,
        len(f.universe),
        None,
        rr.iterations,
        rr.measure_trajectory,
        tuple(sorted(forced, key=token_key)),
    )
