"""Independent reference implementations used to validate the package.

Everything here is written straight from the definitions in the most naive
formulation available and deliberately shares no logic with the package
beyond the Relation container. Where the package uses bit masks and pruned
scans, these loop over tuples; where the package decides a property by
constructing a witness object, these just answer yes or no.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from minones.relations import Relation


def t_and(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x & y for x, y in zip(a, b))


def t_or(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    return tuple(x | y for x, y in zip(a, b))


def t_leq(a: Sequence[int], b: Sequence[int]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def oracle_zero_valid(rel: Relation) -> bool:
    return (0,) * rel.arity in set(rel.tuples)


def oracle_one_valid(rel: Relation) -> bool:
    return (1,) * rel.arity in set(rel.tuples)


def oracle_horn(rel: Relation) -> bool:
    ts = set(rel.tuples)
    return all(t_and(a, b) in ts for a in ts for b in ts)


def oracle_dual_horn(rel: Relation) -> bool:
    ts = set(rel.tuples)
    return all(t_or(a, b) in ts for a in ts for b in ts)


def oracle_ihsb_minus(rel: Relation) -> bool:
    ts = set(rel.tuples)
    return all(
        t_and(a, t_or(b, c)) in ts
        for a in ts
        for b in ts
        for c in ts
    )


def oracle_width2_affine(rel: Relation) -> bool:
    """Closure under both majority and three-way xor.

    Relations expressible by constants, equalities and disequalities are
    exactly those closed under both operations (the bijunctive and affine
    closure conditions together).
    """
    ts = set(rel.tuples)
    for a, b, c in itertools.product(ts, repeat=3):
        maj = tuple((x & y) | (x & z) | (y & z) for x, y, z in zip(a, b, c))
        xor = tuple(x ^ y ^ z for x, y, z in zip(a, b, c))
        if maj not in ts or xor not in ts:
            return False
    return True


ORACLE_CHECKS = {
    "zero_valid": oracle_zero_valid,
    "one_valid": oracle_one_valid,
    "horn": oracle_horn,
    "dual_horn": oracle_dual_horn,
    "ihsb_minus": oracle_ihsb_minus,
    "width2_affine": oracle_width2_affine,
}


def merge_applies(a, b, c, d) -> bool:
    return t_leq(t_and(a, d), b) and t_leq(b, a) and t_leq(t_and(b, c), d) and t_leq(d, c)


def merge_violations(rel: Relation) -> list[tuple]:
    """Every quadruple where the merge operation applies but its result is
    missing, as (alpha, beta, gamma, delta, produced), full quadruple scan."""
    ts = list(rel.tuples)
    member = set(ts)
    out = []
    for a in ts:
        for b in ts:
            for c in ts:
                for d in ts:
                    if merge_applies(a, b, c, d):
                        produced = t_and(a, t_or(b, c))
                        if produced not in member:
                            out.append((a, b, c, d, produced))
    return out


def oracle_mergeable(rel: Relation) -> bool:
    return not merge_violations(rel)


def descending_first_violation(rel: Relation):
    """The violation a nested descending-lexicographic scan meets first.

    Mirrors the documented witness order of the package scan but written as
    the plain quadruple loop.
    """
    ts = sorted(rel.tuples, reverse=True)
    member = set(ts)
    for a in ts:
        for b in ts:
            for c in ts:
                for d in ts:
                    if merge_applies(a, b, c, d):
                        produced = t_and(a, t_or(b, c))
                        if produced not in member:
                            return (a, b, c, d, produced)
    return None


def oracle_zero_closed_positions(rel: Relation) -> set[int]:
    ts = set(rel.tuples)
    out = set()
    for i in range(1, rel.arity + 1):
        if all(t[: i - 1] + (0,) + t[i:] in ts for t in ts):
            out.add(i)
    return out


def oracle_zero_closure(rel: Relation, positions: Iterable[int]) -> set[tuple[int, ...]]:
    positions = sorted(set(positions))
    closed = set(rel.tuples)
    changed = True
    while changed:
        changed = False
        for t in list(closed):
            for p in positions:
                flipped = t[: p - 1] + (0,) + t[p:]
                if flipped not in closed:
                    closed.add(flipped)
                    changed = True
    return closed


def oracle_sunflower_restriction(rel: Relation, core: Iterable[int]) -> set[tuple[int, ...]]:
    core = set(core)
    ts = set(rel.tuples)
    out = set()
    for t in ts:
        zeroed = tuple(v if i in core else 0 for i, v in enumerate(t, start=1))
        if zeroed in ts:
            out.add(t)
    return out


def random_relation(rng, arity: int, min_size: int = 1) -> Relation:
    """A uniformly-random nonempty relation of the given arity."""
    universe = list(itertools.product((0, 1), repeat=arity))
    size = rng.randint(min_size, len(universe))
    tuples = rng.sample(universe, size)
    return Relation(f"RND{arity}", arity, tuples)


def random_mergeable_relation(rng, arity: int) -> Relation:
    """Close a random seed set under the merge operation.

    Termination is guaranteed because each round only adds tuples and the
    space is finite.
    """
    universe = list(itertools.product((0, 1), repeat=arity))
    seed = rng.sample(universe, rng.randint(1, min(4, len(universe))))
    ts = set(seed)
    changed = True
    while changed:
        changed = False
        for a, b, c, d in itertools.product(list(ts), repeat=4):
            if merge_applies(a, b, c, d):
                produced = t_and(a, t_or(b, c))
                if produced not in ts:
                    ts.add(produced)
                    changed = True
                    break
    return Relation(f"MRG{arity}", arity, ts)


def all_nonempty_relations(arity: int):
    """Every nonempty relation of exactly this arity, as tuple-sets."""
    universe = list(itertools.product((0, 1), repeat=arity))
    for bits in range(1, 1 << len(universe)):
        yield [t for i, t in enumerate(universe) if bits >> i & 1]


def oracle_min_weight(formula, k: int | None = None):
    """Minimum weight of a satisfying true set, scanning the whole power set
    (smallest sets first); None when nothing of weight <= k satisfies."""
    from minones.formulas import token_key

    universe = sorted(formula.universe, key=token_key)
    kmax = len(universe) if k is None else min(k, len(universe))
    for size in range(kmax + 1):
        for T in itertools.combinations(universe, size):
            if formula.satisfied_by(T):
                return size
    return None
