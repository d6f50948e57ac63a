"""Finite Boolean relations and the structural operations on them.

A relation is a non-empty set of equal-length 0/1 tuples. Positions are
1-based throughout the public API. Internally each tuple is also kept as an
integer mask with position 1 at the most significant bit, so integer order
coincides with lexicographic order on tuples and the componentwise
meet/join/leq are single bit operations.

The central notion is the merge operation: for tuples alpha, beta, gamma,
delta in R, the operation applies when

    alpha AND delta <= beta <= alpha   and   beta AND gamma <= delta <= gamma

and it produces alpha AND (beta OR gamma). A relation is *mergeable* when
every applicable quadruple produces a tuple that is again in the relation.
Mergeability is what separates languages with polynomial kernels from those
without (once the language is NP-complete), so most of this module exists to
decide it, to certify failures with a replayable witness, and to build the
derived relations the kernelizer and the lower-bound gadgets need.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    ArityMismatch,
    EmptyRelation,
    LemmaContractViolated,
    NotIHSBMinus,
)

DEFAULT_MAX_ARITY = 10

PROPERTY_NAMES = (
    "zero_valid",
    "one_valid",
    "horn",
    "dual_horn",
    "ihsb_minus",
    "width2_affine",
)


def max_arity() -> int:
    """Arity cap for relation construction; MINONES_MAX_ARITY overrides it."""
    raw = os.environ.get("MINONES_MAX_ARITY")
    if raw is None:
        return DEFAULT_MAX_ARITY
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"MINONES_MAX_ARITY must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"MINONES_MAX_ARITY must be positive, got {value}")
    return value


# ---------------------------------------------------------------------------
# tuple algebra


def _check_same_length(a: Sequence[int], b: Sequence[int]) -> None:
    if len(a) != len(b):
        raise ArityMismatch(f"tuple lengths differ: {len(a)} vs {len(b)}")


def tuple_and(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Componentwise meet."""
    _check_same_length(a, b)
    return tuple(x & y for x, y in zip(a, b))


def tuple_or(a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
    """Componentwise join."""
    _check_same_length(a, b)
    return tuple(x | y for x, y in zip(a, b))


def tuple_leq(a: Sequence[int], b: Sequence[int]) -> bool:
    """Componentwise order: a <= b."""
    _check_same_length(a, b)
    return all(x <= y for x, y in zip(a, b))


def tuple_to_mask(t: Sequence[int]) -> int:
    mask = 0
    for bit in t:
        mask = (mask << 1) | bit
    return mask


def mask_to_tuple(mask: int, arity: int) -> tuple[int, ...]:
    return tuple((mask >> (arity - i)) & 1 for i in range(1, arity + 1))


def all_tuples(arity: int) -> Iterator[tuple[int, ...]]:
    """All 0/1 tuples of the given arity in ascending lexicographic order."""
    return itertools.product((0, 1), repeat=arity)


# ---------------------------------------------------------------------------
# relations


class Relation:
    """An immutable, non-empty Boolean relation with a display name.

    Equality and hashing ignore the name: two relations are equal when they
    have the same arity and the same tuple set. Arity 0 is permitted only for
    the always-true marker {()}, which the non-zero-closed core of an
    all-zero-closed relation degenerates to.
    """

    __slots__ = ("name", "arity", "tuples", "_mask_set", "_masks_desc")

    def __init__(self, name: str, arity: int, tuples: Iterable[Sequence[int]]):
        tups = {tuple(t) for t in tuples}
        if not tups:
            raise EmptyRelation(f"relation {name!r} has no tuples")
        if arity == 0:
            if tups != {()}:
                raise ValueError("arity 0 is reserved for the true marker {()}")
        elif not 1 <= arity <= max_arity():
            raise ValueError(f"arity {arity} outside 1..{max_arity()}")
        for t in tups:
            if len(t) != arity:
                raise ArityMismatch(f"tuple {t} has length {len(t)}, expected {arity}")
            if any(b not in (0, 1) for b in t):
                raise ValueError(f"tuple {t} has a non-Boolean entry")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "tuples", tuple(sorted(tups)))
        object.__setattr__(self, "_mask_set", frozenset(map(tuple_to_mask, tups)))
        object.__setattr__(
            self, "_masks_desc", tuple(sorted(self._mask_set, reverse=True))
        )

    def __setattr__(self, *_):
        raise AttributeError("Relation is immutable")

    @classmethod
    def from_strings(cls, name: str, rows: Iterable[str]) -> "Relation":
        """Build from bitstring rows such as ["01", "10", "11"]."""
        rows = list(rows)
        if not rows:
            raise EmptyRelation(f"relation {name!r} has no tuples")
        arity = len(rows[0])
        return cls(name, arity, [tuple(int(c) for c in row) for row in rows])

    def strings(self) -> list[str]:
        return ["".join(map(str, t)) for t in self.tuples]

    def __contains__(self, t: Sequence[int]) -> bool:
        t = tuple(t)
        return len(t) == self.arity and tuple_to_mask(t) in self._mask_set

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.arity == other.arity and self._mask_set == other._mask_set

    def __hash__(self) -> int:
        return hash((self.arity, self._mask_set))

    def __repr__(self) -> str:
        return f"Relation({self.name!r}, {self.arity}, {{{', '.join(self.strings())}}})"

    def renamed(self, name: str) -> "Relation":
        return Relation(name, self.arity, self.tuples)

    def positions(self) -> range:
        return range(1, self.arity + 1)

    def _bit(self, position: int) -> int:
        if not 1 <= position <= self.arity:
            raise ValueError(f"position {position} outside 1..{self.arity}")
        return 1 << (self.arity - position)


def true_marker(name: str = "TRUE") -> Relation:
    """The 0-ary always-true relation."""
    return Relation(name, 0, [()])


def implication_relation(name: str = "_impl") -> Relation:
    """Binary implication: first position forces the second."""
    return Relation(name, 2, [(0, 0), (0, 1), (1, 1)])


def negative_clause_relation(width: int, name: str | None = None) -> Relation:
    """NOT(x1 AND ... AND xw): everything except the all-ones tuple."""
    if width < 1:
        raise ValueError("clause width must be positive")
    tuples = [t for t in all_tuples(width) if any(b == 0 for b in t)]
    return Relation(name or f"_neg{width}", width, tuples)


# ---------------------------------------------------------------------------
# closure-style property checks


def _is_zero_valid(rel: Relation) -> bool:
    return 0 in rel._mask_set


def _is_one_valid(rel: Relation) -> bool:
    return ((1 << rel.arity) - 1) in rel._mask_set


def _is_horn(rel: Relation) -> bool:
    masks = rel._masks_desc
    member = rel._mask_set
    for i, a in enumerate(masks):
        for b in masks[i:]:
            if a & b not in member:
                return False
    return True


def _is_dual_horn(rel: Relation) -> bool:
    masks = rel._masks_desc
    member = rel._mask_set
    for i, a in enumerate(masks):
        for b in masks[i:]:
            if a | b not in member:
                return False
    return True


def _is_ihsb_minus(rel: Relation) -> bool:
    # closed under a AND (b OR c) for all member triples
    masks = rel._masks_desc
    member = rel._mask_set
    joins = {b | c for i, b in enumerate(masks) for c in masks[i:]}
    return all(a & j in member for a in masks for j in joins)


def _valid_binary_atoms(rel: Relation):
    """All unary assignments and binary (dis)equalities every tuple satisfies."""
    unary: list[tuple[int, int]] = []  # (position, value)
    equal: list[tuple[int, int]] = []
    unequal: list[tuple[int, int]] = []
    cols = list(zip(*rel.tuples))
    for i in rel.positions():
        col = cols[i - 1]
        if all(v == 0 for v in col):
            unary.append((i, 0))
        if all(v == 1 for v in col):
            unary.append((i, 1))
    for i, j in itertools.combinations(rel.positions(), 2):
        ci, cj = cols[i - 1], cols[j - 1]
        if all(x == y for x, y in zip(ci, cj)):
            equal.append((i, j))
        if all(x != y for x, y in zip(ci, cj)):
            unequal.append((i, j))
    return unary, equal, unequal


def _is_width2_affine(rel: Relation) -> bool:
    """Decide expressibility by constants, equalities and disequalities.

    The conjunction of every valid unary assignment, equality and
    disequality is the least such definable relation containing R, so R is
    width-2 affine exactly when that conjunction adds no tuples.
    """
    unary, equal, unequal = _valid_binary_atoms(rel)
    satisfied = set()
    for t in all_tuples(rel.arity):
        if any(t[i - 1] != v for i, v in unary):
            continue
        if any(t[i - 1] != t[j - 1] for i, j in equal):
            continue
        if any(t[i - 1] == t[j - 1] for i, j in unequal):
            continue
        satisfied.add(t)
    return satisfied == set(rel.tuples)


_PROPERTY_CHECKS = {
    "zero_valid": _is_zero_valid,
    "one_valid": _is_one_valid,
    "horn": _is_horn,
    "dual_horn": _is_dual_horn,
    "ihsb_minus": _is_ihsb_minus,
    "width2_affine": _is_width2_affine,
}


def check_property(rel: Relation, prop: str) -> bool:
    """Check one of the named closure/validity properties."""
    try:
        return _PROPERTY_CHECKS[prop](rel)
    except KeyError:
        raise ValueError(f"unknown property {prop!r}; expected one of {PROPERTY_NAMES}")


# ---------------------------------------------------------------------------
# mergeability


@dataclass(frozen=True)
class MergeWitness:
    """A quadruple showing a relation is not mergeable.

    The merge operation applies to (alpha, beta, gamma, delta) but the
    produced tuple is missing from the relation. core_positions collects the
    positions where beta or delta is 1; there beta agrees with alpha and
    delta agrees with gamma, while both are zero on the petal positions.
    """

    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    gamma: tuple[int, ...]
    delta: tuple[int, ...]
    produced: tuple[int, ...]
    core_positions: frozenset[int]
    petal_positions: frozenset[int]

    def applies(self) -> bool:
        return (
            tuple_leq(tuple_and(self.alpha, self.delta), self.beta)
            and tuple_leq(self.beta, self.alpha)
            and tuple_leq(tuple_and(self.beta, self.gamma), self.delta)
            and tuple_leq(self.delta, self.gamma)
        )

    def verify(self, rel: Relation) -> bool:
        """Replay the witness against the definition."""
        quad = (self.alpha, self.beta, self.gamma, self.delta)
        if any(t not in rel for t in quad):
            return False
        if not self.applies():
            return False
        if self.produced != tuple_and(self.alpha, tuple_or(self.beta, self.gamma)):
            return False
        return self.produced not in rel

    def position_kind(self, i: int) -> str:
        """Classify position i by its (alpha, beta, gamma, delta) column."""
        col = (self.alpha[i - 1], self.beta[i - 1], self.gamma[i - 1], self.delta[i - 1])
        return {
            (1, 1, 1, 1): "Z1",
            (0, 0, 0, 0): "Z0",
            (1, 1, 0, 0): "C10",
            (0, 0, 1, 1): "C01",
            (1, 0, 1, 0): "P11",
            (1, 0, 0, 0): "P10",
            (0, 0, 1, 0): "P01",
        }[col]


def _make_witness(rel: Relation, a: int, b: int, c: int, d: int) -> MergeWitness:
    arity = rel.arity
    alpha, beta = mask_to_tuple(a, arity), mask_to_tuple(b, arity)
    gamma, delta = mask_to_tuple(c, arity), mask_to_tuple(d, arity)
    produced = mask_to_tuple(a & (b | c), arity)
    core = frozenset(i for i in rel.positions() if beta[i - 1] or delta[i - 1])
    petals = frozenset(rel.positions()) - core
    witness = MergeWitness(alpha, beta, gamma, delta, produced, core, petals)
    # core/petal shape is forced by the applicability inequalities
    for i in core:
        assert beta[i - 1] == alpha[i - 1] and delta[i - 1] == gamma[i - 1]
    for i in petals:
        assert beta[i - 1] == 0 and delta[i - 1] == 0
    assert witness.verify(rel)
    return witness


def merge_witness(rel: Relation) -> MergeWitness | None:
    """First failing merge quadruple, scanning tuples in descending
    lexicographic order; None when the relation is mergeable."""
    masks = rel._masks_desc
    member = rel._mask_set
    for a in masks:
        for b in masks:
            if b & ~a:  # need beta <= alpha
                continue
            for c in masks:
                produced = a & (b | c)
                if produced in member:
                    continue
                # the produced tuple is missing; the quadruple violates
                # mergeability iff some delta makes the operation apply
                bc = b & c
                for d in masks:
                    if d & ~c or bc & ~d or (a & d) & ~b:
                        continue
                    return _make_witness(rel, a, b, c, d)
    return None


def is_mergeable(rel: Relation) -> tuple[bool, MergeWitness | None]:
    witness = merge_witness(rel)
    return (witness is None, witness)


@dataclass(frozen=True)
class PropertyRecord:
    """All structural flags of one relation, plus a witness when not mergeable."""

    name: str
    zero_valid: bool
    one_valid: bool
    horn: bool
    dual_horn: bool
    ihsb_minus: bool
    width2_affine: bool
    mergeable: bool
    witness: MergeWitness | None

    def flag(self, prop: str) -> bool:
        return getattr(self, prop)


def analyze(rel: Relation) -> PropertyRecord:
    mergeable, witness = is_mergeable(rel)
    return PropertyRecord(
        name=rel.name,
        zero_valid=_is_zero_valid(rel),
        one_valid=_is_one_valid(rel),
        horn=_is_horn(rel),
        dual_horn=_is_dual_horn(rel),
        ihsb_minus=_is_ihsb_minus(rel),
        width2_affine=_is_width2_affine(rel),
        mergeable=mergeable,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# zero-closure machinery


def zero_closed_positions(rel: Relation) -> frozenset[int]:
    """Positions where flipping any tuple's entry to 0 stays inside R."""
    member = rel._mask_set
    closed = []
    for i in rel.positions():
        bit = rel._bit(i)
        if all(m & ~bit in member for m in member):
            closed.append(i)
    return frozenset(closed)


def zero_closure(rel: Relation, positions: Iterable[int], name: str | None = None) -> Relation:
    """Least superset of R closed under zeroing entries at the given positions."""
    bits = [rel._bit(p) for p in sorted(set(positions))]
    masks = set(rel._mask_set)
    frontier = list(masks)
    while frontier:
        m = frontier.pop()
        for bit in bits:
            flipped = m & ~bit
            if flipped not in masks:
                masks.add(flipped)
                frontier.append(flipped)
    out_name = name or f"{rel.name}~z"
    return Relation(out_name, rel.arity, [mask_to_tuple(m, rel.arity) for m in masks])


def nonzero_core(rel: Relation, name: str | None = None) -> tuple[Relation, dict[int, int]]:
    """Projection onto the non-zero-closed positions, with a position map.

    The map sends each position of the core relation to the original
    position it came from. A relation all of whose positions are zero-closed
    degenerates to the 0-ary true marker with an empty map.
    """
    keep = sorted(frozenset(rel.positions()) - zero_closed_positions(rel))
    out_name = name or f"{rel.name}.core"
    if not keep:
        return true_marker(out_name), {}
    projected = {tuple(t[p - 1] for p in keep) for t in rel.tuples}
    mapping = {new: old for new, old in enumerate(keep, start=1)}
    return Relation(out_name, len(keep), projected), mapping


def sunflower_restriction(rel: Relation, core: Iterable[int], name: str | None = None) -> Relation:
    """Tuples of R that stay in R when zeroed outside the core positions.

    Raises EmptyRelation when no tuple survives (for a non-zero-valid
    relation with an empty core this is the typical outcome, and it means
    any k+1 petal-disjoint constraints over R are jointly unsatisfiable
    within the weight budget).
    """
    core = frozenset(core)
    for p in core:
        rel._bit(p)  # validates range
    keep_mask = 0
    for p in core:
        keep_mask |= rel._bit(p)
    member = rel._mask_set
    kept = [m for m in member if m & keep_mask in member]
    if not kept:
        raise EmptyRelation(
            f"sunflower restriction of {rel.name} at core {sorted(core)} is empty"
        )
    out_name = name or f"{rel.name}|v{'.'.join(map(str, sorted(core)))}"
    return Relation(out_name, rel.arity, [mask_to_tuple(m, rel.arity) for m in kept])


def core_relation(rel: Relation, core: Iterable[int], name: str | None = None) -> Relation:
    """The sunflower restriction collapsed to its core positions."""
    core_sorted = sorted(frozenset(core))
    restricted = sunflower_restriction(rel, core_sorted)
    out_name = name or f"{rel.name}.at{'.'.join(map(str, core_sorted))}"
    if not core_sorted:
        return true_marker(out_name)
    tuples = {tuple(t[p - 1] for p in core_sorted) for t in restricted.tuples}
    return Relation(out_name, len(core_sorted), tuples)


# ---------------------------------------------------------------------------
# identification / assignment


def transform(
    rel: Relation,
    groups: Iterable[Iterable[int]] | None = None,
    assign: Mapping[int, int] | None = None,
    name: str | None = None,
) -> Relation:
    """Identify position groups and/or pin positions to constants.

    Positions not mentioned in any group form singleton classes. The result
    has one position per unassigned class, ordered by least original
    position. Raises EmptyRelation when nothing satisfies the constraints.
    """
    assign = dict(assign or {})
    seen: set[int] = set()
    classes: list[list[int]] = []
    for group in groups or []:
        members = sorted(set(group))
        if not members:
            continue
        for p in members:
            rel._bit(p)
            if p in seen:
                raise ValueError(f"position {p} appears in two groups")
            seen.add(p)
        classes.append(members)
    for p in rel.positions():
        if p not in seen:
            classes.append([p])
    classes.sort(key=lambda c: c[0])
    for p, v in assign.items():
        rel._bit(p)
        if v not in (0, 1):
            raise ValueError(f"assigned value {v!r} for position {p} is not Boolean")

    free_classes = [c for c in classes if not any(p in assign for p in c)]
    out: set[tuple[int, ...]] = set()
    for t in rel.tuples:
        ok = True
        for cls in classes:
            vals = {t[p - 1] for p in cls}
            if len(vals) > 1:
                ok = False
                break
            pinned = {assign[p] for p in cls if p in assign}
            if pinned and pinned != vals:
                ok = False
                break
        if ok:
            out.add(tuple(t[cls[0] - 1] for cls in free_classes))
    if not out:
        raise EmptyRelation(f"transform of {rel.name} is empty")
    out_name = name or f"{rel.name}'"
    return Relation(out_name, len(free_classes), out)


# ---------------------------------------------------------------------------
# clause/implication implementations


@dataclass(frozen=True)
class ClauseImplementation:
    """A conjunction of negative clauses, implications and assignments that
    pins down a relation position-for-position."""

    arity: int
    negative_clauses: tuple[tuple[int, ...], ...]  # positions, sorted
    implications: tuple[tuple[int, int], ...]  # (from, to)
    assignments: tuple[tuple[int, int], ...]  # (position, value)

    def satisfied_by(self, t: Sequence[int]) -> bool:
        if len(t) != self.arity:
            raise ArityMismatch(f"tuple length {len(t)}, expected {self.arity}")
        for clause in self.negative_clauses:
            if all(t[p - 1] == 1 for p in clause):
                return False
        for i, j in self.implications:
            if t[i - 1] == 1 and t[j - 1] == 0:
                return False
        for p, v in self.assignments:
            if t[p - 1] != v:
                return False
        return True

    def to_relation(self, name: str = "clauseimpl") -> Relation:
        tuples = [t for t in all_tuples(self.arity) if self.satisfied_by(t)]
        if not tuples:
            raise EmptyRelation("clause implementation is unsatisfiable")
        return Relation(name, self.arity, tuples)


def _valid_implications(rel: Relation) -> list[tuple[int, int]]:
    cols = list(zip(*rel.tuples))
    out = []
    for i in rel.positions():
        for j in rel.positions():
            if i != j and all(x <= y for x, y in zip(cols[i - 1], cols[j - 1])):
                out.append((i, j))
    return out


def _minimal_negative_clauses(rel: Relation) -> list[tuple[int, ...]]:
    """Inclusion-minimal position sets never simultaneously all-ones in R."""
    minimal: list[tuple[int, ...]] = []
    for size in range(1, rel.arity + 1):
        for combo in itertools.combinations(rel.positions(), size):
            if any(set(m) <= set(combo) for m in minimal):
                continue
            if not any(all(t[p - 1] == 1 for p in combo) for t in rel.tuples):
                minimal.append(combo)
    return minimal


def implement_zero_valid_ihsb(rel: Relation) -> ClauseImplementation:
    """Express a zero-valid mergeable relation by negative clauses and
    implications; raises NotIHSBMinus when the relation cannot be.

    All valid implications plus all minimal valid negative clauses are
    collected and the conjunction is checked against R exhaustively.
    """
    if not _is_zero_valid(rel):
        raise ValueError(f"{rel.name} is not zero-valid")
    impl = ClauseImplementation(
        arity=rel.arity,
        negative_clauses=tuple(_minimal_negative_clauses(rel)),
        implications=tuple(_valid_implications(rel)),
        assignments=(),
    )
    realized = {t for t in all_tuples(rel.arity) if impl.satisfied_by(t)}
    if realized != set(rel.tuples):
        raise NotIHSBMinus(
            f"{rel.name} is not expressible by negative clauses and implications"
        )
    return impl


def implement_sunflower_restriction(
    rel: Relation, core: Iterable[int], name: str | None = None
) -> tuple[Relation, tuple[tuple[int, int], ...]]:
    """Implement the sunflower restriction at the given core as a zero-closed
    relation plus implications between non-core positions.

    Returns (closed, implications); their conjunction is verified to equal
    the restriction exactly and the closed relation is verified mergeable.
    May raise EmptyRelation when the restriction itself is empty.
    """
    core = frozenset(core)
    restricted = sunflower_restriction(rel, core)
    petals = sorted(frozenset(rel.positions()) - core)
    closed = zero_closure(restricted, petals, name=name or f"{rel.name}^{'.'.join(map(str, sorted(core))) or '0'}")
    cols = list(zip(*restricted.tuples))
    implications = tuple(
        (i, j)
        for i in petals
        for j in petals
        if i != j and all(x <= y for x, y in zip(cols[i - 1], cols[j - 1]))
    )
    # exhaustive check of the implementation contract
    realized = {
        t
        for t in closed.tuples
        if all(t[i - 1] <= t[j - 1] for i, j in implications)
    }
    if realized != set(restricted.tuples):
        raise LemmaContractViolated(
            f"zero-closure plus petal implications does not reproduce the "
            f"sunflower restriction of {rel.name} at {sorted(core)}"
        )
    mergeable, _ = is_mergeable(closed)
    if not mergeable:
        raise LemmaContractViolated(
            f"zero-closed replacement for {rel.name} at {sorted(core)} is not mergeable"
        )
    return closed, implications
