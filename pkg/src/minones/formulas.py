"""Constraint languages, formulas and assignment semantics.

A formula is a conjunction of constraints R(v1, ..., vr) over a finite
language of named relations, together with an explicit variable universe
that may contain isolated variables. Variables are positive integers or
strings; the integer 0 is reserved as a placeholder argument that always
reads as the constant false. Assignments are given by their set of true
variables, so the weight of an assignment is the size of that set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import (
    ArityMismatch,
    EmptyRelation,
    UnknownRelation,
    UnsatisfiableConstraint,
)
from .relations import Relation, transform

Var = Union[int, str]

ZERO = 0  # placeholder argument, always false


def token_key(v: Var) -> tuple[int, int | str]:
    """Sort key placing integer variables before string variables."""
    return (0, v) if isinstance(v, int) else (1, v)


class ConstraintLanguage:
    """An ordered collection of relations, addressed by name."""

    def __init__(self, relations: Iterable[Relation] = ()):
        self._by_name: dict[str, Relation] = {}
        for rel in relations:
            self.add(rel)

    def add(self, rel: Relation) -> Relation:
        """Insert a relation; re-adding the same name requires the same tuples."""
        existing = self._by_name.get(rel.name)
        if existing is not None:
            if existing != rel:
                raise ValueError(f"conflicting definitions for relation {rel.name!r}")
            return existing
        self._by_name[rel.name] = rel
        return rel

    def get(self, name: str) -> Relation:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownRelation(f"relation {name!r} is not in the language") from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Relation]:
        return iter(self._by_name.values())

    def __len__(self) -> int:
        return len(self._by_name)

    @property
    def relations(self) -> tuple[Relation, ...]:
        return tuple(self._by_name.values())

    def names(self) -> tuple[str, ...]:
        return tuple(self._by_name)

    def max_arity(self) -> int:
        return max((rel.arity for rel in self if rel.arity > 0), default=0)

    def copy(self) -> "ConstraintLanguage":
        return ConstraintLanguage(self.relations)

    def __repr__(self) -> str:
        return f"ConstraintLanguage({', '.join(self.names())})"


@dataclass(frozen=True)
class Constraint:
    relation: str
    args: tuple[Var, ...]

    def variables(self) -> set[Var]:
        return {a for a in self.args if a != ZERO}

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Formula:
    """A conjunction of constraints plus its variable universe."""

    language: ConstraintLanguage
    constraints: tuple[Constraint, ...]
    universe: frozenset[Var] = field(default_factory=frozenset)

    def __post_init__(self):
        seen: set[Var] = set()
        for c in self.constraints:
            rel = self.language.get(c.relation)
            if len(c.args) != rel.arity:
                raise ArityMismatch(
                    f"{c} has {len(c.args)} arguments, {c.relation} has arity {rel.arity}"
                )
            for a in c.args:
                if a == ZERO:
                    continue
                if isinstance(a, int) and a < 0:
                    raise ValueError(f"negative variable {a} in {c}")
                seen.add(a)
        if not seen <= self.universe:
            object.__setattr__(self, "universe", frozenset(self.universe) | seen)

    def variables(self) -> set[Var]:
        """Variables occurring in constraints (placeholders excluded)."""
        out: set[Var] = set()
        for c in self.constraints:
            out |= c.variables()
        return out

    def isolated_variables(self) -> set[Var]:
        return set(self.universe) - self.variables()

    def satisfied_by(self, true_set: Iterable[Var]) -> bool:
        true_set = set(true_set)
        for c in self.constraints:
            rel = self.language.get(c.relation)
            value = tuple(1 if (a != ZERO and a in true_set) else 0 for a in c.args)
            if value not in rel:
                return False
        return True

    def with_constraints(self, constraints: Iterable[Constraint]) -> "Formula":
        return Formula(self.language, tuple(constraints), self.universe)


def _class_signature(args: Sequence[Var]) -> str:
    """Letters by first occurrence, '0' for placeholders: (x, y, y) -> 'abb'."""
    labels: dict[Var, str] = {}
    out = []
    for a in args:
        if a == ZERO:
            out.append("0")
            continue
        if a not in labels:
            labels[a] = chr(ord("a") + len(labels))
        out.append(labels[a])
    return "".join(out)


def normalize_constraint(
    language: ConstraintLanguage, constraint: Constraint
) -> Constraint | None:
    """Rewrite a constraint so its arguments are distinct real variables.

    Repeated arguments are identified, placeholder arguments are pinned to
    zero, and the derived relation joins the language under a name keyed by
    the argument pattern. Returns None when the rewritten constraint is
    trivially true, raises UnsatisfiableConstraint when no assignment can
    satisfy the original constraint.
    """
    rel = language.get(constraint.relation)
    sig = _class_signature(constraint.args)
    if sig == "".join(chr(ord("a") + i) for i in range(len(constraint.args))):
        return constraint  # already distinct real variables
    groups: dict[Var, list[int]] = {}
    assign: dict[int, int] = {}
    for pos, a in enumerate(constraint.args, start=1):
        if a == ZERO:
            assign[pos] = 0
        else:
            groups.setdefault(a, []).append(pos)
    try:
        derived = transform(
            rel,
            groups=[g for g in groups.values() if len(g) > 1],
            assign=assign,
            name=f"{rel.name}|{sig}",
        )
    except EmptyRelation:
        raise UnsatisfiableConstraint(constraint) from None
    if derived.arity == 0:
        return None
    new_args = []
    seen: set[Var] = set()
    for a in constraint.args:
        if a != ZERO and a not in seen:
            seen.add(a)
            new_args.append(a)
    language.add(derived)
    return Constraint(derived.name, tuple(new_args))


def normalize_formula(formula: Formula) -> Formula:
    """Rewrite every constraint to have distinct real arguments.

    The satisfying assignments over the universe are preserved exactly; the
    universe itself is unchanged. The returned formula's language is a copy
    of the input language extended with the derived relations.
    """
    language = formula.language.copy()
    out: list[Constraint] = []
    for c in formula.constraints:
        rewritten = normalize_constraint(language, c)
        if rewritten is not None:
            out.append(rewritten)
    return Formula(language, tuple(out), formula.universe)


def substitute_zero(formula: Formula, variables: Iterable[Var]) -> Formula:
    """Replace every occurrence of the given variables by the placeholder.

    The variables leave the universe as well; constraints and relation set
    are otherwise untouched (arguments may now repeat or be placeholders, so
    callers usually renormalize afterwards).
    """
    drop = set(variables)
    if not drop:
        return formula
    constraints = tuple(
        Constraint(c.relation, tuple(ZERO if a in drop else a for a in c.args))
        for c in formula.constraints
    )
    return Formula(formula.language, constraints, frozenset(formula.universe) - drop)


def eliminate_zero_constants(formula: Formula, k: int) -> Formula:
    """Remove placeholder arguments by cloning onto k+1 fresh variables.

    Each constraint mentioning the placeholder becomes k+1 copies, copy i
    using fresh variable z_i at every placeholder position. Any assignment
    of weight at most k leaves some z_i false, so that copy behaves exactly
    like the placeholder original; conversely all copies are satisfied when
    the original was. Formulas without placeholders are returned unchanged.
    """
    if not any(ZERO in c.args for c in formula.constraints):
        return formula
    top = max((v for v in formula.universe if isinstance(v, int)), default=0)
    fresh = [top + i for i in range(1, k + 2)]
    out: list[Constraint] = []
    for c in formula.constraints:
        if ZERO not in c.args:
            out.append(c)
            continue
        for z in fresh:
            out.append(Constraint(c.relation, tuple(z if a == ZERO else a for a in c.args)))
    return Formula(formula.language, tuple(out), frozenset(formula.universe) | set(fresh))
