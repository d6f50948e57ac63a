"""Gadget constructions for languages without a polynomial kernel.

Everything here is built from a non-mergeability witness: small constraint
bundles that force a variable true, false, or equal to another; a ternary or
quinary selection relation assembled from the witness positions; complete
binary selection trees whose local weight is logarithmic in the number of
selection variables; and the reduction from Exact Hitting Set that strings
selection trees and equality gadgets together. Every derived object is
checked by exhaustive evaluation before it is returned, so a wrong case
analysis surfaces as LemmaContractViolated rather than as a bad instance.

Constraint shapes are written as patterns whose slots name either a role
("r0", "r1", ...), a fresh internal variable ("i0", "i1", ...), or one of
the two shared pinned constants ("one", "zero"). A GadgetKit turns patterns
into concrete constraints, allocating the shared constants on first use so
their support appears exactly once per emitted formula.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .classify import NO_POLY_KERNEL, classify
from .errors import LemmaContractViolated, OutOfScopeFallback
from .formulas import Constraint, ConstraintLanguage, Formula, Var, token_key
from .relations import MergeWitness, Relation, check_property

UNCONDITIONAL = "unconditional"
WEIGHT_CONDITIONAL = "weight_conditional"

# Fragment shapes: a plain pattern bundle; a star of k+1 disequalities that
# pins its role true on pain of exceeding the budget; a chain of k equality
# partners that pins its role false the same way.
PATTERNS = "patterns"
NEQ_STAR = "neq-star"
EQ_CHAIN = "eq-chain"

TERNARY = "ternary"
QUINARY = "quinary"

# Tuple contracts for the two selection relation kinds, over the roles
# (parent, left, right) and (pick_left, pick_right, parent, left, right).
TERNARY_REQUIRED = ((0, 0, 0), (1, 1, 0), (1, 0, 1))
TERNARY_FORBIDDEN = ((1, 0, 0),)
QUINARY_REQUIRED = (
    (1, 0, 1, 1, 0),
    (1, 0, 0, 0, 0),
    (0, 1, 1, 0, 1),
    (0, 1, 0, 0, 0),
)
QUINARY_FORBIDDEN = ((1, 0, 1, 0, 0), (0, 1, 1, 0, 0))


@dataclass(frozen=True)
class Pattern:
    """One constraint shape: a relation name plus a slot per position."""

    relation: str
    slots: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.relation}({', '.join(self.slots)})"


def _slots_by_classes(arity: int, classes) -> tuple[str, ...]:
    """Lay out slots position by position from a slot -> positions map."""
    out: list[str | None] = [None] * arity
    for slot, positions in classes.items():
        for p in positions:
            if out[p - 1] is not None:
                raise ValueError(f"position {p} assigned twice")
            out[p - 1] = slot
    if any(s is None for s in out):
        raise ValueError("uncovered position in slot layout")
    return tuple(out)  # type: ignore[return-value]


def _swap_roles(slots: tuple[str, ...]) -> tuple[str, ...]:
    return tuple({"r0": "r1", "r1": "r0"}.get(s, s) for s in slots)


@dataclass(frozen=True)
class FragmentRecipe:
    """A reusable constraint bundle, instantiated per use with fresh internals.

    roles counts the interface variables; patterns use role slots
    r0..r(roles-1), internal slots i0.., and the shared constants. The star
    and chain shapes repeat their binary pattern bundle against k+1 (resp.
    k) fresh partners, so their forcing power is conditional on the budget.
    """

    shape: str
    roles: int
    patterns: tuple[Pattern, ...]
    internals: int
    guarantee: str
    note: str

    def instantiate(self, kit: "GadgetKit", role_vars: tuple[Var, ...]) -> list[Constraint]:
        if len(role_vars) != self.roles:
            raise ValueError(f"fragment wants {self.roles} roles, got {len(role_vars)}")
        if self.shape == PATTERNS:
            internals = [kit.fresh("w") for _ in range(self.internals)]
            return [kit.realize(p, role_vars, internals) for p in self.patterns]
        copies = kit.k + 1 if self.shape == NEQ_STAR else max(kit.k, 1)
        if self.shape not in (NEQ_STAR, EQ_CHAIN):
            raise ValueError(f"unknown fragment shape {self.shape!r}")
        out: list[Constraint] = []
        for _ in range(copies):
            partner = kit.fresh("w")
            out.extend(kit.realize(p, (role_vars[0], partner), ()) for p in self.patterns)
        return out


@dataclass(frozen=True)
class GadgetFragment:
    """An instantiated fragment: concrete constraints plus their contract.

    guarantee covers the whole instantiation, so it degrades to
    weight_conditional when a referenced shared constant is only pinned
    within the budget. weight_overhead is the number of fragment variables
    forced true in every satisfying assignment of the stated regime, and
    some satisfying assignment attains exactly that count.
    """

    recipe: FragmentRecipe
    constraints: tuple[Constraint, ...]
    interface: tuple[Var, ...]
    internal: tuple[Var, ...]
    guarantee: str
    weight_overhead: int


@dataclass(frozen=True)
class ConstantGadgets:
    """The three constant-forcing gadgets derived from one language."""

    language: ConstraintLanguage
    k: int
    one: GadgetFragment
    zero: GadgetFragment
    eq: GadgetFragment
    witness_relation: str
    notes: tuple[str, ...]

    def recipes(self) -> dict[str, FragmentRecipe]:
        return {"one": self.one.recipe, "zero": self.zero.recipe, "eq": self.eq.recipe}


class GadgetKit:
    """Variable factory and shared-constant registry for one emitted formula.

    The pinned-true and pinned-false constants are allocated lazily; their
    support constraints accumulate in .support and must be emitted once with
    the rest of the formula. Fresh names carry a short label plus a counter,
    so construction order alone determines every name.
    """

    def __init__(self, gadgets: ConstantGadgets, k: int):
        self.gadgets = gadgets
        self.k = k
        self.support: list[Constraint] = []
        self._constants: dict[str, Var] = {}
        self._counters: dict[str, int] = {}

    def fresh(self, label: str) -> Var:
        n = self._counters.get(label, 0) + 1
        self._counters[label] = n
        return f"{label}{n}"

    def constant(self, which: str) -> Var:
        if which not in ("one", "zero"):
            raise ValueError(f"unknown constant {which!r}")
        if which not in self._constants:
            var = "z1" if which == "one" else "z0"
            self._constants[which] = var
            recipe = (self.gadgets.one if which == "one" else self.gadgets.zero).recipe
            self.support.extend(recipe.instantiate(self, (var,)))
        return self._constants[which]

    def constants(self) -> dict[str, Var]:
        return dict(self._constants)

    def realize(self, pattern: Pattern, role_vars, internals) -> Constraint:
        args: list[Var] = []
        for slot in pattern.slots:
            if slot.startswith("r"):
                args.append(role_vars[int(slot[1:])])
            elif slot.startswith("i"):
                args.append(internals[int(slot[1:])])
            else:
                args.append(self.constant(slot))
        return Constraint(pattern.relation, tuple(args))

    def support_variables(self) -> set[Var]:
        out: set[Var] = set(self._constants.values())
        for c in self.support:
            out |= c.variables()
        return out


def _require_no_poly_kernel(language: ConstraintLanguage):
    report = classify(language)
    if report.outcome != NO_POLY_KERNEL:
        raise OutOfScopeFallback(
            f"gadget constructions need a NO_POLY_KERNEL language, got {report.outcome}"
        )
    return report


def _first_witness(language: ConstraintLanguage) -> tuple[Relation, MergeWitness]:
    report = _require_no_poly_kernel(language)
    return language.get(report.witness_relation), report.witness


def _pattern_value(
    language: ConstraintLanguage, patterns, roles: int, internals: int = 0
) -> set[tuple[int, ...]]:
    """Effective relation of a pattern bundle over its roles.

    Internal slots are quantified existentially; the shared constants read
    as their pinned values. This is the exhaustive check behind every
    derived construction.
    """
    rels = {p.relation: language.get(p.relation) for p in patterns}
    out: set[tuple[int, ...]] = set()
    for bits in itertools.product((0, 1), repeat=roles):
        for extra in itertools.product((0, 1), repeat=internals):
            ok = True
            for p in patterns:
                value = []
                for slot in p.slots:
                    if slot.startswith("r"):
                        value.append(bits[int(slot[1:])])
                    elif slot.startswith("i"):
                        value.append(extra[int(slot[1:])])
                    else:
                        value.append(1 if slot == "one" else 0)
                if tuple(value) not in rels[p.relation]:
                    ok = False
                    break
            if ok:
                out.add(bits)
                break
    return out


def _witness_classes(witness: MergeWitness) -> dict[str, frozenset[int]]:
    classes: dict[str, set[int]] = {}
    for i in range(1, len(witness.alpha) + 1):
        classes.setdefault(witness.position_kind(i), set()).add(i)
    return {kind: frozenset(ps) for kind, ps in classes.items()}


# ---------------------------------------------------------------------------
# constant-forcing gadgets


def _derive_one_recipe(language: ConstraintLanguage) -> tuple[FragmentRecipe, str]:
    """Pin a variable true using a non-zero-valid relation.

    A one-valid candidate applied to a single repeated variable does it
    outright. Otherwise the positions split along the largest tuple's
    support: the identified binary relation contains (1,0) but misses (0,0)
    and (1,1), so it is exactly {(1,0)} or the disequality, and the
    disequality still pins within the budget when starred k+1 times.
    """
    candidates = [r for r in language if not check_property(r, "zero_valid")]
    if not candidates:
        raise OutOfScopeFallback("every relation is zero-valid; nothing can be pinned true")
    for rel in candidates:
        if check_property(rel, "one_valid"):
            recipe = FragmentRecipe(
                PATTERNS, 1, (Pattern(rel.name, ("r0",) * rel.arity),), 0, UNCONDITIONAL,
                f"{rel.name} applied to one repeated variable",
            )
            return recipe, f"pinned true by {rel.name} on a repeated variable"
    rel = candidates[0]
    top = max(rel.tuples)
    support = frozenset(p for p in rel.positions() if top[p - 1] == 1)
    rest = frozenset(rel.positions()) - support
    slots = _slots_by_classes(rel.arity, {"r0": support, "r1": rest})
    pattern = Pattern(rel.name, slots)
    value = _pattern_value(language, (pattern,), 2)
    if value == {(1, 0)}:
        direct = Pattern(rel.name, tuple("i0" if s == "r1" else s for s in slots))
        recipe = FragmentRecipe(
            PATTERNS, 1, (direct,), 1, UNCONDITIONAL,
            f"{rel.name} split on its largest tuple pins (r0=1, partner=0)",
        )
        return recipe, f"pinned true by {rel.name} split on its largest tuple"
    if value == {(1, 0), (0, 1)}:
        recipe = FragmentRecipe(
            NEQ_STAR, 1, (pattern,), 0, WEIGHT_CONDITIONAL,
            f"{rel.name} split on its largest tuple is a disequality; "
            "k+1 fresh partners make reading false too heavy",
        )
        return recipe, f"pinned true by a star of {rel.name} disequalities"
    raise LemmaContractViolated(
        f"splitting {rel.name} on its largest tuple gave {sorted(value)}, "
        "expected {(1, 0)} or the disequality"
    )


def _eq_zero_recipes(
    language: ConstraintLanguage, rel: Relation, witness: MergeWitness
) -> tuple[FragmentRecipe, FragmentRecipe, list[str]]:
    """Equality and pinned-false recipes from the non-mergeability witness.

    Positions split by the witness: c_x where the produced tuple exceeds
    beta, c_y where alpha exceeds the produced tuple, c_one true in beta,
    c_zero false in alpha. Placing x on c_x and y on c_y with the constants
    pinned yields a relation containing (0,0) and (1,1) but never (1,0);
    conjoined with its mirror image that is equality. When c_zero is
    nonempty the first attempt folds it into y: the mirrored conjunction
    then never contains (1,0) or (0,1), so it is either a direct pinned-
    false pair or already equality.
    """
    arity = rel.arity
    sigma, alpha, beta = witness.produced, witness.alpha, witness.beta
    c_x = frozenset(i for i in rel.positions() if beta[i - 1] < sigma[i - 1])
    c_y = frozenset(i for i in rel.positions() if sigma[i - 1] < alpha[i - 1])
    c_one = frozenset(i for i in rel.positions() if beta[i - 1] == 1)
    c_zero = frozenset(i for i in rel.positions() if alpha[i - 1] == 0)
    if not c_x or not c_y:
        raise LemmaContractViolated(
            f"witness for {rel.name} has an empty side: c_x={sorted(c_x)}, c_y={sorted(c_y)}"
        )
    notes = [
        f"witness split of {rel.name}: x on {sorted(c_x)}, y on {sorted(c_y)}, "
        f"pinned true {sorted(c_one)}, pinned false {sorted(c_zero)}"
    ]

    def eq_from_split(y_positions: frozenset[int], pin_zero: bool, note: str) -> FragmentRecipe:
        classes: dict[str, frozenset[int]] = {"r0": c_x, "r1": y_positions}
        if c_one:
            classes["one"] = c_one
        if pin_zero and c_zero:
            classes["zero"] = c_zero
        slots = _slots_by_classes(arity, classes)
        patterns = (Pattern(rel.name, slots), Pattern(rel.name, _swap_roles(slots)))
        recipe = FragmentRecipe(PATTERNS, 2, patterns, 0, UNCONDITIONAL, note)
        value = _pattern_value(language, patterns, 2)
        if value != {(0, 0), (1, 1)}:
            raise LemmaContractViolated(
                f"equality attempt on {rel.name} produced {sorted(value)}"
            )
        return recipe

    def chain_zero(eq: FragmentRecipe) -> FragmentRecipe:
        return FragmentRecipe(
            EQ_CHAIN, 1, eq.patterns, 0, WEIGHT_CONDITIONAL,
            "k equality partners make reading true too heavy",
        )

    if not c_zero:
        eq = eq_from_split(c_y, False, "mirrored witness split, no pinned-false positions")
        notes.append("equality directly from the mirrored split")
        return eq, chain_zero(eq), notes

    # first attempt: fold the pinned-false positions into y
    folded: dict[str, frozenset[int]] = {"r0": c_x, "r1": c_y | c_zero}
    if c_one:
        folded["one"] = c_one
    slots = _slots_by_classes(arity, folded)
    patterns = (Pattern(rel.name, slots), Pattern(rel.name, _swap_roles(slots)))
    value = _pattern_value(language, patterns, 2)
    if value == {(0, 0)}:
        zero_patterns = tuple(
            Pattern(rel.name, tuple({"r1": "i0"}.get(s, s) for s in p.slots))
            for p in patterns
        )
        zero = FragmentRecipe(
            PATTERNS, 1, zero_patterns, 1, UNCONDITIONAL,
            "mirrored split with the pinned-false side folded in collapses to (0,0)",
        )
        notes.append("pinned false directly by the folded mirrored split")
        eq = eq_from_split(c_y, True, "mirrored witness split with both constants pinned")
        notes.append("equality from the split once the pinned-false constant exists")
        return eq, zero, notes
    if value == {(0, 0), (1, 1)}:
        eq = FragmentRecipe(
            PATTERNS, 2, patterns, 0, UNCONDITIONAL,
            "mirrored split with the pinned-false side folded in is already equality",
        )
        notes.append("equality directly from the folded mirrored split")
        return eq, chain_zero(eq), notes
    raise LemmaContractViolated(
        f"folded mirror of {rel.name} produced {sorted(value)}, "
        "expected {(0, 0)} or {(0, 0), (1, 1)}"
    )


def _verify_fragment(fragment: GadgetFragment, contract: str, language, k: int) -> int:
    """Exhaustively confirm a fragment's contract; return its forced cost.

    contract is "one", "zero" or "eq". Weight-conditional fragments are
    checked over assignments of weight at most k, unconditional ones over
    all assignments of their variables.
    """
    variables = sorted(
        {v for c in fragment.constraints for v in c.variables()}, key=token_key
    )
    formula = Formula(language, fragment.constraints, frozenset(variables))
    conditional = fragment.guarantee == WEIGHT_CONDITIONAL
    ifc = fragment.interface
    best: int | None = None
    for bits in itertools.product((0, 1), repeat=len(variables)):
        true_set = {v for v, b in zip(variables, bits) if b}
        if conditional and len(true_set) > k:
            continue
        if not formula.satisfied_by(true_set):
            continue
        if contract == "one" and ifc[0] not in true_set:
            raise LemmaContractViolated("pinned-true fragment admits a false interface")
        if contract == "zero" and ifc[0] in true_set:
            raise LemmaContractViolated("pinned-false fragment admits a true interface")
        if contract == "eq" and (ifc[0] in true_set) != (ifc[1] in true_set):
            raise LemmaContractViolated("equality fragment admits unequal interfaces")
        if best is None or len(true_set) < best:
            best = len(true_set)
    if best is None:
        raise LemmaContractViolated(f"{contract} fragment admits no satisfying assignment")
    return best


def force_constants(language: ConstraintLanguage, k: int) -> ConstantGadgets:
    """Derive and verify the pinned-true, pinned-false and equality gadgets.

    Each returned fragment is instantiated on canonical interface variables
    together with its own copy of any shared constants it mentions, then
    checked exhaustively: the interface contract holds in every satisfying
    assignment of the stated regime and the recorded overhead is attained.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rel, witness = _first_witness(language)
    one_recipe, one_note = _derive_one_recipe(language)
    eq_recipe, zero_recipe, notes = _eq_zero_recipes(language, rel, witness)

    def dummy(recipe: FragmentRecipe, interface: tuple[Var, ...]) -> GadgetFragment:
        return GadgetFragment(recipe, (), interface, (), recipe.guarantee, 0)

    scaffold = ConstantGadgets(
        language, k, dummy(one_recipe, ("x",)), dummy(zero_recipe, ("x",)),
        dummy(eq_recipe, ("x", "y")), rel.name, (),
    )

    def build(recipe: FragmentRecipe, interface: tuple[Var, ...], contract: str) -> GadgetFragment:
        kit = GadgetKit(scaffold, k)
        constraints = tuple(recipe.instantiate(kit, interface)) + tuple(kit.support)
        guarantee = recipe.guarantee
        for name in kit.constants():
            sub = one_recipe if name == "one" else zero_recipe
            if sub.guarantee == WEIGHT_CONDITIONAL:
                guarantee = WEIGHT_CONDITIONAL
        internal = tuple(
            sorted(
                {v for c in constraints for v in c.variables()} - set(interface),
                key=token_key,
            )
        )
        fragment = GadgetFragment(recipe, constraints, interface, internal, guarantee, 0)
        overhead = _verify_fragment(fragment, contract, language, k)
        return GadgetFragment(recipe, constraints, interface, internal, guarantee, overhead)

    one = build(one_recipe, ("x",), "one")
    zero = build(zero_recipe, ("x",), "zero")
    eq = build(eq_recipe, ("x", "y"), "eq")
    return ConstantGadgets(language, k, one, zero, eq, rel.name, (one_note, *notes))


# ---------------------------------------------------------------------------
# selection relation derivation


@dataclass(frozen=True)
class SelectionTemplate:
    """A verified ternary or quinary selection relation over one language.

    node_patterns realize the relation on role variables; for the quinary
    kind neq_patterns realize the disequality between the two picker roles.
    effective is the composed relation, checked against the tuple contract
    on construction.
    """

    kind: str
    language: ConstraintLanguage
    witness_relation: str
    roles: tuple[str, ...]
    node_patterns: tuple[Pattern, ...]
    neq_patterns: tuple[Pattern, ...]
    effective: Relation
    gadgets: ConstantGadgets
    derivation: tuple[str, ...]


def _validate_template(language, kind: str, patterns, label: str) -> Relation:
    roles = 3 if kind == TERNARY else 5
    required = TERNARY_REQUIRED if kind == TERNARY else QUINARY_REQUIRED
    forbidden = TERNARY_FORBIDDEN if kind == TERNARY else QUINARY_FORBIDDEN
    value = _pattern_value(language, patterns, roles)
    for t in required:
        if t not in value:
            raise LemmaContractViolated(f"{label}: required tuple {t} missing")
    for t in forbidden:
        if t in value:
            raise LemmaContractViolated(f"{label}: forbidden tuple {t} present")
    return Relation(label, roles, value)


def _first_closure_violation(rel: Relation, combine):
    tuples = rel.tuples
    for i, t1 in enumerate(tuples):
        for t2 in tuples[i + 1:]:
            if combine(t1, t2) not in rel:
                return t1, t2
    return None


def _synthesize_neq(
    language: ConstraintLanguage, witness_rel: Relation
) -> tuple[tuple[Pattern, ...], list[str]]:
    """Build disequality patterns from closure-violation witnesses.

    A pair whose join is missing gives, after identification, a relation
    with (1,0) and (0,1) but not (1,1): the disequality or the negative
    clause. A pair whose meet is missing in some non-Horn relation gives
    one with (1,0) and (0,1) but not (0,0): the disequality or the
    disjunction. Either may already be the disequality; otherwise their
    conjunction is exactly it.
    """

    def join(a, b):
        return tuple(x | y for x, y in zip(a, b))

    def meet(a, b):
        return tuple(x & y for x, y in zip(a, b))

    def split_pattern(rel: Relation, t1, t2) -> Pattern:
        classes: dict[str, set[int]] = {}
        for p in rel.positions():
            slot = {(1, 0): "r0", (0, 1): "r1", (1, 1): "one", (0, 0): "zero"}[
                (t1[p - 1], t2[p - 1])
            ]
            classes.setdefault(slot, set()).add(p)
        return Pattern(rel.name, _slots_by_classes(rel.arity, classes))

    pair = _first_closure_violation(witness_rel, join)
    if pair is None:
        raise LemmaContractViolated(
            f"{witness_rel.name} is join-closed; disequality synthesis needs a violation"
        )
    upper = split_pattern(witness_rel, *pair)
    upper_value = _pattern_value(language, (upper,), 2)
    notes = [f"join violation in {witness_rel.name} gives {sorted(upper_value)}"]
    if upper_value == {(1, 0), (0, 1)}:
        return (upper,), notes

    non_horn = next((r for r in language if not check_property(r, "horn")), None)
    if non_horn is None:
        raise LemmaContractViolated("no meet-closure violation available in the language")
    pair = _first_closure_violation(non_horn, meet)
    if pair is None:
        raise LemmaContractViolated(f"{non_horn.name} unexpectedly meet-closed")
    lower = split_pattern(non_horn, *pair)
    lower_value = _pattern_value(language, (lower,), 2)
    notes.append(f"meet violation in {non_horn.name} gives {sorted(lower_value)}")
    if lower_value == {(1, 0), (0, 1)}:
        return (lower,), notes

    combined = _pattern_value(language, (upper, lower), 2)
    if combined != {(1, 0), (0, 1)}:
        raise LemmaContractViolated(f"disequality synthesis produced {sorted(combined)}")
    notes.append("conjunction of the two is exactly the disequality")
    return (upper, lower), notes


def derive_selection_relation(language: ConstraintLanguage) -> SelectionTemplate:
    """Assemble a selection relation from the first non-mergeability witness.

    Positions group by their witness column: two petal groups reading true
    in exactly one parent of the produced tuple are always present, plus at
    least one further group. A dual Horn witness relation always yields the
    ternary kind directly; otherwise the case analysis below lands on a
    ternary grouping or composes a quinary relation from two copies sharing
    their parent role, steered by a synthesized disequality.
    """
    rel, witness = _first_witness(language)
    gadgets = force_constants(language, 1)
    classes = _witness_classes(witness)
    p11 = classes.get("P11", frozenset())
    p10 = classes.get("P10", frozenset())
    p01 = classes.get("P01", frozenset())
    c10 = classes.get("C10", frozenset())
    c01 = classes.get("C01", frozenset())
    constants: dict[str, frozenset[int]] = {}
    if classes.get("Z1"):
        constants["one"] = classes["Z1"]
    if classes.get("Z0"):
        constants["zero"] = classes["Z0"]
    if not p11 or not p10:
        raise LemmaContractViolated(
            f"witness for {rel.name} lacks a petal side: P11={sorted(p11)}, P10={sorted(p10)}"
        )
    derivation = [
        f"witness positions of {rel.name}: "
        + ", ".join(f"{kind}={sorted(ps)}" for kind, ps in sorted(classes.items()))
    ]

    def ternary(groups: dict[str, frozenset[int]], note: str) -> SelectionTemplate:
        slots = _slots_by_classes(rel.arity, {**groups, **constants})
        pattern = Pattern(rel.name, slots)
        effective = _validate_template(language, TERNARY, (pattern,), f"{rel.name}.sel3")
        derivation.append(note)
        return SelectionTemplate(
            TERNARY, language, rel.name, ("parent", "left", "right"),
            (pattern,), (), effective, gadgets, tuple(derivation),
        )

    def quinary(groups: dict[str, frozenset[int]], first_map, second_map, note: str) -> SelectionTemplate:
        slots = _slots_by_classes(rel.arity, {**groups, **constants})
        first = Pattern(rel.name, tuple(first_map.get(s, s) for s in slots))
        second = Pattern(rel.name, tuple(second_map.get(s, s) for s in slots))
        neq, neq_notes = _synthesize_neq(language, rel)
        derivation.extend(neq_notes)
        effective = _validate_template(language, QUINARY, (first, second), f"{rel.name}.sel5")
        derivation.append(note)
        return SelectionTemplate(
            QUINARY, language, rel.name,
            ("pick_left", "pick_right", "parent", "left", "right"),
            (first, second), neq, effective, gadgets, tuple(derivation),
        )

    if check_property(rel, "dual_horn"):
        if c10:
            constants["one"] = constants.get("one", frozenset()) | c10
        third = c01 | p01
        if not third:
            raise LemmaContractViolated(
                f"dual Horn witness for {rel.name} has no third position group"
            )
        return ternary(
            {"r0": p11, "r1": p10, "r2": third},
            "dual Horn: the zero-in-parents groups take the third role, "
            "the falling group is pinned true",
        )

    extra = [t for t in ("C10", "C01", "P01") if classes.get(t)]
    if not extra:
        raise LemmaContractViolated(f"witness for {rel.name} has only the two petal groups")

    if extra == ["C01"] or extra == ["P01"]:
        return ternary(
            {"r0": p11, "r1": p10, "r2": c01 | p01},
            f"single extra group {extra[0]} takes the third role",
        )

    if extra == ["C10"]:
        return quinary(
            {"g": c10, "r2": p11, "a": p10},
            {"g": "r0", "a": "r3"},
            {"g": "r1", "a": "r4"},
            "single falling group: two copies share the parent role and "
            "the falling group carries the pickers",
        )

    if not c10:
        return ternary(
            {"r0": p11, "r1": p10, "r2": c01 | p01},
            "no falling group: both zero-in-parents groups merge into the third role",
        )

    if not c01:
        # groups are C10, P11, P10, P01; membership of the pattern that is
        # true only on the rising petal decides which reduction applies
        tester = Pattern(
            rel.name,
            _slots_by_classes(
                rel.arity, {**constants, "r0": c10, "r1": p11, "r2": p10, "r3": p01}
            ),
        )
        if (0, 1, 0, 0) not in _pattern_value(language, (tester,), 4):
            return ternary(
                {"r0": p11, "r1": c10 | p10, "r2": p01},
                "falling group identified with its petal twin takes the second role",
            )
        return quinary(
            {"g": c10, "r2": p11, "a": p10, "q": p01},
            {"g": "r0", "a": "r3", "q": "zero"},
            {"g": "r1", "a": "r4", "q": "zero"},
            "falling group steers two copies; the spare petal group is pinned false",
        )

    if not p01:
        return quinary(
            {"g": c10, "h": c01, "r2": p11, "a": p10},
            {"g": "r0", "h": "r1", "a": "r3"},
            {"g": "r1", "h": "r0", "a": "r4"},
            "both core groups present: mirrored copies share the parent role",
        )

    return quinary(
        {"g": c10, "h": c01, "r2": p11, "a": p10, "b": p01},
        {"g": "r0", "h": "r1", "a": "r3", "b": "r4"},
        {"g": "r1", "h": "r0", "a": "r4", "b": "r3"},
        "all five groups present: mirrored copies swap the child roles",
    )


# ---------------------------------------------------------------------------
# selection formulas


@dataclass(frozen=True)
class SelectionFormula:
    """A selection tree over Y plus its local variables and exact weight.

    constraints are the tree constraints alone; support holds the shared
    constant gadgets, whose forced-true cost is overhead. In any satisfying
    assignment of the weight regime at least one Y variable is true, and
    for each y there is one with exactly y true among Y and exactly w true
    local variables.
    """

    template: SelectionTemplate
    ys: tuple[Var, ...]
    local_vars: tuple[Var, ...]
    constraints: tuple[Constraint, ...]
    support: tuple[Constraint, ...]
    support_vars: tuple[Var, ...]
    w: int
    overhead: int
    levels: tuple[tuple[Var, ...], ...]
    leaf_slots: tuple[Var | None, ...]
    pickers: tuple[tuple[Var, Var], ...]

    def formula(self) -> Formula:
        universe = set(self.ys) | set(self.local_vars) | set(self.support_vars)
        return Formula(
            self.template.language, self.support + self.constraints, frozenset(universe)
        )


def _pin_true(kit: GadgetKit, var: Var) -> list[Constraint]:
    one = kit.gadgets.one.recipe
    if one.guarantee == UNCONDITIONAL:
        return one.instantiate(kit, (var,))
    return kit.gadgets.eq.recipe.instantiate(kit, (var, kit.constant("one")))


def build_selection_tree(
    template: SelectionTemplate, ys, kit: GadgetKit, tag: str = ""
) -> SelectionFormula:
    """Emit one selection tree over the given Y variables into the kit.

    The tree is complete and binary over the next power of two; surplus
    leaves reuse the shared pinned-false constant. The root is pinned true,
    each internal node carries one node-pattern bundle on (parent, left,
    right), and the quinary kind adds one picker pair per level, shared by
    the level's nodes and held apart by the disequality patterns. tag
    prefixes the local variable names so several trees can share a kit.
    """
    ys = tuple(ys)
    n = len(ys)
    if n < 1:
        raise ValueError("a selection tree needs at least one selection variable")
    support_start = len(kit.support)
    constraints: list[Constraint] = []
    levels: list[tuple[Var, ...]] = []
    pickers: list[tuple[Var, Var]] = []
    if n == 1:
        height = 0
        leaf_slots: list[Var | None] = [ys[0]]
        constraints.extend(_pin_true(kit, ys[0]))
    else:
        height = (n - 1).bit_length()
        width = 1 << height
        leaf_slots = list(ys) + [None] * (width - n)
        sep = "" if height <= 9 else "_"
        for level in range(height):
            levels.append(
                tuple(f"{tag}x{level}{sep}{j}" for j in range(1, (1 << level) + 1))
            )
        constraints.extend(_pin_true(kit, levels[0][0]))
        if template.kind == QUINARY:
            for level in range(1, height + 1):
                pair = (f"{tag}l{level}", f"{tag}r{level}")
                pickers.append(pair)
                for p in template.neq_patterns:
                    constraints.append(kit.realize(p, pair, ()))

        def child(level: int, j: int) -> Var:
            if level == height:
                slot = leaf_slots[j - 1]
                return slot if slot is not None else kit.constant("zero")
            return levels[level][j - 1]

        for level in range(height):
            for j, parent in enumerate(levels[level], start=1):
                left = child(level + 1, 2 * j - 1)
                right = child(level + 1, 2 * j)
                if template.kind == TERNARY:
                    roles = (parent, left, right)
                else:
                    pick = pickers[level]
                    roles = (pick[0], pick[1], parent, left, right)
                for p in template.node_patterns:
                    constraints.append(kit.realize(p, roles, ()))

    w = height if template.kind == TERNARY else 2 * height
    support = tuple(kit.support[support_start:])
    local_vars = sorted(
        {v for c in constraints for v in c.variables()} - set(ys) - kit.support_variables(),
        key=token_key,
    )
    return SelectionFormula(
        template, ys, tuple(local_vars), tuple(constraints),
        support, tuple(sorted(kit.support_variables(), key=token_key)),
        w, 0, tuple(levels), tuple(leaf_slots), tuple(pickers),
    )


def measure_support(gadgets: ConstantGadgets, kit: GadgetKit) -> tuple[int, frozenset]:
    """Minimum true count over the kit's shared support, with a witness.

    This is the exact price every emitted formula pays for its pinned
    constants, found by exhaustive search over the support variables.
    """
    variables = sorted(kit.support_variables(), key=token_key)
    if not variables:
        return 0, frozenset()
    formula = Formula(gadgets.language, tuple(kit.support), frozenset(variables))
    for size in range(len(variables) + 1):
        for combo in itertools.combinations(variables, size):
            if formula.satisfied_by(combo):
                return size, frozenset(combo)
    raise LemmaContractViolated("shared constant support is unsatisfiable")


def build_selection_formula(
    template: SelectionTemplate, n: int, k_context: int
) -> SelectionFormula:
    """Standalone selection formula over y1..yn with its own constant support."""
    if n < 1:
        raise ValueError("n must be at least 1")
    kit = GadgetKit(template.gadgets, k_context)
    built = build_selection_tree(template, tuple(f"y{i}" for i in range(1, n + 1)), kit)
    overhead, _ = measure_support(template.gadgets, kit)
    return SelectionFormula(
        built.template, built.ys, built.local_vars, built.constraints,
        built.support, built.support_vars, built.w, overhead,
        built.levels, built.leaf_slots, built.pickers,
    )


def selection_unit_assignment(
    sel: SelectionFormula, index: int, support_assignment=frozenset()
) -> set[Var]:
    """The canonical satisfying assignment with only ys[index] true among Y.

    True variables: the chosen leaf's root-to-leaf path, one picker per
    level steering toward it for the quinary kind, the chosen y, and
    whatever the shared support forces (pass the measured assignment).
    """
    if not 0 <= index < len(sel.ys):
        raise ValueError("selection index out of range")
    true_set: set[Var] = {sel.ys[index]} | set(support_assignment)
    height = len(sel.levels)
    for level in range(height):
        true_set.add(sel.levels[level][index >> (height - level)])
    for level, pair in enumerate(sel.pickers, start=1):
        bit = (index >> (height - level)) & 1
        true_set.add(pair[1] if bit else pair[0])
    return true_set


# ---------------------------------------------------------------------------
# exact hitting set reduction


@dataclass(frozen=True)
class EhsReduction:
    """The lower-bound reduction instance for one hypergraph and language."""

    formula: Formula
    k: int
    vertex_count: int
    edges: tuple[tuple[int, ...], ...]
    occurrence: dict[tuple[int, int], Var]
    selections: tuple[SelectionFormula, ...]
    edge_weights: tuple[int, ...]
    overhead: int
    support_assignment: frozenset
    template: SelectionTemplate


def reduce_exact_hitting_set(
    vertex_count: int,
    edges,
    language: ConstraintLanguage,
    template: SelectionTemplate | None = None,
) -> EhsReduction:
    """Reduce an Exact Hitting Set instance to weight-bounded satisfiability.

    One occurrence variable per (vertex, edge) incidence; one selection tree
    per edge over its occurrence variables; equality gadgets between every
    pair of occurrences of the same vertex. The parameter is the edge count
    plus the trees' exact local weights plus the measured cost of the shared
    constants, so the output is satisfiable within it exactly when some
    vertex set meets every edge exactly once.
    """
    edges = tuple(tuple(e) for e in edges)
    if not edges:
        raise ValueError("the hypergraph needs at least one edge")
    for e in edges:
        if not e:
            raise ValueError("empty edge")
        if len(set(e)) != len(e):
            raise ValueError(f"repeated vertex in edge {e}")
        for v in e:
            if not 1 <= v <= vertex_count:
                raise ValueError(f"vertex {v} out of range")
    if vertex_count > 2 ** len(edges):
        raise OutOfScopeFallback(
            f"{vertex_count} vertices exceed 2^{len(edges)}; such instances are "
            "decided outright by exhaustion over edge choices, not reduced"
        )
    if template is None:
        template = derive_selection_relation(language)
    gadgets = template.gadgets
    occurrence: dict[tuple[int, int], Var] = {}
    for ei, edge in enumerate(edges):
        for v in edge:
            occurrence[(v, ei)] = f"y{ei}.{v}"

    def build(k: int):
        kit = GadgetKit(gadgets, k)
        selections: list[SelectionFormula] = []
        tree_constraints: list[Constraint] = []
        for ei, edge in enumerate(edges):
            ys = tuple(occurrence[(v, ei)] for v in edge)
            sel = build_selection_tree(template, ys, kit, tag=f"e{ei}.")
            selections.append(sel)
            tree_constraints.extend(sel.constraints)
        eq_constraints: list[Constraint] = []
        for v in range(1, vertex_count + 1):
            mine = [occurrence[(v, ei)] for ei, e in enumerate(edges) if v in e]
            for a, b in itertools.combinations(mine, 2):
                eq_constraints.extend(gadgets.eq.recipe.instantiate(kit, (a, b)))
        return kit, tree_constraints + eq_constraints, selections

    # the first pass fixes which constants are referenced, hence the overhead
    probe_kit, _, probe_selections = build(1)
    overhead, _ = measure_support(gadgets, probe_kit)
    weights = tuple(sel.w for sel in probe_selections)
    k = len(edges) + sum(weights) + overhead
    kit, constraints, selections = build(k)
    overhead_final, support_assignment = measure_support(gadgets, kit)
    if overhead_final != overhead:
        raise LemmaContractViolated(
            f"shared constant cost changed with the budget: {overhead} vs {overhead_final}"
        )
    universe = set(occurrence.values()) | kit.support_variables()
    for c in constraints:
        universe |= c.variables()
    formula = Formula(
        language, tuple(kit.support) + tuple(constraints), frozenset(universe)
    )
    return EhsReduction(
        formula, k, vertex_count, edges, occurrence, tuple(selections),
        weights, overhead, support_assignment, template,
    )


def ehs_hitting_assignment(reduction: EhsReduction, hitting_set) -> set[Var]:
    """The canonical weight-k assignment encoding an exact hitting set."""
    chosen = set(hitting_set)
    true_set: set[Var] = set(reduction.support_assignment)
    for ei, edge in enumerate(reduction.edges):
        hits = [i for i, v in enumerate(edge) if v in chosen]
        if len(hits) != 1:
            raise ValueError(f"edge {edge} is hit {len(hits)} times")
        true_set |= selection_unit_assignment(reduction.selections[ei], hits[0])
    return true_set
