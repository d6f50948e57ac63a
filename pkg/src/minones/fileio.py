"""Plain-text file formats for relations, instances and hypergraphs.

Three line-oriented formats, all allowing blank lines and '#' comments:

relation files::

    relation OR2 2
    01
    10
    11
    end

instance files::

    minones <nvars> <k>
    constraint OR2 1 2

with variables numbered 1..nvars (0 denotes the constant-false placeholder),
and exact-hitting-set hypergraphs::

    ehs <nvars> <nedges>
    edge 1 2 3
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .errors import EmptyRelation, ParseError
from .formulas import Constraint, ConstraintLanguage, Formula, token_key
from .relations import Relation


def _lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line.split()


# ---------------------------------------------------------------------------
# relation files


def parse_language(text: str) -> ConstraintLanguage:
    language = ConstraintLanguage()
    current: tuple[str, int, list[tuple[int, ...]]] | None = None
    for number, words in _lines(text):
        if words[0] == "relation":
            if current is not None:
                raise ParseError(f"relation {current[0]!r} not closed by 'end'", number)
            if len(words) != 3:
                raise ParseError("expected: relation <name> <arity>", number)
            name = words[1]
            if name in language:
                raise ParseError(f"duplicate relation name {name!r}", number)
            try:
                arity = int(words[2])
            except ValueError:
                raise ParseError(f"arity {words[2]!r} is not an integer", number)
            current = (name, arity, [])
        elif words[0] == "end":
            if current is None:
                raise ParseError("'end' without an open relation", number)
            name, arity, rows = current
            if not rows:
                raise ParseError(f"relation {name!r} has no tuples", number)
            try:
                language.add(Relation(name, arity, rows))
            except (ValueError, EmptyRelation) as exc:
                raise ParseError(str(exc), number)
            current = None
        else:
            if current is None:
                raise ParseError(f"unexpected {' '.join(words)!r}", number)
            if len(words) != 1:
                raise ParseError("expected a single bitstring", number)
            row = words[0]
            name, arity, rows = current
            if len(row) != arity:
                raise ParseError(
                    f"tuple {row!r} has length {len(row)}, relation {name!r} has arity {arity}",
                    number,
                )
            if set(row) - {"0", "1"}:
                raise ParseError(f"tuple {row!r} has characters outside 0/1", number)
            rows.append(tuple(int(c) for c in row))
    if current is not None:
        raise ParseError(f"relation {current[0]!r} not closed by 'end'")
    if not len(language):
        raise ParseError("no relations in file")
    return language


def write_language(language: ConstraintLanguage) -> str:
    out = []
    for rel in language:
        out.append(f"relation {rel.name} {rel.arity}")
        out.extend(rel.strings())
        out.append("end")
    return "\n".join(out) + "\n"


def load_language(path: str | Path) -> ConstraintLanguage:
    return parse_language(Path(path).read_text())


# ---------------------------------------------------------------------------
# instance files


def parse_instance(text: str, language: ConstraintLanguage) -> tuple[Formula, int]:
    nvars: int | None = None
    k: int | None = None
    constraints: list[Constraint] = []
    for number, words in _lines(text):
        if words[0] == "minones":
            if nvars is not None:
                raise ParseError("duplicate 'minones' header", number)
            if len(words) != 3:
                raise ParseError("expected: minones <nvars> <k>", number)
            try:
                nvars, k = int(words[1]), int(words[2])
            except ValueError:
                raise ParseError("header fields must be integers", number)
            if nvars < 0 or k < 0:
                raise ParseError("header fields must be non-negative", number)
        elif words[0] == "constraint":
            if nvars is None:
                raise ParseError("constraint before 'minones' header", number)
            if len(words) < 2:
                raise ParseError("expected: constraint <name> <v1> ...", number)
            name = words[1]
            rel = language.get(name)  # UnknownRelation propagates
            try:
                args = tuple(int(w) for w in words[2:])
            except ValueError:
                raise ParseError("variables must be integers", number)
            if len(args) != rel.arity:
                raise ParseError(
                    f"{name} has arity {rel.arity}, got {len(args)} arguments", number
                )
            for a in args:
                if not 0 <= a <= nvars:
                    raise ParseError(f"variable {a} outside 0..{nvars}", number)
            constraints.append(Constraint(name, args))
        else:
            raise ParseError(f"unexpected {' '.join(words)!r}", number)
    if nvars is None or k is None:
        raise ParseError("missing 'minones' header")
    formula = Formula(language, tuple(constraints), frozenset(range(1, nvars + 1)))
    return formula, k


def write_instance(formula: Formula, k: int) -> str:
    """Serialize with the universe renumbered densely to 1..n.

    Variables are ordered integers-first then strings, so output is
    deterministic; placeholder arguments stay 0.
    """
    order = sorted(formula.universe, key=token_key)
    rename = {v: i for i, v in enumerate(order, start=1)}
    out = [f"minones {len(order)} {k}"]
    for c in formula.constraints:
        args = " ".join(str(rename[a]) if a != 0 else "0" for a in c.args)
        out.append(f"constraint {c.relation} {args}".rstrip())
    return "\n".join(out) + "\n"


def load_instance(path: str | Path, language: ConstraintLanguage) -> tuple[Formula, int]:
    return parse_instance(Path(path).read_text(), language)


# ---------------------------------------------------------------------------
# hypergraph files


def parse_hypergraph(text: str) -> tuple[int, tuple[tuple[int, ...], ...]]:
    """Returns (vertex count, edges); vertices are 1-based, edges non-empty."""
    n: int | None = None
    m: int | None = None
    edges: list[tuple[int, ...]] = []
    for number, words in _lines(text):
        if words[0] == "ehs":
            if n is not None:
                raise ParseError("duplicate 'ehs' header", number)
            if len(words) != 3:
                raise ParseError("expected: ehs <nvertices> <nedges>", number)
            try:
                n, m = int(words[1]), int(words[2])
            except ValueError:
                raise ParseError("header fields must be integers", number)
            if n < 0 or m < 0:
                raise ParseError("header fields must be non-negative", number)
        elif words[0] == "edge":
            if n is None:
                raise ParseError("edge before 'ehs' header", number)
            try:
                vertices = tuple(int(w) for w in words[1:])
            except ValueError:
                raise ParseError("vertices must be integers", number)
            if not vertices:
                raise ParseError("empty edge", number)
            for v in vertices:
                if not 1 <= v <= n:
                    raise ParseError(f"vertex {v} outside 1..{n}", number)
            if len(set(vertices)) != len(vertices):
                raise ParseError("repeated vertex in edge", number)
            edges.append(vertices)
        else:
            raise ParseError(f"unexpected {' '.join(words)!r}", number)
    if n is None or m is None:
        raise ParseError("missing 'ehs' header")
    if len(edges) != m:
        raise ParseError(f"header promises {m} edges, file has {len(edges)}")
    return n, tuple(edges)


def write_hypergraph(n: int, edges: Iterable[Iterable[int]]) -> str:
    edges = [tuple(e) for e in edges]
    out = [f"ehs {n} {len(edges)}"]
    out.extend("edge " + " ".join(map(str, e)) for e in edges)
    return "\n".join(out) + "\n"


def load_hypergraph(path: str | Path) -> tuple[int, tuple[tuple[int, ...], ...]]:
    return parse_hypergraph(Path(path).read_text())
