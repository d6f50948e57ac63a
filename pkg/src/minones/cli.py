"""Batch command-line front end.

Subcommands cover the whole pipeline: classify a language, kernelize or
solve an instance, inspect relation properties, derive the gadget suite,
and reduce an exact hitting set instance. Output is deterministic; --json
swaps the human-readable text for a single JSON document. Exit codes keep
failure triage mechanical: 0 success, 1 usage, 2 unparseable input,
3 violated precondition, 4 violated internal contract.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .classify import classify
from .errors import (
    LemmaContractViolated,
    MinOnesError,
    NotMergeableLanguage,
    OutOfScopeFallback,
    ParseError,
    TooLarge,
    UnknownRelation,
)
from .fileio import (
    load_hypergraph,
    load_instance,
    load_language,
    write_instance,
)
from .formulas import token_key
from .gadgets import derive_selection_relation, force_constants, reduce_exact_hitting_set
from .kernel import kernelize
from .relations import analyze
from .solvers import solve_branch, solve_brute

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_CONTRACT = 4

FLAG_NAMES = (
    "zero_valid",
    "one_valid",
    "horn",
    "dual_horn",
    "ihsb_minus",
    "width2_affine",
    "mergeable",
)


def _bits(t) -> str:
    return "".join(map(str, t))


def _witness_doc(witness) -> dict:
    return {
        "alpha": _bits(witness.alpha),
        "beta": _bits(witness.beta),
        "gamma": _bits(witness.gamma),
        "delta": _bits(witness.delta),
        "produced": _bits(witness.produced),
        "core_positions": sorted(witness.core_positions),
        "petal_positions": sorted(witness.petal_positions),
    }


def _witness_lines(witness, indent: str = "") -> list[str]:
    return [
        f"{indent}alpha:    {_bits(witness.alpha)}",
        f"{indent}beta:     {_bits(witness.beta)}",
        f"{indent}gamma:    {_bits(witness.gamma)}",
        f"{indent}delta:    {_bits(witness.delta)}",
        f"{indent}produced: {_bits(witness.produced)} (missing from the relation)",
    ]


def _record_line(rec) -> str:
    flags = " ".join(f"{name}={'yes' if rec.flag(name) else 'no'}" for name in FLAG_NAMES)
    return f"{rec.name}: {flags}"


def _constraint_text(c) -> str:
    return f"{c.relation}({', '.join(str(a) for a in c.args)})"


def _emit(args, lines: list[str], doc: dict) -> None:
    if args.json:
        print(json.dumps(doc, indent=2))
    else:
        print("\n".join(lines))


def _write_artifact(args, text: str, lines: list[str], doc: dict) -> None:
    """Send the produced instance to -o, or to stdout with the summary on stderr."""
    doc["instance"] = text
    doc["output"] = args.output
    if args.json:
        if args.output is not None:
            Path(args.output).write_text(text)
        print(json.dumps(doc, indent=2))
    elif args.output is not None:
        Path(args.output).write_text(text)
        print("\n".join(lines))
    else:
        print("\n".join(lines), file=sys.stderr)
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_classify(args) -> int:
    language = load_language(args.language)
    report = classify(language)
    lines = [report.outcome]
    doc: dict = {"command": "classify", "outcome": report.outcome}
    if report.ptime_reason is not None:
        lines.append(f"reason: every relation is {report.ptime_reason}")
    doc["ptime_reason"] = report.ptime_reason
    doc["witness_relation"] = report.witness_relation
    doc["witness"] = None
    if report.witness is not None:
        lines.append(f"witness relation: {report.witness_relation}")
        lines.extend(_witness_lines(report.witness))
        doc["witness"] = _witness_doc(report.witness)
    lines.extend(_record_line(rec) for rec in report.records)
    doc["relations"] = [
        {"name": rec.name, **{name: rec.flag(name) for name in FLAG_NAMES}}
        for rec in report.records
    ]
    _emit(args, lines, doc)
    return EXIT_OK


def cmd_relation(args) -> int:
    language = load_language(args.language)
    names = args.names or [rel.name for rel in language]
    lines: list[str] = []
    docs = []
    for name in names:
        rel = language.get(name)
        rec = analyze(rel)
        lines.append(_record_line(rec))
        entry = {
            "name": rec.name,
            "arity": rel.arity,
            "tuples": rel.strings(),
            **{flag: rec.flag(flag) for flag in FLAG_NAMES},
            "witness": None,
        }
        if rec.witness is not None:
            lines.extend(_witness_lines(rec.witness, indent="  "))
            entry["witness"] = _witness_doc(rec.witness)
        docs.append(entry)
    _emit(args, lines, {"command": "relation", "relations": docs})
    return EXIT_OK


def cmd_kernelize(args) -> int:
    language = load_language(args.language)
    formula, k = load_instance(args.instance, language)
    if args.k is not None:
        k = args.k
    result = kernelize(formula, k)
    text = write_instance(result.formula, result.k)
    lines = [
        f"kernel variables: {result.variable_count} (bound {result.bound})",
        f"kernel k: {result.k}",
        f"shortcut: {result.shortcut or 'none'}",
        f"reduce iterations: {result.reduce_iterations}",
        f"measure trajectory: {' '.join(map(str, result.measure_trajectory)) or '-'}",
        f"forced zero variables: {len(result.forced_zero)}",
    ]
    doc = {
        "command": "kernelize",
        "k": result.k,
        "variables": result.variable_count,
        "universe": result.universe_size,
        "bound": result.bound,
        "shortcut": result.shortcut,
        "reduce_iterations": result.reduce_iterations,
        "measure_trajectory": list(result.measure_trajectory),
        "forced_zero": sorted(map(str, result.forced_zero)),
    }
    _write_artifact(args, text, lines, doc)
    return EXIT_OK


def cmd_solve(args) -> int:
    language = load_language(args.language)
    formula, k = load_instance(args.instance, language)
    if args.k is not None:
        k = args.k
    solver = solve_brute if args.method == "brute" else solve_branch
    result = solver(formula, k)
    lines = [result.status]
    doc = {
        "command": "solve",
        "method": args.method,
        "k": k,
        "status": result.status,
        "weight": result.weight,
        "assignment": None,
    }
    if result.satisfiable:
        chosen = sorted(result.assignment, key=token_key)
        lines.append(f"weight: {result.weight}")
        lines.append(f"assignment: {' '.join(map(str, chosen)) or '-'}")
        doc["assignment"] = [str(v) for v in chosen]
    _emit(args, lines, doc)
    return EXIT_OK


def _fragment_lines(label: str, fragment) -> list[str]:
    head = f"{label} ({fragment.guarantee}, overhead {fragment.weight_overhead}):"
    return [head] + [f"  {_constraint_text(c)}" for c in fragment.constraints]


def _fragment_doc(fragment) -> dict:
    return {
        "guarantee": fragment.guarantee,
        "overhead": fragment.weight_overhead,
        "interface": list(fragment.interface),
        "constraints": [_constraint_text(c) for c in fragment.constraints],
    }


def cmd_gadget(args) -> int:
    language = load_language(args.language)
    gadgets = force_constants(language, args.k)
    template = derive_selection_relation(language)
    lines = [f"witness relation: {gadgets.witness_relation}"]
    lines.extend(_fragment_lines("one", gadgets.one))
    lines.extend(_fragment_lines("zero", gadgets.zero))
    lines.extend(_fragment_lines("eq", gadgets.eq))
    lines.append(f"selection kind: {template.kind}")
    lines.append(f"selection roles: {' '.join(template.roles)}")
    lines.extend(f"node pattern: {p}" for p in template.node_patterns)
    lines.extend(f"neq pattern: {p}" for p in template.neq_patterns)
    lines.extend(f"derivation: {d}" for d in template.derivation)
    doc = {
        "command": "gadget",
        "k": args.k,
        "witness_relation": gadgets.witness_relation,
        "fragments": {
            "one": _fragment_doc(gadgets.one),
            "zero": _fragment_doc(gadgets.zero),
            "eq": _fragment_doc(gadgets.eq),
        },
        "notes": list(gadgets.notes),
        "selection": {
            "kind": template.kind,
            "roles": list(template.roles),
            "node_patterns": [str(p) for p in template.node_patterns],
            "neq_patterns": [str(p) for p in template.neq_patterns],
            "effective": [_bits(t) for t in template.effective.tuples],
            "derivation": list(template.derivation),
        },
    }
    _emit(args, lines, doc)
    return EXIT_OK


def cmd_reduce_ehs(args) -> int:
    language = load_language(args.language)
    n, edges = load_hypergraph(args.hypergraph)
    red = reduce_exact_hitting_set(n, edges, language)
    text = write_instance(red.formula, red.k)
    lines = [
        f"k: {red.k}",
        f"edges: {len(red.edges)}",
        f"edge weights: {' '.join(map(str, red.edge_weights))}",
        f"overhead: {red.overhead}",
        f"variables: {len(red.formula.universe)}",
    ]
    doc = {
        "command": "reduce-ehs",
        "k": red.k,
        "vertices": red.vertex_count,
        "edges": [list(e) for e in red.edges],
        "edge_weights": list(red.edge_weights),
        "overhead": red.overhead,
        "variables": len(red.formula.universe),
    }
    _write_artifact(args, text, lines, doc)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minones",
        description="Classify, kernelize, solve, and build hardness reductions "
        "for weight-bounded Boolean constraint satisfaction.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, instance=False, k=False, output=False):
        p.add_argument("--language", required=True, help="relation definitions (.rel)")
        if instance:
            p.add_argument("--instance", required=True, help="constraint instance (.mo1)")
        if k:
            p.add_argument("-k", type=int, default=None, help="override the instance budget")
        if output:
            p.add_argument("-o", "--output", default=None, help="write the produced instance here")
        p.add_argument("--json", action="store_true", help="emit one JSON document")

    p = sub.add_parser("classify", help="place a language in the kernelization trichotomy")
    common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("relation", help="report structural properties per relation")
    common(p)
    p.add_argument("names", nargs="*", help="relation names (default: all)")
    p.set_defaults(func=cmd_relation)

    p = sub.add_parser("kernelize", help="compress an instance over a mergeable language")
    common(p, instance=True, k=True, output=True)
    p.set_defaults(func=cmd_kernelize)

    p = sub.add_parser("solve", help="decide weight-bounded satisfiability")
    common(p, instance=True, k=True)
    p.add_argument(
        "--method", choices=("branch", "brute"), default="branch", help="solver to run"
    )
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gadget", help="derive the constant and selection gadgets")
    common(p)
    p.add_argument("-k", type=int, default=1, help="budget for conditional gadgets")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("reduce-ehs", help="reduce exact hitting set to an instance")
    p.add_argument("--language", required=True, help="relation definitions (.rel)")
    p.add_argument("--hypergraph", required=True, help="hypergraph file (.ehs)")
    p.add_argument("-o", "--output", default=None, help="write the produced instance here")
    p.add_argument("--json", action="store_true", help="emit one JSON document")
    p.set_defaults(func=cmd_reduce_ehs)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems and 0 for --help
        return EXIT_OK if not exc.code else EXIT_USAGE
    try:
        return args.func(args)
    except (ParseError, UnknownRelation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (NotMergeableLanguage, OutOfScopeFallback, TooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except LemmaContractViolated as exc:
        print(f"internal contract violated: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MinOnesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
