"""Exit codes, output formats, and determinism of the command-line front end."""

from __future__ import annotations

import json
import shutil
import subprocess

import pytest

from minones import cli
from minones.errors import LemmaContractViolated
from minones.fileio import parse_instance, parse_language

VC_REL = "relation OR2 2\n01\n10\n11\nend\n"
EVEN_OR_REL = VC_REL + "relation EVEN3 3\n000\n011\n101\n110\nend\n"
CHAIN_MO1 = "minones 4 2\nconstraint OR2 1 2\nconstraint OR2 2 3\nconstraint OR2 3 4\n"
TRIANGLE_MO1 = (
    "minones 3 1\nconstraint OR2 1 2\nconstraint OR2 2 3\nconstraint OR2 1 3\n"
)
H_EHS = "ehs 3 2\nedge 1 2\nedge 2 3\n"


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in (
        ("vc.rel", VC_REL),
        ("even_or.rel", EVEN_OR_REL),
        ("f.mo1", CHAIN_MO1),
        ("triangle.mo1", TRIANGLE_MO1),
        ("h.ehs", H_EHS),
    ):
        p = tmp_path / name
        p.write_text(text)
        paths[name] = str(p)
    paths["dir"] = tmp_path
    return paths


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestExitCodes:
    def test_classify_poly_kernel(self, files, capsys):
        code, out, _ = run(capsys, "classify", "--language", files["vc.rel"])
        assert code == 0
        assert out.splitlines()[0] == "POLY_KERNEL"

    def test_kernelize_non_mergeable_is_3(self, files, capsys):
        code, _, err = run(
            capsys, "kernelize", "--language", files["even_or.rel"],
            "--instance", files["f.mo1"], "-k", "2",
        )
        assert code == 3
        assert "not mergeable" in err

    def test_solve_unsat_is_0(self, files, capsys):
        code, out, _ = run(
            capsys, "solve", "--language", files["vc.rel"],
            "--instance", files["triangle.mo1"], "-k", "1", "--method", "brute",
        )
        assert code == 0
        assert out.splitlines()[0] == "UNSAT"

    def test_usage_error_is_1(self, files, capsys):
        assert run(capsys, "classify")[0] == 1
        assert run(capsys, "no-such-command")[0] == 1
        assert run(capsys)[0] == 1

    def test_help_is_0(self, capsys):
        assert run(capsys, "--help")[0] == 0

    def test_missing_file_is_1(self, files, capsys):
        code, _, err = run(
            capsys, "classify", "--language", str(files["dir"] / "nope.rel")
        )
        assert code == 1
        assert "nope.rel" in err

    def test_parse_error_is_2(self, files, capsys):
        bad = files["dir"] / "bad.rel"
        bad.write_text("relation X 2\n0\nend\n")
        code, _, err = run(capsys, "classify", "--language", str(bad))
        assert code == 2
        assert "length 1" in err

    def test_unknown_relation_is_2(self, files, capsys):
        inst = files["dir"] / "unknown.mo1"
        inst.write_text("minones 2 1\nconstraint NOPE 1 2\n")
        code, _, _ = run(
            capsys, "solve", "--language", files["vc.rel"], "--instance", str(inst)
        )
        assert code == 2

    def test_gadget_on_kernelizable_language_is_3(self, files, capsys):
        code, _, err = run(capsys, "gadget", "--language", files["vc.rel"])
        assert code == 3
        assert "NO_POLY_KERNEL" in err

    def test_contract_violation_is_4(self, files, capsys, monkeypatch):
        def boom(language):
            raise LemmaContractViolated("boom")

        monkeypatch.setattr(cli, "classify", boom)
        code, _, err = run(capsys, "classify", "--language", files["vc.rel"])
        assert code == 4
        assert "boom" in err


class TestOutputs:
    def test_classify_witness_is_replayable(self, files, capsys):
        _, out, _ = run(capsys, "classify", "--language", files["even_or.rel"])
        lines = out.splitlines()
        assert lines[0] == "NO_POLY_KERNEL"
        assert "witness relation: EVEN3" in lines
        assert any(line.startswith("produced: 100") for line in (l.strip() for l in lines))

    def test_solve_reports_assignment(self, files, capsys):
        code, out, _ = run(
            capsys, "solve", "--language", files["vc.rel"], "--instance", files["f.mo1"]
        )
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "SAT"
        assert lines[1] == "weight: 2"
        assert lines[2].startswith("assignment: ")

    def test_k_override(self, files, capsys):
        code, out, _ = run(
            capsys, "solve", "--language", files["vc.rel"],
            "--instance", files["f.mo1"], "-k", "0",
        )
        assert code == 0
        assert out.splitlines()[0] == "UNSAT"

    def test_kernelize_writes_reparseable_instance(self, files, capsys):
        out_path = files["dir"] / "kern.mo1"
        code, out, _ = run(
            capsys, "kernelize", "--language", files["vc.rel"],
            "--instance", files["f.mo1"], "-o", str(out_path),
        )
        assert code == 0
        assert "kernel k: 2" in out
        language = parse_language(VC_REL)
        formula, k = parse_instance(out_path.read_text(), language)
        assert k == 2
        from minones.solvers import solve_brute

        original, _ = parse_instance(CHAIN_MO1, language)
        assert solve_brute(formula, k).status == solve_brute(original, 2).status

    def test_kernelize_stdout_artifact(self, files, capsys):
        code, out, err = run(
            capsys, "kernelize", "--language", files["vc.rel"],
            "--instance", files["f.mo1"],
        )
        assert code == 0
        # artifact on stdout, summary on the error stream
        language = parse_language(VC_REL)
        parse_instance(out, language)
        assert "kernel variables:" in err

    def test_reduce_ehs_instance_decides_correctly(self, files, capsys):
        out_path = files["dir"] / "red.mo1"
        code, out, _ = run(
            capsys, "reduce-ehs", "--language", files["even_or.rel"],
            "--hypergraph", files["h.ehs"], "-o", str(out_path),
        )
        assert code == 0
        assert out.splitlines()[0] == "k: 4"
        language = parse_language(EVEN_OR_REL)
        formula, k = parse_instance(out_path.read_text(), language)
        from minones.solvers import solve_branch

        assert solve_branch(formula, k).status == "SAT"

    def test_reduce_ehs_infeasible(self, files, capsys):
        h = files["dir"] / "bad.ehs"
        h.write_text("ehs 2 3\nedge 1\nedge 1 2\nedge 2\n")
        out_path = files["dir"] / "red2.mo1"
        code, _, _ = run(
            capsys, "reduce-ehs", "--language", files["even_or.rel"],
            "--hypergraph", str(h), "-o", str(out_path),
        )
        assert code == 0
        language = parse_language(EVEN_OR_REL)
        formula, k = parse_instance(out_path.read_text(), language)
        from minones.solvers import solve_branch

        assert solve_branch(formula, k).status == "UNSAT"

    def test_gadget_lists_fragments(self, files, capsys):
        code, out, _ = run(capsys, "gadget", "--language", files["even_or.rel"], "-k", "2")
        assert code == 0
        assert "one (unconditional, overhead 1):" in out
        assert "  OR2(x, x)" in out.splitlines()
        assert "selection kind: ternary" in out


class TestJson:
    def test_single_document(self, files, capsys):
        code, out, _ = run(capsys, "classify", "--language", files["even_or.rel"], "--json")
        assert code == 0
        doc = json.loads(out)
        assert doc["command"] == "classify"
        assert doc["outcome"] == "NO_POLY_KERNEL"
        assert doc["witness"]["produced"] == "100"
        assert {r["name"] for r in doc["relations"]} == {"OR2", "EVEN3"}

    def test_kernelize_embeds_instance(self, files, capsys):
        code, out, _ = run(
            capsys, "kernelize", "--language", files["vc.rel"],
            "--instance", files["f.mo1"], "--json",
        )
        assert code == 0
        doc = json.loads(out)
        parse_instance(doc["instance"], parse_language(VC_REL))
        assert doc["output"] is None

    def test_solve_document(self, files, capsys):
        code, out, _ = run(
            capsys, "solve", "--language", files["vc.rel"],
            "--instance", files["triangle.mo1"], "-k", "2", "--json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["status"] == "SAT"
        assert doc["weight"] == 2
        assert len(doc["assignment"]) == 2


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("classify", "--language", "{even_or}"),
            ("classify", "--language", "{even_or}", "--json"),
            ("gadget", "--language", "{even_or}", "-k", "3"),
            ("relation", "--language", "{even_or}"),
        ],
    )
    def test_byte_identical_reruns(self, files, capsys, argv):
        argv = [a.replace("{even_or}", files["even_or.rel"]) for a in argv]
        first = run(capsys, *argv)
        second = run(capsys, *argv)
        assert first == second

    def test_env_max_arity_is_honored(self, files, capsys, monkeypatch):
        wide = files["dir"] / "wide.rel"
        wide.write_text("relation W 3\n000\nend\n")
        assert run(capsys, "classify", "--language", str(wide))[0] == 0
        monkeypatch.setenv("MINONES_MAX_ARITY", "2")
        code, _, err = run(capsys, "classify", "--language", str(wide))
        assert code == 2
        assert "arity" in err


def test_console_script_installed(files):
    exe = shutil.which("minones")
    assert exe, "console script should be on PATH after an editable install"
    proc = subprocess.run(
        [exe, "classify", "--language", files["vc.rel"]],
        capture_output=True, text=True, timeout=60,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "POLY_KERNEL"
