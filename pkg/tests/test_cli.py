import json
import subprocess
import sys

import pytest

from manysorted.cli import render, run_command
from manysorted.formats import load_instance


def run(capsys, *argv):
    code = run_command([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_tarski_on_binary_instance(capsys, golden):
    code, out, _ = run(capsys, "tarski", golden / "binary_not_unary.json", "--n", 2)
    assert code == 0
    assert out.strip().splitlines()[-1] == "PASS: IrB = {2}, convex"


def test_tarski_gap_and_not_nary(capsys, golden):
    code, out, _ = run(capsys, "tarski", golden / "gap.json", "--n", 3)
    assert code == 0 and "PASS: IrB = {1, 3}, gaps 1->3" in out
    code, rep = run_json(capsys, "tarski", golden / "gap.json", "--n", 2)
    assert code == 1 and rep["error"] == "not 2-ary" and rep["witness"] == "s:0,1,2"


def test_synthesize_nonuniform_fails_with_pair(capsys, golden, tmp_path):
    code, out, _ = run(capsys, "synthesize", golden / "nonuniform.json", "-o", tmp_path / "x.json")
    assert code == 1
    assert "not uniform" in out and "{s:0} and {s:1}" in out
    assert not (tmp_path / "x.json").exists()


def test_synthesize_writes_a_reloadable_algebra(capsys, golden, tmp_path):
    out = tmp_path / "syn.json"
    code, rep = run_json(capsys, "synthesize", golden / "golden_binary_sg.json", "--bound", 2, "-o", out)
    assert code == 0 and rep["max_arity"] <= 2
    code, rep = run_json(capsys, "axioms", out)
    assert code == 0
    code, rep = run_json(capsys, "uniform", out)
    assert code == 0


def test_nary_cross_check_agreement(capsys, golden):
    code, out, _ = run(capsys, "nary", golden / "binary_not_unary.json", "--n", 1, "--cross-check")
    assert code == 1
    assert "tower: not 1-ary" in out and "fixed points: not 1-ary" in out and "deciders agree" in out
    code, rep = run_json(capsys, "nary", golden / "binary_not_unary.json", "--n", 2, "--cross-check")
    assert code == 0 and rep["cross_check"] == {
        "tower": True,
        "fixed_points": True,
        "fixed_point_witness": None,
        "agree": True,
    }


def test_sg_and_cross_check(capsys, golden):
    code, rep = run_json(capsys, "sg", golden / "unary_f.json", "--set", "s:0", "--cross-check")
    assert code == 0
    assert rep["result"] == "s:0;t:0" and rep["stages"] == ["s:0", "s:0;t:0"]
    assert rep["cross_check"]["agree"]
    code, rep = run_json(capsys, "sg", golden / "unary_f_sg.json", "--set", "s:1")
    assert rep["operator"] == "J" and rep["result"] == "s:1;t:0"


def test_tower_stages(capsys, golden):
    code, rep = run_json(capsys, "tower", golden / "binary_not_unary.json", "--set", "s:0,1", "--n", 1)
    assert code == 0
    assert rep["stages"] == ["s:0,1"] and rep["omega"] == "s:0,1" and rep["closure"] == "s:0,1,2"


def test_irb_and_uniform(capsys, golden):
    code, rep = run_json(capsys, "irb", golden / "unary_f.json")
    assert code == 0 and rep["irb"] == [2] and rep["convex"]
    code, rep = run_json(capsys, "uniform", golden / "nonuniform.json")
    assert code == 1 and rep["witness"] == ["s:0", "s:1"]


def test_axioms_on_broken_table(capsys, golden, tmp_path):
    doc = json.loads((golden / "unary_f_sg.json").read_text())
    doc["table"][-1]["out"] = [[], []]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    code, rep = run_json(capsys, "axioms", bad)
    assert code == 1 and not rep["extensive"] and rep["witnesses"]["extensive"] == "s:0,1;t:0"
    code, _, err = run(capsys, "irb", bad)
    assert code == 2 and "not a closure operator" in err
    code, _, _ = run(capsys, "irb", bad, "--skip-axioms")
    assert code == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["nary", "missing.json", "--n", "1"],
        ["nary", "{golden}/unary_f.json"],
        ["nary", "{golden}/unary_f.json", "--n", "-1"],
        ["sg", "{golden}/unary_f.json", "--set", "q:0"],
        ["sg", "{golden}/unary_f_sg.json", "--set", "s:0", "--cross-check"],
        ["irb", "{golden}/unary_f.json", "--cap", "2"],
        ["irb", "{golden}/unary_f.json", "--cap", "30"],
        ["tarski", "{golden}/unary_f.json", "--n", "1"],
    ],
)
def test_usage_errors_exit_2(capsys, golden, argv):
    argv = [a.format(golden=golden) for a in argv]
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_cap_flag_before_or_after_command(capsys, golden, monkeypatch):
    monkeypatch.delenv("MANYSORTED_CAP", raising=False)
    assert run(capsys, "--cap", 2, "irb", golden / "unary_f.json")[0] == 2
    assert run(capsys, "irb", golden / "unary_f.json", "--cap", 3)[0] == 0
    monkeypatch.setenv("MANYSORTED_CAP", "2")
    assert run(capsys, "irb", golden / "unary_f.json")[0] == 2


def test_gen_is_reproducible(capsys, tmp_path):
    for kind in ("algebra", "table", "nonuniform"):
        a, b = tmp_path / f"{kind}1.json", tmp_path / f"{kind}2.json"
        for path in (a, b):
            code, _, _ = run(capsys, "gen", kind, "--seed", 11, "--sorts", 2, "--max-arity", 3, "-o", path)
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        load_instance(a)


def test_gen_to_stdout(capsys):
    code, out, _ = run(capsys, "gen", "table", "--seed", 2)
    assert code == 0 and json.loads(out)["kind"] == "closure_table"


def test_backend_flag(capsys, golden):
    outs = {run(capsys, "irb", golden / "gap.json", "--json", "--backend", b)[1] for b in ("numpy", "numba")}
    assert len(outs) == 1


def test_text_is_rendered_from_json(capsys, golden):
    code, rep = run_json(capsys, "tarski", golden / "binary_not_unary.json", "--n", 2)
    _, out, _ = run(capsys, "tarski", golden / "binary_not_unary.json", "--n", 2)
    assert out == render(rep) + "\n"


def test_selftest_small(capsys):
    code, rep = run_json(capsys, "selftest", "--size", 9)
    assert code == 0 and rep["ok"] and len(rep["checks"]) == 11


def test_module_entry_point(golden):
    out = subprocess.run(
        [sys.executable, "-m", "manysorted", "irb", str(golden / "unary_f.json")],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0 and "IrB = {2}, convex" in out.stdout
