import json
import subprocess
import sys

import pytest

from conftest import DEMOS
from skilltree import from_json
from skilltree.cli import main

ALGEBRA = str(DEMOS / "linear_equation.ctdl")
TWO_LEVEL = str(DEMOS / "two_level.ctdl")
FOUR_BLOCKS = str(DEMOS / "four_blocks.ctdl")


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("NO_COLOR", "1")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_validate_reports_errors_with_exit_1(capsys):
    code, out, _ = run(capsys, "validate", ALGEBRA)
    assert code == 1
    assert out.startswith("error E103 ")
    assert "linear_equation.ctdl:" in out and "[nodes: equation, solve_linear_equation]" in out


def test_validate_severity_override(capsys):
    code, out, _ = run(capsys, "validate", ALGEBRA, "--severity", "E103=warning")
    assert code == 0
    assert out.startswith("warning E103 ")
    code, out, _ = run(capsys, "validate", ALGEBRA, "--severity", "E103=off")
    assert code == 0 and "E103" not in out


def test_validate_warnings_only_exit_0(capsys):
    code, out, _ = run(capsys, "validate", TWO_LEVEL)
    assert code == 0
    assert out.count("W202") == 7


def test_validate_parse_error(capsys, tmp_path):
    path = write(tmp_path, "bad.ctdl", 'skill a "A" {\n  requires b\n}\n')
    code, out, _ = run(capsys, "validate", path)
    assert code == 1
    assert "E001" in out and "bad.ctdl:2:" in out


def test_validate_clean_file(capsys, tmp_path):
    path = write(tmp_path, "ok.ctdl", 'skill a "A"\nexercise e "E" { tests: a }\ncourse "c" { goal: a }\n')
    assert run(capsys, "validate", path) == (0, "", "")


def test_plan_text_and_json(capsys):
    code, out, _ = run(capsys, "plan", TWO_LEVEL)
    assert code == 0
    assert out.split() == list("DEBFGCA")
    code, out, _ = run(capsys, "plan", TWO_LEVEL, "--format", "json")
    assert from_json(out).items == tuple("DEBFGCA")


def test_plan_refuses_broken_file(capsys, tmp_path):
    path = write(tmp_path, "cyc.ctdl", 'skill a "A" { requires: b }\nskill b "B" { requires: a }\ncourse "c" { goal: a }\n')
    code, out, err = run(capsys, "plan", path)
    assert code == 2 and out == ""
    assert "E012" in err


def test_blocks_declared_goals(capsys):
    code, out, err = run(capsys, "blocks", FOUR_BLOCKS, "--format", "json")
    assert code == 0
    plan = from_json(out)
    assert [b.members for b in plan.blocks] == [tuple("ABC"), tuple("DE"), tuple("FGH"), tuple("IJ")]
    assert err.count("W401") == 2


def test_blocks_goals_option_and_markdown(capsys, tmp_path):
    src = open(FOUR_BLOCKS).read().replace("  block-goal: C, E, H, J\n", "")
    path = write(tmp_path, "four_blocks.ctdl", src)
    code, out, _ = run(capsys, "blocks", path, "--goals", "C,J", "--block-max", "7")
    assert code == 0
    assert out.count("\n## Block ") == 2
    code, out, _ = run(capsys, "blocks", path, "--format", "json")
    assert from_json(out).goals == ("C", "E", "J")


def test_blocks_bad_goals(capsys, tmp_path):
    src = open(FOUR_BLOCKS).read().replace("  block-goal: C, E, H, J\n", "")
    path = write(tmp_path, "four_blocks.ctdl", src)
    code, _, err = run(capsys, "blocks", path, "--goals", "C,H")
    assert code == 2 and "after the last block goal" in err


def test_export_formats(capsys, tmp_path):
    code, out, _ = run(capsys, "export", ALGEBRA, "--format", "dot")
    assert code == 0 and out.startswith("digraph")
    code, out, _ = run(capsys, "export", ALGEBRA, "--format", "json")
    assert json.loads(out)["kind"] == "graph"
    target = tmp_path / "copy.ctdl"
    code, out, _ = run(capsys, "export", ALGEBRA, "--format", "ctdl", "-o", str(target))
    assert code == 0 and out == ""
    code2, out2, _ = run(capsys, "validate", str(target))
    code1, out1, _ = run(capsys, "validate", ALGEBRA)
    assert code1 == code2
    assert [line.split()[:2] for line in out1.splitlines()] == [line.split()[:2] for line in out2.splitlines()]


def test_check_order(capsys, tmp_path):
    code, out, _ = run(capsys, "check-order", TWO_LEVEL, "--order", str(DEMOS / "bfs.txt"))
    assert code == 0
    assert out.count("warning W301") == 2
    path = write(tmp_path, "bad.txt", "B\nD\nE\nF\nG\nC\nA\n")
    code, out, _ = run(capsys, "check-order", TWO_LEVEL, "--order", path)
    assert code == 1 and "E301" in out
    path = write(tmp_path, "unknown.txt", "D\nZZ\n")
    code, out, _ = run(capsys, "check-order", TWO_LEVEL, "--order", path)
    assert code == 1 and "E010" in out


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate", TWO_LEVEL],
        ["plan", "/nonexistent/file.ctdl"],
        ["validate", TWO_LEVEL, "--severity", "E999=error"],
        ["validate", TWO_LEVEL, "--severity", "E103=loud"],
        ["validate", TWO_LEVEL, "--block-min", "5", "--block-max", "2"],
        ["plan", TWO_LEVEL, "--course", "nope"],
        ["check-order", TWO_LEVEL, "--order", "/nonexistent/order.txt"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_course_required_when_ambiguous(capsys, tmp_path):
    path = write(tmp_path, "two.ctdl", 'skill a "A"\ncourse "x" { goal: a }\ncourse "y" { goal: a }\n')
    assert run(capsys, "plan", path)[0] == 2
    code, out, _ = run(capsys, "plan", path, "--course", "y")
    assert code == 0 and out == "a\n"


def test_color_only_on_terminals(monkeypatch, capsys):
    monkeypatch.delenv("NO_COLOR")
    _, out, _ = run(capsys, "validate", ALGEBRA)
    assert "\x1b[" not in out  # captured output is not a tty


def test_module_entry_point():
    result = subprocess.run([sys.executable, "-m", "skilltree", "plan", TWO_LEVEL], capture_output=True, text=True)
    assert result.returncode == 0
    assert result.stdout.split() == list("DEBFGCA")
