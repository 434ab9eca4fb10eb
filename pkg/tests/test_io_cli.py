import json
from fractions import Fraction

import pytest
from click.testing import CliRunner

from ffcolor.cli import main
from ffcolor.intervals import Instance
from ffcolor.io import ParseError, digest, parse_instance, serialize_instance


def test_parse_examples():
    inst = parse_instance("closed 0\nclosed 1\nopen 1")
    assert [str(v) for v in inst] == ["[0,1]", "[1,2]", "(1,2)"]
    assert str(parse_instance("closed 1/2")[0]) == "[1/2,3/2]"
    with pytest.raises(ParseError) as e:
        parse_instance("closd 0")
    assert e.value.line == 1


def test_parse_comments_case_and_normalization():
    text = "# header\n\nCLOSED 2/4   # trailing\n  Open -3\n"
    inst = parse_instance(text)
    assert inst.pairs()[0][0] == Fraction(1, 2)
    assert str(inst[1]) == "(-3,-2)"
    assert serialize_instance(inst) == "closed 1/2\nopen -3\n"


@pytest.mark.parametrize("text,line", [
    ("closed 0\nopen", 2),
    ("closed 1/0", 1),
    ("closed 0.5", 1),
    ("closed 1 2", 1),
    ("\n\nhalf 1", 3),
    ("closed +1", 1),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(ParseError) as e:
        parse_instance(text)
    assert e.value.line == line


def test_round_trip_and_digest():
    inst = Instance.parse_short("[0", "(-1/3", "[7/2")
    text = serialize_instance(inst)
    assert parse_instance(text) == inst
    assert serialize_instance(parse_instance(text)) == text
    assert digest(inst) == digest(parse_instance(text))


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cli_omega_and_color(runner, tmp_path):
    tri = write(tmp_path, "tri.ivl", "closed 0\nclosed 1/2\nclosed 1\n")
    r = runner.invoke(main, ["omega", "-i", tri])
    assert r.exit_code == 0 and r.output == "3\n"
    tw = write(tmp_path, "tw.ivl", "closed 0\nclosed 0\nclosed 0\n")
    r = runner.invoke(main, ["color", "-i", tw, "--algo", "ff"])
    assert r.output == "1 2 3\n"
    r = runner.invoke(main, ["color", "-i", tw, "--algo", "opt", "--json"])
    assert json.loads(r.output) == {"rows": [[0], [1], [2]]}
    r = runner.invoke(main, ["color", "-i", tri, "--json"])
    assert json.loads(r.output) == {"colors": [1, 2, 3]}


def test_cli_exit_codes(runner, tmp_path):
    bad = write(tmp_path, "bad.ivl", "closd 0\n")
    r = runner.invoke(main, ["omega", "-i", bad])
    assert r.exit_code == 2
    assert "line 1" in r.output
    assert runner.invoke(main, ["omega", "-i", str(tmp_path / "missing.ivl")]).exit_code == 2
    assert runner.invoke(main, ["omega"]).exit_code == 2
    assert runner.invoke(main, ["search", "--mode", "nope"]).exit_code == 2
    empty = write(tmp_path, "empty.ivl", "# nothing\n")
    assert runner.invoke(main, ["omega", "-i", empty]).exit_code == 2
    ok = write(tmp_path, "ok.ivl", "closed 0\n")
    assert runner.invoke(main, ["verify", "-i", ok, "--checks", "bogus"]).exit_code == 2


def test_cli_verify(runner, tmp_path):
    inst = write(tmp_path, "a.ivl", "open 0\nclosed 1\nopen 1\nclosed 0\nclosed 1/2\n")
    out = tmp_path / "rep.json"
    r = runner.invoke(main, ["verify", "-i", inst, "--report", str(out)])
    assert r.exit_code == 0, r.output
    doc = json.loads(out.read_text())
    assert list(doc)[:6] == ["schema_version", "digest", "n", "omega", "ff_colors", "ok"]
    assert doc["ok"] and doc["records"] == []
    r = runner.invoke(main, ["verify", "-i", inst, "--checks", "2,general_theorem"])
    assert r.exit_code == 0


def test_cli_verify_fails_on_counterexample(runner, tmp_path):
    text = "open 0\nclosed 0\nopen 1\nclosed 1\nopen 2\nopen 3\nclosed 3\nclosed 2\n"
    inst = write(tmp_path, "cx.ivl", text)
    out = tmp_path / "rep.json"
    r = runner.invoke(main, ["verify", "-i", inst, "--report", str(out)])
    assert r.exit_code == 1
    assert "FAIL general_theorem x=7" in r.output
    rec = json.loads(out.read_text())["records"][0]
    assert rec["name"] == "general_theorem" and rec["witness"]["lhs"] == 4 and rec["witness"]["rhs"] == 3


def test_cli_gen_search_ratio(runner, tmp_path):
    r = runner.invoke(main, ["gen", "--n", "7", "--grid", "3", "--span", "5", "--p-open", "0.3",
                             "--seed", "9"])
    assert r.exit_code == 0
    assert len(parse_instance(r.output)) == 7
    r = runner.invoke(main, ["gen", "--n", "20", "--integral", "--span", "10", "--seed", "2"])
    assert parse_instance(r.output).is_integral
    d = tmp_path / "runs"
    r = runner.invoke(main, ["search", "--mode", "exhaustive", "--max-n", "8", "--grid", "2", "--span", "4",
                             "--omega-cap", "2", "--closed-only", "--out", str(d / "e.json")])
    assert r.exit_code == 0, r.output
    assert "ff=3 omega=2" in r.output
    r = runner.invoke(main, ["search", "--mode", "greedy", "--omega-cap", "1", "--budget", "10",
                             "--out", str(d / "g.json")])
    assert r.exit_code == 0
    r = runner.invoke(main, ["ratio", "-d", str(d)])
    assert r.exit_code == 0
    assert r.output == "omega,max_ff,bound_2w,bound_73w\n1,1,2,1\n2,3,4,3\n"


def test_cli_search_strict_budget(runner):
    args = ["search", "--mode", "exhaustive", "--max-n", "8", "--omega-cap", "2", "--budget", "50"]
    assert runner.invoke(main, args).exit_code == 0
    assert runner.invoke(main, args + ["--strict"]).exit_code == 1
