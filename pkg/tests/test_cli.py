import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from copduality.cli import main
from copduality.model import fixture_path


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_copositive_example2(capsys):
    code, out, _ = run(capsys, "check-copositive", str(fixture_path("ex2")))
    body = json.loads(out)
    assert code == 0 and body["copositive"] is True
    for z in body["zero_set"]:
        for v in z["closure_vertices"]:
            assert v[0] == v[2]


def test_check_copositive_witness(capsys):
    code, out, _ = run(capsys, "check-copositive", "ex1", "--x", "1,1")
    body = json.loads(out)
    assert code == 1 and body["copositive"] is False and body["minimum"] == "-1"
    assert body["witness"] == ["0", "1", "0"]


def test_check_copositive_example3(capsys):
    assert run(capsys, "check-copositive", "ex3", "--x", "1")[0] == 0


@pytest.mark.parametrize("name,code", [("ex1", 1), ("ex2", 1), ("ex3", 0)])
def test_analyze_exit_codes(capsys, name, code):
    assert run(capsys, "analyze", name)[0] == code


def test_analyze_pinpoints(capsys):
    body = json.loads(run(capsys, "analyze", "ex1")[1])["verdict"]
    assert body["condition_II"]["cases"][0]["k"] == 2 and body["condition_II"]["cases"][0]["j"] == 1
    body = json.loads(run(capsys, "analyze", "ex2")[1])["verdict"]
    assert body["condition_I"]["B1"]["rank_A"] == 0 and body["condition_I"]["B1"]["rank_AB"] == 1


@pytest.mark.parametrize("name,cost,gap", [("ex1", "0,-1", "1"), ("ex3", "1", "0"), ("ex1", "0,0", "0")])
def test_gap(capsys, name, cost, gap):
    code, out, _ = run(capsys, "gap", name, "--cost", cost)
    assert code == 0 and json.loads(out)["gap"]["gap"] == gap


def test_gap_with_parameter(capsys):
    code, out, _ = run(capsys, "gap", "ex1", "--cost", "0,-1", "--param", "a=2")
    assert json.loads(out)["gap"]["gap"] == "2"


@pytest.mark.parametrize("cost", ["0,x", "1", "0.5,1", ""])
def test_gap_bad_cost(capsys, cost):
    code, _, err = run(capsys, "gap", "ex1", "--cost", cost)
    assert code == 2 and "error" in err


def test_duffin(capsys):
    code, out, _ = run(capsys, "duffin", "ex3")
    body = json.loads(out)["duffin"]
    assert code == 0 and body["passes"]
    assert {tuple(f["vector"]) for f in body["F"]} == {("0", "0")}
    assert run(capsys, "duffin", "ex1")[0] == 1
    assert run(capsys, "duffin", "ex2")[0] == 1


def test_immobile(capsys):
    code, out, _ = run(capsys, "immobile", "ex2")
    body = json.loads(out)["immobile"]
    assert code == 0 and body["status"] == "verified-exact"
    assert body["vertices"] == [["1/2", "0", "1/2"], ["0", "1", "0"]]


def test_parse_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "analyze", str(bad))[0] == 2
    asym = tmp_path / "asym.json"
    asym.write_text(json.dumps({"n": 1, "p": 2, "matrices": [[[1, 2], [3, 1]], [[0, 0], [0, 0]]]}))
    code, _, err = run(capsys, "check-copositive", str(asym))
    assert code == 2 and "[1,2]" in err
    assert run(capsys, "analyze", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "nosuchcommand")[0] == 2


def test_immobile_hint_flag(capsys, tmp_path):
    hint = tmp_path / "hint.json"
    hint.write_text(json.dumps([[["1/2", 0, "1/2"], [0, 1, 0]]]))
    code, out, _ = run(capsys, "immobile", "ex2", "--immobile-hint", str(hint))
    assert code == 0 and json.loads(out)["immobile"]["hint_confirmed"] is True


def test_engine_flags(capsys):
    code, out, _ = run(capsys, "analyze", "ex3", "--max-rounds", "3", "--grid-start", "4", "--box-bound", "1000")
    assert code == 0


def test_text_output(capsys):
    code, out, _ = run(capsys, "analyze", "ex1", "--text")
    assert code == 1 and "no-uniform-duality" in out and "(k,j) = (2,1)" in out


def test_report_rationals_round_trip(capsys):
    body = json.loads(run(capsys, "analyze", "ex3", "--cost", "1", "--duffin")[1])
    U = body["gap"]["dual"]["witness"]["U"]
    assert all(isinstance(F(v), F) for row in U for v in row)
    assert json.loads(json.dumps(body)) == body


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "copduality", "analyze", "ex3"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["verdict"]["overall"] == "uniform-duality"


def test_pure_python_backend_gives_identical_report():
    import os
    env = dict(os.environ, COPDUALITY_PURE_PYTHON="1")
    cmd = [sys.executable, "-m", "copduality", "analyze", "ex1", "--cost", "0,-1"]
    pure = subprocess.run(cmd, capture_output=True, env=env)
    probe = subprocess.run([sys.executable, "-c", "from copduality import kernels; print(kernels.KERNEL_BACKEND)"],
                           capture_output=True, text=True, env=env)
    assert probe.stdout.strip() == "python"
    assert pure.stdout == subprocess.run(cmd, capture_output=True).stdout
