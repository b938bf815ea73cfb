import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from geomforge.cli import main

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "report.schema.json").read_text())


def run_json(argv, capsys):
    code = main(argv + ["--format", "json"])
    rep = json.loads(capsys.readouterr().out)
    jsonschema.validate(rep, SCHEMA)
    return code, rep


def test_hexagon_verify(capsys):
    code, rep = run_json(["hexagon", "--q", "2", "--verify"], capsys)
    assert code == 0 and rep["pass"]
    assert rep["counts"] == {"points": 63, "lines": 63}
    assert "elapsed_ms" not in rep


def test_zsigmondy_exception(capsys):
    code, rep = run_json(["constraints", "zsigmondy", "--q", "2", "--k", "6"], capsys)
    assert code == 0 and rep["counts"]["exception"] == "q_k_64"


def test_rank4_split(capsys):
    code, rep = run_json(["constraints", "rank4", "--k", "64", "--l", "70", "--lambda", "28", "--mu", "32",
                          "--j", "14", "--jt", "8"], capsys)
    assert code == 0 and rep["verdicts"][0]["actual"] == "s"


@pytest.mark.parametrize("argv", [["hexagon", "--q", "2", "--bogus"], ["nosuch"], ["field", "--q", "6"],
                                  ["group", "--preset", "Spin(7,2)"], ["acceptance"],
                                  ["acceptance", "--tag", "nosuch"], ["hexagon", "--q", "5"],
                                  ["polar", "--kind", "O-", "--n", "6", "--q", "2", "--families"]])
def test_usage_errors_exit_2(argv):
    assert main(argv) == 2


def test_failing_check_exits_1(capsys):
    code, rep = run_json(["ngon", "--projective", "3", "2", "--n", "4"], capsys)
    assert code == 1 and not rep["pass"]


def test_out_file_and_timing(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["field", "--q", "8", "--format", "json", "--out", str(out), "--timing"]) == 0
    assert capsys.readouterr().out == ""
    rep = json.loads(out.read_text())
    jsonschema.validate(rep, SCHEMA)
    assert rep["elapsed_ms"] >= 0


def test_ngon_roundtrip_through_file(tmp_path, capsys):
    path = tmp_path / "gq.json"
    assert main(["ngon", "--polar", "Sp", "4", "2", "--export", str(path)]) == 0
    capsys.readouterr()
    code, rep = run_json(["ngon", "--input", str(path), "--n", "4"], capsys)
    assert code == 0 and (rep["counts"]["s"], rep["counts"]["t"]) == (2, 2)


@pytest.mark.parametrize("argv", [["polar", "--kind", "Sp", "--n", "4", "--q", "3", "--counting"],
                                  ["polar", "--kind", "O+", "--n", "6", "--q", "2", "--families"],
                                  ["group", "--preset", "SL2_4_semilinear", "--check", "lemma", "--check", "blocks"],
                                  ["group", "--preset", "Sp(6,2)", "--check", "chain"],
                                  ["showcase", "--name", "semilinear"],
                                  ["acceptance", "--tag", "constraints"]])
def test_commands_pass_and_validate(argv, capsys):
    code, rep = run_json(argv, capsys)
    assert code == 0 and rep["pass"]


def test_table_output(capsys):
    assert main(["field", "--q", "4"]) == 0
    out = capsys.readouterr().out
    assert "PASS  field axioms" in out and out.rstrip().endswith("PASS")


def test_section13_csv(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, rep = run_json(["constraints", "section13", "--csv", str(path)], capsys)
    assert code == 0 and path.read_text().count("\n") == rep["counts"]["rows"] + 1


def test_module_entry_point_byte_identical():
    cmd = [sys.executable, "-m", "geomforge.cli", "hexagon", "--q", "2", "--format", "json"]
    a, b = (subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2))
    assert a == b and json.loads(a)["pass"]
