import csv
import io
import json

import pytest

from pgcm.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_examples(capsys):
    assert run(capsys, "classify", "-p", "3", "-m", "3,2,1", "0,0,0;0,0,1;0,2,0")[:2] == (0, "B18[t=2]\n")
    assert run(capsys, "classify", "-p", "5", "-m", "2,2,2", "0,0,0;0,0,0;0,0,0")[:2] == (0, "L1\n")
    assert run(capsys, "classify", "-p", "2", "-m", "1,1,1", "0,0,0;0,0,0;0,0,0")[:2] == (0, "S1\n")


def test_classify_prints_eta(capsys):
    code, out, _ = run(capsys, "classify", "-p", "5", "-m", "1,1,1", "1,0,0;0,2,0;0,0,0")
    assert code == 0
    assert out == "K1[nu=eta] (eta=2)\n"


def test_classify_json(capsys):
    code, out, err = run(capsys, "classify", "-p", "3", "-m", "1,1,1", "1,0,0;0,1,0;0,0,1", "--json")
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert doc["schema"] == "pgcm/1"
    assert doc["label"] == "J1"
    assert doc["eta"] == 2
    assert doc["invariants"]["method"] == "TABLE"
    assert set(doc["witness"]) == {"X", "X2"}


def test_json_is_byte_identical(capsys):
    args = ("classify", "-p", "5", "-m", "2,1,1", "1,2,3;4,0,1;2,2,0", "--json")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]
    args = ("enumerate", "-p", "3", "-m", "2,2,1", "--format", "json")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


@pytest.mark.parametrize(
    "argv, code",
    [
        (("classify", "-p", "3", "-m", "1,1,1", "1,0;0,1"), 2),
        (("classify", "-p", "3", "-m", "1,1", "0,0,0;0,0,0;0,0,0"), 2),
        (("classify", "-p", "4", "-m", "1,1,1", "0,0,0;0,0,0;0,0,0"), 3),
        (("classify", "-p", "3", "-m", "1,2,1", "0,0,0;0,0,0;0,0,0"), 3),
        (("verify", "-p", "7", "-m", "1,1,1", "--level", "orbits"), 4),
        (("oracle", "-p", "5", "-m", "3,3,3", "0,0,0;0,0,0;0,0,1"), 4),
    ],
)
def test_exit_codes(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert out == ""
    assert err


def test_enumerate_csv(capsys):
    code, out, _ = run(capsys, "enumerate", "-p", "2", "-m", "2,1,1", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[-1] == "# 23 rows"
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[:-1]))))
    assert len(rows) == 23
    assert list(rows[0]) == ["family", "params", "m1", "m2", "m3", "i_min", "i_max", "metahamiltonian", "method"]


def test_enumerate_plain_counts(capsys):
    assert run(capsys, "enumerate", "-p", "2", "-m", "2,2,2")[1].splitlines()[-1] == "12"
    assert run(capsys, "enumerate", "-p", "3", "-m", "1,1,1")[1].splitlines()[-1] == "16"


def test_export_latex(capsys):
    code, out, _ = run(capsys, "export", "-p", "3", "-m", "2,1,1", "--format", "latex")
    assert code == 0
    assert out.startswith("\\begin{tabular}")
    assert out.splitlines()[-1] == "% 30 rows"


def test_verify_orbits(capsys):
    code, out, err = run(capsys, "verify", "-p", "3", "-m", "3,2,1", "--level", "orbits", "--threads", "1")
    assert code == 0
    assert out.startswith("pass transversal 46 orbits / 46 families")
    assert "pass" in err


def test_verify_reports_violation(capsys):
    code, out, _ = run(capsys, "verify", "-p", "2", "-m", "2,1,1", "--threads", "1", "--json")
    assert code == 1
    doc = json.loads(out)
    assert doc["ok"] is False
    assert doc["checks"][0]["orbits"] == 22


def test_verify_oracle_level(capsys):
    code, out, _ = run(capsys, "verify", "-p", "2", "-m", "2,2,1", "--level", "oracle", "--pairs", "10")
    assert code == 0, out
    assert "pass invariants-table-vs-oracle" in out


def test_invariants_and_oracle_commands(capsys):
    code, out, _ = run(capsys, "invariants", "-p", "3", "-m", "1,1,1", "1,0,0;0,1,0;0,0,1", "--method", "orbit")
    assert code == 0 and out == "J1 i_min=1 i_max=2 metahamiltonian=false method=ORBIT_SEARCH\n"
    code, out, _ = run(capsys, "oracle", "-p", "2", "-m", "1,1,1", "0,0,0;0,0,0;0,0,1", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["order"] == 64 and doc["metahamiltonian_mode"] == "full"
