import json
import subprocess
import sys

import pytest

from geomva.cli import main


def run(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip().startswith("{") else None


def test_axioms_trivial(capsys):
    code, doc = run(capsys, "axioms", "--model", "trivial")
    assert code == 0 and doc["schema"] == 1 and doc["status"] == "pass"
    assert all(r["status"] == "pass" for r in doc["results"].values())


def test_axioms_free_boson_records_locality(capsys):
    code, doc = run(capsys, "axioms", "--model", "free_boson", "--window", "0:6", "--kmax", "7")
    assert code == 0
    assert doc["results"]["va.locality"]["details"]["orders"]["b-1,b-1"] == 2
    assert doc["results"]["geo.meromorphicity"]["orders"]["b-1,b-1"] == 2


def test_axioms_undetermined_exit(capsys):
    code, doc = run(capsys, "axioms", "--model", "free_boson", "--window", "0:2", "--kmax", "1")
    assert code == 3
    assert doc["results"]["va.locality"]["status"] == "undetermined"


def test_eval_examples(capsys):
    for pts in (["b@2", "b@1"], ["b@1", "b@2"]):
        code, doc = run(capsys, "eval", *pts)
        assert code == 0
        assert doc["results"]["eval"]["value"]["0"] == {"|0>": 1.0}
    code, doc = run(capsys, "eval")
    assert doc["results"]["eval"]["value"]["0"] == {"|0>": 1.0}
    assert all(v == {} for k, v in doc["results"]["eval"]["value"].items() if k != "0")


def test_eval_float_points_use_ordered_path(capsys):
    code, doc = run(capsys, "eval", "b@2.5+0.1j", "b@0.3")
    ev = doc["results"]["eval"]
    assert code == 0 and ev["path"] == "ordered"
    re, im = ev["value"]["0"]["|0>"]
    expected = (2.2 + 0.1j) ** -2
    assert abs(complex(re, im) - expected) < 1e-12
    assert set(ev["certificates"]) == {str(l) for l in range(7)}


def test_eval_diagonal_exit(capsys):
    assert main(["eval", "b@1", "b@1"]) == 4
    assert "DiagonalError" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["eval", "--window", "3"],
        ["eval", "--model", "nope"],
        ["eval", "x@1"],
        ["eval", "b1"],
        ["axioms", "--kmax", "-1"],
        ["frobnicate"],
        ["eval", "--param", "d"],
        ["axioms", "--config", "/nonexistent.json"],
    ],
)
def test_usage_errors(capsys, argv):
    assert main(argv) == 2


def test_roundtrip_trivial(capsys):
    code, doc = run(capsys, "roundtrip", "--model", "trivial")
    r = doc["results"]["roundtrip"]
    assert code == 0 and r["status"] == "pass"
    assert r["exact_residual"] == r["T_residual"] == r["vacuum_residual"] == 0


def test_converge_tables(capsys):
    code, doc = run(capsys, "converge")
    assert code == 0
    assoc = [row["residual"] for row in doc["results"]["associativity"]["table"]]
    assert assoc[0] > assoc[1] > assoc[2]
    ope = [row["residual"] for row in doc["results"]["ope"]["table"]]
    assert ope[0] > ope[1] > ope[2]
    code, doc = run(capsys, "converge", "--model", "trivial")
    assert code == 0
    assert all(row["residual"] == 0 for row in doc["results"]["associativity"]["table"])


def test_ope_and_locality_commands(capsys):
    code, doc = run(capsys, "ope", "b@3+0.2j", "b@0.5", "b@0.45+0.05j", "--i", "1", "--j", "2", "--order", "8")
    assert code == 0
    res = doc["results"]["ope"]["partial_residuals"]
    assert res["2"] > res["4"] > res["8"]
    assert doc["results"]["ope"]["terms"][0] == {"k": 1, "coefficient": {"|0>": 1}}
    code, doc = run(capsys, "locality", "--a", "b", "--b", "b")
    assert code == 0 and doc["results"]["locality"]["orders"] == {"b-1,b-1": 2}
    code, doc = run(capsys, "locality", "--model", "commutative", "--window", "0:4")
    assert code == 0 and set(doc["results"]["locality"]["orders"].values()) == {0}


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "commutative", "window": "0:3", "kmax": 4, "params": {"d": 1}}))
    code, doc = run(capsys, "locality", "--config", str(cfg))
    assert code == 0 and doc["config"]["model"] == "commutative" and doc["config"]["kmax"] == 4
    code, doc = run(capsys, "locality", "--config", str(cfg), "--model", "trivial")
    assert doc["config"]["model"] == "trivial" and doc["config"]["window"] == "0:3"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": "red"}))
    assert main(["axioms", "--config", str(bad)]) == 2


def test_output_file_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["converge", "--model", "free_boson", "--output", str(path)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    doc = json.loads(a.read_text())
    assert doc["schema"] == 1 and isinstance(doc["results"]["ope"]["point"][0], list)


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "geomva", "eval", "b@2", "b@1", "--model", "free_boson", "--json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["eval"]["value"]["0"]["|0>"] == 1.0
