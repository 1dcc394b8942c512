import json
import subprocess
import sys

from locint import instances
from locint.cli import main
from locint.domain import standard_flag


def test_demo_text(capsys):
    assert main(["demo"]) == 0
    out = capsys.readouterr().out
    assert "verify_dec_diag: PASS" in out and "0 failed" in out


def test_run_json_to_file(tmp_path):
    sc = tmp_path / "s.json"
    sc.write_text(json.dumps({"seed": 2, "domains": {"d": instances.dim8_instance().to_dict()},
                              "tasks": [{"task": "verify_dec_diag", "domain": "d"}]}))
    out = tmp_path / "r.json"
    assert main(["run", str(sc), "--out", str(out), "--seed", "9"]) == 0
    rep = json.loads(out.read_text())
    assert rep["environment"]["seed"] == 9 and rep["entries"][0]["status"] == "PASS"


def test_run_reports_failure_exit_code(tmp_path, capsys):
    sc = tmp_path / "s.json"
    sc.write_text(json.dumps({"domains": {"d": instances.dim8_instance().to_dict()},
                              "tasks": [{"task": "density_profile", "domain": "d",
                                         "chain": [2, 1]}]}))
    assert main(["run", str(sc), "--format", "text"]) == 1
    assert "density_profile: FAIL" in capsys.readouterr().out


def test_bad_input_exit_code(tmp_path, capsys):
    sc = tmp_path / "s.json"
    sc.write_text("{nope")
    assert main(["run", str(sc)]) == 2
    assert "ParseError" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == 2


def test_validate(tmp_path, capsys):
    p = tmp_path / "d.json"
    p.write_text(json.dumps(standard_flag([1, 2]).to_dict()))
    assert main(["validate", str(p)]) == 0
    assert "PASS" in capsys.readouterr().out
    p.write_text(json.dumps(instances.dim8_instance().to_dict()))
    assert main(["validate", str(p), "--format", "json"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out)["status"] == "PASS"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "locint.cli", "demo", "--format", "json"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["summary"]["failed"] == 0
