"""Scenarios, reports and the command line.

Run: python demos/05_scenario_reports.py
"""

import json
import tempfile
from pathlib import Path

from locint import instances
from locint import scenario as S
from locint.cli import main

scenario = {
    "seed": 42,
    "domains": {"d8": instances.dim8_instance().to_dict()},
    "operators": {"S": {"rule": "diag_n", "depth": 8}},
    "tasks": [{"task": "verify_dec_diag", "domain": "d8"},
              {"task": "seminorms", "operator": "S"},
              {"task": "random_suite", "count": 5, "checks": ["dec_diag", "phi"]}],
}

report = S.run_scenario(S.scenario_from_dict(scenario))
print(S.emit_report(report, "text"))

# Same scenario and seed, same bytes.
again = S.run_scenario(S.scenario_from_dict(scenario))
print("byte-identical rerun:", S.emit_report(report, "json") == S.emit_report(again, "json"))

# The CLI does the same from a file.
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "scenario.json"
    path.write_text(json.dumps(scenario))
    out = Path(tmp) / "report.json"
    code = main(["run", str(path), "--out", str(out)])
    print("locint run exit code:", code, " entries:", len(json.loads(out.read_text())["entries"]))
