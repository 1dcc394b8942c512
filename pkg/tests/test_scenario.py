import json

import numpy as np
import pytest

from locint import instances
from locint import scenario as S
from locint.domain import standard_flag
from locint.errors import CapExceeded, ParseError, UnresolvedReference
from locint.report import Report, to_json, to_text


def write(tmp_path, data, name="s.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return p


def minimal():
    return {"seed": 3, "domains": {"flag": standard_flag([1, 2, 3]).to_dict()},
            "tasks": [{"task": "validate", "domain": "flag"}]}


def test_minimal_scenario_loads_and_runs(tmp_path):
    sc = S.load_scenario(write(tmp_path, minimal()))
    assert sc.seed == 3 and list(sc.domains) == ["flag"]
    rep = S.run_scenario(sc)
    assert rep.passed and len(rep.entries) == 1
    assert rep.environment["seed"] == 3
    assert rep.environment["prng"] == instances.PRNG_NAME


def test_dangling_references(tmp_path):
    data = minimal()
    data["tasks"] = [{"task": "seminorms", "operator": "ghost"}]
    with pytest.raises(UnresolvedReference, match="ghost"):
        S.load_scenario(write(tmp_path, data))
    data = minimal()
    data["operators"] = {"T": {"domain": "nowhere", "top_matrix": {"rows": 1, "cols": 1,
                                                                    "entries": [[1, 0]]}}}
    with pytest.raises(UnresolvedReference, match="nowhere"):
        S.load_scenario(write(tmp_path, data))


def test_caps(tmp_path, monkeypatch):
    data = {"domains": {"big": {"poset": {"elements": [1]}, "ambient_dim": 1000,
                                "levels": {"1": {"dim": 1000}}}}}
    with pytest.raises(CapExceeded):
        S.load_scenario(write(tmp_path, data))
    data = {"tasks": [{"task": "random_suite", "max_atoms": 40}]}
    with pytest.raises(CapExceeded):
        S.load_scenario(write(tmp_path, data))
    monkeypatch.setenv("LOCINT_CAPS", json.dumps({"atoms": 64, "ambient_dim": 256}))
    S.load_scenario(write(tmp_path, data))
    monkeypatch.setenv("LOCINT_CAPS", "{broken")
    with pytest.raises(ParseError):
        S.current_caps()


def test_parse_errors_carry_position(tmp_path):
    with pytest.raises(ParseError, match="line 2, column"):
        S.load_scenario(write(tmp_path, '{"seed": 1,\n "tasks": [}'))
    with pytest.raises(ParseError, match="unknown task"):
        S.load_scenario(write(tmp_path, {"tasks": [{"task": "explode"}]}))
    with pytest.raises(ParseError):
        S.scenario_from_dict({"seed": "x"})


def test_dim8_verify_dec_diag():
    data = {"seed": 0, "domains": {"d8": instances.dim8_instance().to_dict()},
            "tasks": [{"task": "verify_dec_diag", "domain": "d8"}]}
    rep = S.run_scenario(S.scenario_from_dict(data))
    e = rep.entries[0]
    assert e["status"] == "PASS"
    assert e["dimensions"]["DEC"] == 4 and e["dimensions"]["DIAG'"] == 4


def test_every_task_kind_runs():
    rep = S.run_scenario(S.scenario_from_dict(S.demo_scenario()))
    kinds = {e["task"] for e in rep.entries}
    assert kinds >= {"validate", "verify_dec_diag", "verify_projective", "interchange",
                     "commutant", "density_profile", "seminorms", "norm_profile"}
    assert rep.passed, [e for e in rep.entries if e["status"] != "PASS"]


def test_tasks_with_explicit_inputs():
    d8 = instances.dim8_instance()
    t = {"fibers": {str(p): {"top_matrix": {"rows": 2, "cols": 2,
                                            "entries": [[1, 0], [0, 0], [0, 0], [p, 0]]}}
                    for p in d8.atoms}}
    data = {"seed": 1, "domains": {"d8": d8.to_dict()},
            "operators": {"T": dict(t, domain="d8")},
            "tasks": [{"task": "norm_profile", "operator": "T"},
                      {"task": "density_profile", "domain": "d8", "chain": [1, 2],
                       "field": {"level": 2, "components": {"1": [[0, 0], [1, 0]]}}},
                      {"task": "seminorms", "operator": "T",
                       "vectors": [[[1, 0], [0, 0], [0, 0], [0, 0]]],
                       "vector_pairs": [[[[1, 0], [0, 0], [0, 0], [0, 0]],
                                         [[1, 0], [0, 0], [0, 0], [0, 0]]]]}]}
    rep = S.run_scenario(S.scenario_from_dict(data))
    assert rep.passed
    assert rep.entries[0]["details"]["2"]["formula"] == pytest.approx(2)
    assert rep.entries[1]["details"]["profile"] == [1.0, 0.0]
    assert rep.entries[2]["details"]["vector_seminorms"] == {"strong[0]": 1.0, "weak[0]": 1.0}


def test_failures_become_entries():
    # library errors inside a task are recorded, not raised, and text output shows them
    rep = S.run_scenario(S.scenario_from_dict({
        "domains": {"d": instances.dim8_instance().to_dict()},
        "tasks": [{"task": "density_profile", "domain": "d", "chain": [2, 1]},
                  {"task": "validate", "domain": "d"}]}))
    assert rep.entries[0]["status"] == "FAIL" and "NotAChain" in rep.entries[0]["error"]
    assert rep.entries[1]["status"] == "PASS" and not rep.passed
    text = to_text(rep)
    assert "density_profile: FAIL" in text and "NotAChain" in text


def test_random_suite_entries():
    rep = S.run_scenario(S.scenario_from_dict(
        {"seed": 11, "tasks": [{"task": "random_suite", "count": 5}]}))
    e = rep.entries[0]
    assert e["status"] == "PASS" and len(e["instances"]) == 5
    assert [i["index"] for i in e["instances"]] == list(range(5))


def test_determinism_and_seed_override(tmp_path):
    sc = S.scenario_from_dict({"seed": 5, "tasks": [{"task": "random_suite", "count": 4}]})
    a, b = to_json(S.run_scenario(sc)), to_json(S.run_scenario(sc))
    assert a == b
    c = to_json(S.run_scenario(sc, seed=6))
    assert c != a and json.loads(c)["environment"]["seed"] == 6


def test_empty_report_and_round_trip(tmp_path):
    rep = S.run_scenario(S.scenario_from_dict({}))
    assert rep.entries == [] and json.loads(to_json(rep))["summary"]["total"] == 0
    full = S.run_scenario(S.scenario_from_dict(S.demo_scenario()))
    out = tmp_path / "r.json"
    first = S.emit_report(full, "json", out)
    again = S.emit_report(S.load_report(out), "json")
    assert first == again
    assert Report.from_dict(json.loads(first)).entries == full.entries
    with pytest.raises(ValueError):
        S.emit_report(full, "xml")


def test_timings_opt_in():
    sc = S.scenario_from_dict(minimal())
    assert "seconds" not in S.run_scenario(sc).entries[0]
    assert S.run_scenario(sc, timings=True).entries[0]["seconds"] >= 0


def test_lazy_operator_cap():
    with pytest.raises(CapExceeded):
        S.scenario_from_dict({"operators": {"S": {"rule": "diag_n", "depth": 100}}})


def test_task_params_do_not_clash_with_entry_fields():
    rep = S.run_scenario(S.scenario_from_dict(
        {"tasks": [{"task": "random_suite", "count": 2, "checks": ["dec_diag", "phi"]}]}))
    e = rep.entries[0]
    assert e["params"]["checks"] == ["dec_diag", "phi"]
    assert "random_suite: PASS" in to_text(rep)
