import json
from pathlib import Path

import pytest

from summa.cli import main

DEMO = str(Path(__file__).resolve().parents[1] / "sample_specs" / "demo.json")


def run_cli(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_demo(capsys):
    code, out, _ = run_cli(capsys, "validate", DEMO)
    assert code == 0
    assert "tasks" in out


def test_run_demo_text_report(capsys):
    code, out, _ = run_cli(capsys, "run", DEMO)
    assert code == 0
    assert "regular-cesaro" in out
    assert "M1" in out and "Holds" in out
    assert "FailsWithWitness" in out  # the row-sum-2 rejection


def test_strict_mode_fails_on_witnessed_failure(capsys):
    code, _, _ = run_cli(capsys, "run", DEMO, "--strict")
    assert code == 1


def test_schema_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"matrices": [{"label": "m", "kind": "wat"}]}))
    code, _, err = run_cli(capsys, "run", str(bad))
    assert code == 2
    assert "schema error" in err

    missing_label = tmp_path / "bad2.json"
    missing_label.write_text(
        json.dumps(
            {
                "matrices": [],
                "tasks": [
                    {
                        "task": "check-regular",
                        "family": ["ghost"],
                        "idealI": "fin",
                        "idealJ": "fin",
                    }
                ],
            }
        )
    )
    code, _, err = run_cli(capsys, "run", str(missing_label))
    assert code == 2


def test_unreadable_file_exit_code(capsys):
    code, _, err = run_cli(capsys, "run", "/nonexistent/spec.json")
    assert code == 2


def test_runtime_error_exit_code(tmp_path, capsys):
    # core inclusion on a matrix without a certified bound: precondition error
    doc = {
        "matrices": [{"label": "grow", "kind": "ones-lower"}],
        "ideals": [{"label": "fin", "kind": "fin"}],
        "tasks": [
            {"task": "check-core-inclusion", "matrix": "grow", "idealI": "fin"}
        ],
    }
    path = tmp_path / "doc.json"
    path.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, "run", str(path))
    assert code == 3
    assert "runtime error" in err


def test_machine_report_is_deterministic(capsys):
    code1, out1, _ = run_cli(capsys, "run", DEMO, "--format", "machine")
    code2, out2, _ = run_cli(capsys, "run", DEMO, "--format", "machine")
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["schemaVersion"] == 1
    assert all(r["timing"] is None for r in payload["results"])


def test_machine_report_round_trips(capsys):
    _, out, _ = run_cli(capsys, "run", DEMO, "--format", "machine")
    payload = json.loads(out)
    assert json.loads(json.dumps(payload)) == payload
    by_id = {r["taskId"]: r for r in payload["results"]}
    reg = by_id["regular-cesaro"]["verdicts"]
    assert [v["condition"] for v in reg] == ["M1", "M2", "M3", "M4"]
    assert all(v["verdict"] == "Holds" for v in reg)
    sig = by_id["almost-conv-alt"]["verdicts"][0]
    assert sig["value"] == ["1/2"] and sig["certified"] is True
    eq = by_id["equivalence-even-odd"]["verdicts"][0]
    assert eq["i"] == "FailsWithWitness" and eq["consistent"] is True
    ul = by_id["limsup-even-odd"]["verdicts"][0]
    assert ul["lhs"] == ul["adversarialRhs"] == "1"


def test_replay_witness_reproduces(capsys):
    code, out, _ = run_cli(
        capsys, "run", DEMO, "--replay-witness", "reject-row-sum-2.M3"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["reproduced"] is True
    assert payload["recorded"] == payload["reevaluated"] == "2"


def test_replay_unknown_witness_errors(capsys):
    code, _, err = run_cli(
        capsys, "run", DEMO, "--replay-witness", "regular-cesaro.M1"
    )
    assert code == 3
