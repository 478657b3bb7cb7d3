"""Fixture execution: authorized equivalence, fail-closed denials, logging."""

import json
import subprocess
import sys

import pytest

from sandbox_harness.runner import LoadError, run_fixture

WORLD = {
    "s3": {"user-bucket": {}},
    "database": {"db-a": {}, "db-b": {}},
    "lambda": {"function-b": {"forwards_to_table": "db-b"}},
}


def test_authorized_path_equals_uninstrumented(artifacts):
    event = {"payload": "csv,data"}
    instrumented = run_fixture(artifacts["instrumented"]("upload_report"), WORLD,
                               event, artifacts["env"])
    baseline = run_fixture(artifacts["original"]("upload_report"), WORLD,
                           event, artifacts["env"])
    assert instrumented.raised_error is None
    assert instrumented.output == baseline.output
    assert instrumented.world_after == baseline.world_after
    assert instrumented.world_after["s3"]["user-bucket"]["report.csv"] == "csv,data"


def test_unauthorized_call_denied_with_payload(artifacts):
    event = {"id": "9", "record": "evil", "forward": True,
             "operation": "invoke", "target": "function-b"}
    trace = run_fixture(artifacts["instrumented"]("invoke_bypass_a"), WORLD,
                        event, artifacts["env"])
    assert trace.raised_error is not None
    payload = trace.raised_error["payload"]
    assert set(payload) == {"service", "resource", "action", "reason"}
    assert payload["service"] == "lambda"
    assert payload["action"] == "lambda:InvokeFunction"
    assert payload["reason"] == "ServiceMiss"
    # denied call mutated nothing in the target table
    assert trace.world_after["database"]["db-b"] == {}


def test_denied_call_logged_with_verdict(artifacts):
    event = {"id": "9", "record": "evil", "forward": True,
             "operation": "invoke", "target": "function-b"}
    trace = run_fixture(artifacts["instrumented"]("invoke_bypass_a"), WORLD,
                        event, artifacts["env"])
    verdicts = [(entry["service"], entry["verdict"]) for entry in trace.call_log]
    assert ("database", "allow") in verdicts
    assert ("lambda", "deny") in verdicts


def test_log_completeness_matches_attempts(artifacts):
    event = {"payload": "x"}
    trace = run_fixture(artifacts["instrumented"]("upload_report"), WORLD,
                        event, artifacts["env"])
    assert len(trace.call_log) == 1  # exactly one SDK call on this path


def test_unset_env_fails_closed(artifacts):
    trace = run_fixture(artifacts["instrumented"]("env_missing"), WORLD, {}, {})
    assert trace.raised_error is not None
    assert trace.raised_error["payload"]["reason"] == "ResolutionFailure"


def test_load_error_is_distinct(tmp_path, artifacts):
    bad = tmp_path / "bad.py"
    bad.write_text("import does_not_exist_anywhere\n")
    with pytest.raises(LoadError):
        run_fixture(bad, {}, {})


def test_cli_run_emits_trace(artifacts, tmp_path):
    scenario = tmp_path / "scenario.json"
    scenario.write_text(json.dumps({
        "world": WORLD,
        "env": artifacts["env"],
        "event": {"payload": "hello"},
    }))
    proc = subprocess.run(
        [sys.executable, "-m", "sandbox_harness.cli", "run",
         str(artifacts["instrumented"]("upload_report")),
         "--scenario", str(scenario)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    trace = json.loads(proc.stdout)
    assert trace["raised_error"] is None
    assert trace["world_after"]["s3"]["user-bucket"]["report.csv"] == "hello"
