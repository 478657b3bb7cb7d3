"""Fixture execution against the mocked world, one subprocess per run."""

from __future__ import annotations

import json
import subprocess
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path


class LoadError(Exception):
    """Fixture failed to import (distinct from in-function denials)."""


@dataclass
class ExecutionTrace:
    fixture_id: str
    input_event: dict
    output: object
    raised_error: dict | None
    call_log: list
    world_after: dict
    timings_ns: list[int] = field(default_factory=list)

    @property
    def denied(self) -> bool:
        return self.raised_error is not None and \
            (self.raised_error.get("payload") or {}).get("reason") is not None

    def to_json(self) -> str:
        return json.dumps({
            "fixture_id": self.fixture_id,
            "input_event": self.input_event,
            "output": self.output,
            "raised_error": self.raised_error,
            "call_log": self.call_log,
            "world_after": self.world_after,
            "timings_ns": self.timings_ns,
        }, sort_keys=True, default=str)


def _spawn(scenario: dict, timeout: float = 120.0) -> dict:
    with tempfile.NamedTemporaryFile("w", suffix=".scenario.json",
                                     delete=False) as handle:
        json.dump(scenario, handle)
        scenario_path = handle.name
    try:
        proc = subprocess.run(
            [sys.executable, "-m", "sandbox_harness._child", scenario_path],
            capture_output=True, text=True, timeout=timeout,
        )
    finally:
        Path(scenario_path).unlink(missing_ok=True)
    if proc.returncode != 0:
        raise LoadError(f"fixture subprocess failed: {proc.stderr.strip()[:2000]}")
    try:
        return json.loads(proc.stdout)
    except json.JSONDecodeError:
        raise LoadError(f"fixture produced no result: {proc.stdout[:500]!r}")


def run_fixture(instrumented_path, world: dict, input_event: dict,
                env: dict | None = None, repeat: int = 1) -> ExecutionTrace:
    """Load the function with the mock SDK bound in place of the real one,
    invoke the handler, and record every SDK call and verdict."""
    path = Path(instrumented_path)
    scenario = {
        "module_path": str(path),
        "world": world,
        "event": input_event,
        "env": env or {},
        "repeat": repeat,
    }
    result = _spawn(scenario)
    if "load_error" in result:
        raise LoadError(result["load_error"])
    return ExecutionTrace(
        fixture_id=path.stem,
        input_event=input_event,
        output=result.get("output"),
        raised_error=result.get("raised_error"),
        call_log=result.get("call_log", []),
        world_after=result.get("world", {}),
        timings_ns=result.get("timings_ns", []),
    )
