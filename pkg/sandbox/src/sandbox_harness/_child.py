"""Subprocess entry: run one fixture invocation inside a mocked world.

Reads a scenario JSON path from argv, prints a result JSON to stdout.
Isolation is per process so a crashing fixture cannot poison the harness.
"""

from __future__ import annotations

import importlib.util
import json
import os
import sys
import time
import traceback

from sandbox_harness.world import MockServiceWorld, install_mock_sdk


def _load_module(path):
    spec = importlib.util.spec_from_file_location("fixture_under_test", path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def _find_handler(module):
    for name in ("handler", "main", "Handler"):
        fn = getattr(module, name, None)
        if callable(fn):
            return fn
    raise AttributeError("no handler/main callable in fixture")


def run(scenario):
    os.environ.update(scenario.get("env", {}))
    world = MockServiceWorld(scenario.get("world", {}))
    install_mock_sdk(world)

    try:
        module = _load_module(scenario["module_path"])
        handler = _find_handler(module)
    except Exception:
        return {"load_error": traceback.format_exc(limit=3)}

    event = scenario.get("event", {})
    repeat = int(scenario.get("repeat", 1))
    timings_ns = []
    output = None
    raised = None
    for _ in range(repeat):
        started = time.perf_counter_ns()
        try:
            output = handler(event, None)
        except Exception as exc:
            payload = getattr(exc, "payload", None)
            raised = {
                "type": type(exc).__name__,
                "message": str(exc),
                "payload": payload,
            }
            if payload:
                world.log(payload.get("service", "?"),
                          payload.get("action", "?"),
                          payload.get("resource"),
                          "deny", payload.get("reason", "?"))
            timings_ns.append(time.perf_counter_ns() - started)
            break
        timings_ns.append(time.perf_counter_ns() - started)
    return {
        "output": output,
        "raised_error": raised,
        "world": world.services,
        "call_log": world.call_log,
        "timings_ns": timings_ns,
    }


def main():
    scenario = json.loads(open(sys.argv[1], encoding="utf-8").read())
    result = run(scenario)
    json.dump(result, sys.stdout, default=str)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
