"""`sandbox run <fixture>` / `sandbox bench <fixture>`.

Scenario files describe the world seed, env values, and input event; traces
are emitted as JSON lines on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import bench_hook_overhead
from .runner import LoadError, run_fixture


def _load_scenario(path):
    if path is None:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sandbox",
        description="Execute instrumented fixtures against a mocked cloud SDK",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="invoke a fixture once and emit its trace")
    p_run.add_argument("fixture", help="instrumented source file")
    p_run.add_argument("--scenario", help="JSON with world/env/event", default=None)

    p_bench = sub.add_parser("bench", help="measure per-call hook overhead")
    p_bench.add_argument("fixture", help="instrumented source file")
    p_bench.add_argument("--original", required=True, help="uninstrumented source")
    p_bench.add_argument("--scenario", default=None)
    p_bench.add_argument("--calls", type=int, default=1000)
    p_bench.add_argument("--calls-per-invocation", type=int, default=1)

    args = parser.parse_args(argv)
    scenario = _load_scenario(args.scenario)
    world = scenario.get("world", {})
    env = scenario.get("env", {})
    event = scenario.get("event", {})
    try:
        if args.command == "run":
            trace = run_fixture(args.fixture, world, event, env)
            print(trace.to_json())
            return 0
        stats = bench_hook_overhead(args.fixture, args.original, world, event,
                                    env, n_calls=args.calls,
                                    calls_per_invocation=args.calls_per_invocation)
        print(json.dumps(stats.to_dict(), sort_keys=True))
        return 0
    except LoadError as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
