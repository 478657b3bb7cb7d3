"""Per-call hook overhead microbenchmark.

Compares instrumented against uninstrumented executions of the same fixture
on identical inputs and reports the added time per verified call. This
bounds hook cost only; real cloud-side effects are out of reach at desk
scale.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass

from .runner import run_fixture


@dataclass
class OverheadStats:
    calls_per_invocation: int
    invocations: int
    median_ns: float
    p99_ns: float
    median_base_ns: float

    def to_dict(self):
        return {
            "calls_per_invocation": self.calls_per_invocation,
            "invocations": self.invocations,
            "median_added_ns_per_call": self.median_ns,
            "p99_added_ns_per_call": self.p99_ns,
            "median_baseline_ns_per_invocation": self.median_base_ns,
        }


def _percentile(samples, q):
    ordered = sorted(samples)
    index = min(len(ordered) - 1, max(0, int(round(q * (len(ordered) - 1)))))
    return ordered[index]


def bench_hook_overhead(instrumented_path, original_path, world: dict,
                        input_event: dict, env: dict | None = None,
                        n_calls: int = 1000,
                        calls_per_invocation: int = 1) -> OverheadStats:
    """Median and p99 added time per verified call, instrumented versus
    the uninstrumented fixture on identical inputs."""
    if n_calls < 1000:
        raise ValueError("n_calls must be >= 1000")
    invocations = max(1, n_calls // max(1, calls_per_invocation))
    # warm both paths (imports, JIT-ish dict caches) before measuring
    run_fixture(instrumented_path, world, input_event, env, repeat=50)
    run_fixture(original_path, world, input_event, env, repeat=50)
    instrumented = run_fixture(instrumented_path, world, input_event, env,
                               repeat=invocations)
    baseline = run_fixture(original_path, world, input_event, env,
                           repeat=invocations)
    base_median = statistics.median(baseline.timings_ns)
    per_call = [
        (t - base_median) / calls_per_invocation for t in instrumented.timings_ns
    ]
    return OverheadStats(
        calls_per_invocation=calls_per_invocation,
        invocations=invocations,
        median_ns=statistics.median(per_call),
        p99_ns=_percentile(per_call, 0.99),
        median_base_ns=base_median,
    )
