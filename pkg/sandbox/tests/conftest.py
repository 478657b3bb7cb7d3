"""Builds instrumented artifacts through the analyzer toolkit's CLI.

The harness consumes the toolkit only through its external interfaces: the
CLI and the instrumented-source / allowlist file contracts.
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[2]
CORPUS = REPO_ROOT / "tests" / "corpus"


def _slsguard(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "slsguard.cli", *args],
        capture_output=True, text=True, cwd=cwd,
    )
    return proc


def _write_config(workdir: Path, env: dict) -> Path:
    config = workdir / "slsguard.yaml"
    config.write_text(json.dumps({
        "targets": ["functions"],
        "output_dir": "out",
        "strict_env": False,
        "env": env,
    }))
    return config


BENCH_TEMPLATE = """import os

import boto3

s3 = boto3.client("s3")


def handler(event, context):
{body}    return {{"ok": True}}
"""


def _bench_source(calls: int) -> str:
    lines = "".join(
        f'    s3.put_object(Bucket=os.environ["BENCH_BUCKET"], Key="k{i}.txt", Body="x")\n'
        for i in range(calls)
    )
    return BENCH_TEMPLATE.format(body=lines)


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory):
    """Instrumented fixtures plus their originals, produced by the CLI."""
    workdir = tmp_path_factory.mktemp("sandbox-artifacts")
    functions = workdir / "functions"
    functions.mkdir()
    for name in ("invoke_bypass_a", "upload_report"):
        shutil.copy(CORPUS / "aws_python" / f"{name}.py", functions / f"{name}.py")
    (functions / "env_missing.py").write_text(
        "import os\n\nimport boto3\n\ns3 = boto3.client(\"s3\")\n\n\n"
        "def handler(event, context):\n"
        "    s3.put_object(Bucket=os.environ.get(\"UNSET_BUCKET\"), Key=\"c.json\", Body=\"x\")\n"
        "    return {\"ok\": True}\n"
    )
    for calls in (1, 5):
        (functions / f"bench_calls_{calls}.py").write_text(_bench_source(calls))
    env = {
        "DB_A": "db-a",
        "S3_NAME": "user-bucket",
        "BENCH_BUCKET": "bench-bucket",
    }
    config = _write_config(workdir, env)
    proc = _slsguard(["--config", str(config), "instrument"], cwd=workdir)
    assert proc.returncode == 0, proc.stderr
    out = workdir / "out"

    def instrumented(stem):
        return out / stem / f"{stem}.instrumented.py"

    def original(stem):
        return functions / f"{stem}.py"

    return {
        "workdir": workdir,
        "out": out,
        "instrumented": instrumented,
        "original": original,
        "env": env,
    }
