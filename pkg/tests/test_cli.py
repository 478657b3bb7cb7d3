"""CLI pipeline: exit codes, artifact tree, determinism, reanalysis."""

import hashlib
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest
import yaml

from slsguard.cli import main

CORPUS = Path(__file__).parent / "corpus"


def _write_config(tmp_path, targets, output_dir, **extra):
    config = {
        "targets": [str(t) for t in targets],
        "output_dir": str(output_dir),
        "strict_env": False,
        **extra,
    }
    path = tmp_path / "slsguard.yaml"
    path.write_text(yaml.safe_dump(config))
    return path


def _tree_digest(root: Path) -> dict[str, str]:
    out = {}
    for path in sorted(root.rglob("*")):
        if path.is_file():
            out[str(path.relative_to(root))] = hashlib.sha256(path.read_bytes()).hexdigest()
    return out


@pytest.fixture
def static_corpus(tmp_path):
    """A corpus copy holding only statically-resolvable aws_python fixtures."""
    src = tmp_path / "functions"
    src.mkdir()
    for name in ("upload_report", "fetch_config", "notify_topic"):
        shutil.copy(CORPUS / "aws_python" / f"{name}.py", src / f"{name}.py")
    return src


def test_analyze_all_static_exits_zero(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out)
    assert main(["--config", str(config), "analyze"]) == 0
    pset = json.loads((out / "upload_report" / "permissions.json").read_text())
    assert pset["scope"] == "entity-level"
    assert (out / "manifest.json").is_file()


def test_analyze_with_dynamic_fixture_exits_two(tmp_path, static_corpus):
    shutil.copy(CORPUS / "aws_python" / "dynamic_bucket.py",
                static_corpus / "dynamic_bucket.py")
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out)
    assert main(["--config", str(config), "analyze"]) == 2
    pset = json.loads((out / "dynamic_bucket" / "permissions.json").read_text())
    assert pset["fallbacks"]


def test_empty_target_list_is_usage_error(tmp_path):
    config = _write_config(tmp_path, [], tmp_path / "out")
    assert main(["--config", str(config), "analyze"]) == 64


def test_emit_writes_validated_policies(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out)
    assert main(["--config", str(config), "analyze"]) == 0
    assert main(["--config", str(config), "emit"]) == 0
    policy = json.loads((out / "upload_report" / "upload_report.aws.policy.json").read_text())
    assert policy["vendor"] == "aws"
    assert policy["body"]["Statement"]


def test_emit_tri_vendor(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out)
    main(["--config", str(config), "analyze"])
    assert main(["--config", str(config), "emit", "--vendors", "aws,gcp,azure"]) == 0
    for vendor in ("aws", "gcp", "azure"):
        assert (out / "fetch_config" / f"fetch_config.{vendor}.policy.json").is_file()


def test_instrument_writes_artifacts(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out,
                           env={"S3_NAME": "user-bucket", "ORDER_TOPIC": "orders"})
    assert main(["--config", str(config), "instrument"]) == 0
    inst = out / "upload_report" / "upload_report.instrumented.py"
    assert inst.is_file()
    assert "slsguard:instrumented:v1" in inst.read_text()
    assert (out / "upload_report" / "upload_report.allowlist.json").is_file()


def test_instrument_already_instrumented_exits_two(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out)
    assert main(["--config", str(config), "instrument"]) == 0
    inst = out / "upload_report" / "upload_report.instrumented.py"
    target = tmp_path / "functions2"
    target.mkdir()
    shutil.copy(inst, target / "upload_report.py")
    coninvoke_bypass = _write_config(tmp_path, [target], tmp_path / "out2")
    assert main(["--config", str(coninvoke_bypass), "instrument"]) == 2


def test_instrument_go_azure_unsupported(tmp_path):
    target = tmp_path / "fn"
    target.mkdir()
    (target / "main.go").write_text("package main\n\nfunc Handler() error {\n\treturn nil\n}\n")
    config = _write_config(tmp_path, [target], tmp_path / "out",
                           vendor_override="azure")
    assert main(["--config", str(config), "instrument"]) == 2


def test_diff_clean_and_drifted(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out,
                           env={"S3_NAME": "user-bucket", "ORDER_TOPIC": "orders"})
    main(["--config", str(config), "analyze"])
    main(["--config", str(config), "emit"])
    live = out / "upload_report" / "upload_report.aws.policy.json"
    assert main(["--config", str(config), "diff", str(live)]) == 0

    doc = json.loads(live.read_text())
    doc["body"]["Statement"].append({
        "Sid": "Sneaky", "Effect": "Allow",
        "Action": ["lambda:InvokeFunction"],
        "Resource": ["arn:aws:lambda:us-east-1:123456789012:function:*"],
    })
    drifted = tmp_path / "drifted.policy.json"
    drifted.write_text(json.dumps(doc, indent=2))
    assert main(["--config", str(config), "diff", str(drifted)]) == 3


def test_emit_missing_naming_exits_two(tmp_path, static_corpus, capsys):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out,
                           naming={"account": "1", "region": "us-east-1"})
    main(["--config", str(config), "analyze"])
    assert main(["--config", str(config), "emit", "--vendors", "azure"]) == 2
    assert "subscription" in capsys.readouterr().err


def test_diff_truncated_policy_exits_two(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out)
    main(["--config", str(config), "analyze"])
    broken = tmp_path / "broken.policy.json"
    broken.write_text('{"vendor": "aws", "body"')
    assert main(["--config", str(config), "diff", str(broken)]) == 2


def test_pipeline_determinism_over_corpus(tmp_path):
    """Two full runs over the unchanged corpus give identical output trees."""
    digests = []
    for run in ("run1", "run2"):
        out = tmp_path / run
        config = _write_config(tmp_path, [CORPUS], out)
        main(["--config", str(config), "analyze"])
        main(["--config", str(config), "emit", "--vendors", "aws,gcp,azure"])
        main(["--config", str(config), "instrument"])
        digests.append(_tree_digest(out))
    assert digests[0] == digests[1]


def test_reanalyze_touches_only_changed(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out)
    main(["--config", str(config), "analyze"])
    main(["--config", str(config), "emit"])
    before = _tree_digest(out)
    before_mtimes = {p: p.stat().st_mtime_ns for p in sorted(out.rglob("*")) if p.is_file()}

    assert main(["--config", str(config), "reanalyze"]) == 0
    assert _tree_digest(out) == before
    after_mtimes = {p: p.stat().st_mtime_ns for p in sorted(out.rglob("*")) if p.is_file()}
    assert after_mtimes == before_mtimes  # no writes at all

    # add a delete call to one function: its artifacts change, others do not
    target = static_corpus / "upload_report.py"
    target.write_text(target.read_text().replace(
        's3.put_object(Bucket=os.environ["S3_NAME"], Key="report.csv", Body=body)',
        's3.put_object(Bucket=os.environ["S3_NAME"], Key="report.csv", Body=body)\n'
        '    s3.delete_object(Bucket=os.environ["S3_NAME"], Key="stale.csv")',
    ))
    assert main(["--config", str(config), "reanalyze"]) == 0
    pset = json.loads((out / "upload_report" / "permissions.json").read_text())
    actions = {r["action"] for r in pset["requirements"]}
    assert "s3:DeleteObject" in actions
    after = _tree_digest(out)
    changed = {k for k in before if before[k] != after.get(k)}
    assert all(k.startswith("upload_report") or k == "manifest.json" for k in changed)
    untouched = {k for k in before if not k.startswith("upload_report") and k != "manifest.json"}
    assert all(before[k] == after[k] for k in untouched)


def test_console_script_entry_point(tmp_path, static_corpus):
    out = tmp_path / "out"
    config = _write_config(tmp_path, [static_corpus], out)
    proc = subprocess.run(
        [sys.executable, "-m", "slsguard.cli", "--config", str(config), "analyze"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
