"""Policy drift detection."""

from pathlib import Path

from slsguard.allowlist import build_allowlist, diff_policy
from slsguard.emitter import emit_policy
from slsguard.extractor import ScopeLevel, extract_permissions
from slsguard.model import Language, SourceUnit, Vendor
from slsguard.registry import build_semantic_registry
from slsguard.rules import load_rules

CORPUS = Path(__file__).parent / "corpus"


def _analysis(path):
    vendor_name, language_name = Path(path).parent.name.split("_")
    unit = SourceUnit.load(path)
    unit.language = Language(language_name)
    unit.vendor = Vendor(vendor_name)
    rules = load_rules(unit.language, unit.vendor)
    reg = build_semantic_registry(unit, rules)
    pset, _ = extract_permissions(reg, rules, ScopeLevel.ENTITY)
    return unit, rules, pset


def test_excess_grant_detected():
    _, _, pset = _analysis(CORPUS / "aws_python" / "upload_report.py")
    allow = build_allowlist(pset, {"S3_NAME": "user-bucket"})
    live = emit_policy(pset, Vendor.AWS)
    live.body["Statement"].append({
        "Sid": "Extra",
        "Effect": "Allow",
        "Action": ["s3:GetObject", "s3:PutObject"],
        "Resource": ["arn:aws:s3:::user-bucket/*"],
    })
    report = diff_policy(live, allow)
    assert ("s3", "user-bucket/*", "s3:GetObject") in report.excess
    assert ("s3", "user-bucket/*", "s3:PutObject") in report.excess
    assert report.missing == []


def test_round_trip_identity_is_clean():
    _, _, pset = _analysis(CORPUS / "aws_python" / "upload_report.py")
    allow = build_allowlist(pset, {"S3_NAME": "user-bucket"})
    live = emit_policy(pset, Vendor.AWS)
    assert diff_policy(live, allow).clean


def test_wildcard_invoke_grant_is_excess():
    """The over-permission scenario: a live policy grants wildcard function
    invocation to a function whose code never invokes functions."""
    _, _, pset = _analysis(CORPUS / "aws_python" / "invoke_bypass_a.py")
    actions = {r.action for r in pset.requirements}
    assert not any(a.startswith("lambda:") for a in actions)
    allow = build_allowlist(pset, {"DB_A": "db-a"})
    live = emit_policy(pset, Vendor.AWS)
    live.body["Statement"].append({
        "Sid": "OverPermissive",
        "Effect": "Allow",
        "Action": ["lambda:InvokeFunction"],
        "Resource": ["arn:aws:lambda:us-east-1:123456789012:function:*"],
    })
    report = diff_policy(live, allow)
    assert report.excess == [("lambda", "*", "lambda:InvokeFunction")]
    assert report.missing == []


def test_excess_and_missing_disjoint():
    # branch_paths grants two distinct resources, so dropping one statement
    # leaves a grant missing from the live policy
    _, _, pset = _analysis(CORPUS / "aws_python" / "branch_paths.py")
    allow = build_allowlist(pset, {})
    live = emit_policy(pset, Vendor.AWS)
    assert len(live.body["Statement"]) == 2
    live.body["Statement"] = live.body["Statement"][:1]
    report = diff_policy(live, allow)
    assert set(report.excess).isdisjoint(set(report.missing))
    assert report.missing  # the dropped grant shows up as missing


def test_env_snapshot_normalization():
    """Symbolic ${ENV} tokens in the live policy compare equal to the
    snapshot-substituted allowlist."""
    _, _, pset = _analysis(CORPUS / "aws_python" / "notify_topic.py")
    allow = build_allowlist(pset, {"ORDER_TOPIC": "orders"})
    assert "orders" in str(allow.entries)
    live = emit_policy(pset, Vendor.AWS)  # carries ${ORDER_TOPIC}
    assert diff_policy(live, allow).clean
