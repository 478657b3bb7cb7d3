"""Policy emission, validation lints, and authority equivalence."""

import json
from pathlib import Path

import pytest

from slsguard.allowlist import build_allowlist, diff_policy
from slsguard.emitter import (
    NamingConfig,
    emit_policy,
    load_policy,
    policy_from_dict,
    validate_policy,
)
from slsguard.errors import MissingNaming, UnparseablePolicy
from slsguard.evaluator import PolicyEvaluator, permits
from slsguard.extractor import ScopeLevel, extract_permissions
from slsguard.model import Language, SourceUnit, Vendor
from slsguard.registry import build_semantic_registry
from slsguard.rules import load_rules

CORPUS = Path(__file__).parent / "corpus"


def _pset_for(text, path="handler.py", language="python", vendor="aws",
              scope=ScopeLevel.ENTITY):
    unit = SourceUnit(path=Path(path), text=text,
                      language=Language(language), vendor=Vendor(vendor))
    rules = load_rules(unit.language, unit.vendor)
    reg = build_semantic_registry(unit, rules)
    pset, _ = extract_permissions(reg, rules, scope)
    return pset


FIG4_PY = (
    "import os\n"
    "import boto3\n"
    "s3 = boto3.client('s3')\n"
    "def handler(event, context):\n"
    "    s3.put_object(Bucket=os.environ['S3_NAME'], Key='report.csv', Body=event['b'])\n"
)


def test_aws_statement_shape():
    pset = _pset_for(FIG4_PY)
    doc = emit_policy(pset, Vendor.AWS)
    body = doc.body
    assert body["Version"] == "2012-10-17"
    assert len(body["Statement"]) == 1
    st = body["Statement"][0]
    assert st["Effect"] == "Allow"
    assert st["Action"] == ["s3:PutObject"]
    assert st["Resource"] == ["arn:aws:s3:::${S3_NAME}/report.csv"]
    assert validate_policy(doc, pset).ok


def test_emission_is_deterministic_and_idempotent():
    pset = _pset_for(FIG4_PY)
    doc1 = emit_policy(pset, Vendor.AWS)
    doc2 = emit_policy(pset, Vendor.AWS)
    assert doc1.canonical_json() == doc2.canonical_json()
    assert doc1.source_set_digest == pset.digest()


def test_empty_pset_policy_flagged():
    pset = _pset_for("import boto3\n")
    doc = emit_policy(pset, Vendor.AWS)
    assert doc.body["Statement"] == []
    assert doc.to_dict()["note"] == "no permissions required"
    assert validate_policy(doc, pset).ok


def test_wildcard_action_lint():
    pset = _pset_for(FIG4_PY)
    doc = emit_policy(pset, Vendor.AWS)
    doc.body["Statement"][0]["Action"] = ["s3:*"]
    report = validate_policy(doc)
    assert any("wildcard action" in e for e in report.errors)


def test_digest_staleness_warning():
    pset = _pset_for(FIG4_PY)
    doc = emit_policy(pset, Vendor.AWS)
    mutated = _pset_for(FIG4_PY.replace("report.csv", "other.csv"))
    report = validate_policy(doc, mutated)
    assert any("stale" in w for w in report.warnings)
    assert report.ok  # staleness is a warning, not an error


def test_missing_naming_raises():
    pset = _pset_for(
        "import os\nimport boto3\n"
        "db = boto3.resource('dynamodb')\n"
        "t = db.Table(os.environ['T'])\n"
        "def handler(event, context):\n"
        "    t.get_item(Key={'id': '1'})\n"
    )
    with pytest.raises(MissingNaming) as exc:
        emit_policy(pset, Vendor.AWS, NamingConfig({}))
    assert exc.value.key in ("region", "account")


def test_gcp_and_azure_bodies_validate():
    pset = _pset_for(FIG4_PY)
    for vendor in (Vendor.GCP, Vendor.AZURE):
        doc = emit_policy(pset, vendor)
        report = validate_policy(doc, pset)
        assert report.ok, report.errors


def test_unparseable_policy_file(tmp_path):
    bad = tmp_path / "x.policy.json"
    bad.write_text("{ not json")
    with pytest.raises(UnparseablePolicy):
        load_policy(bad)
    with pytest.raises(UnparseablePolicy):
        policy_from_dict({"vendor": "aws"})


def test_tri_vendor_authority_equivalence_fig4():
    pset = _pset_for(FIG4_PY)
    evaluator = PolicyEvaluator()
    triples = {}
    for vendor in (Vendor.AWS, Vendor.GCP, Vendor.AZURE):
        doc = emit_policy(pset, vendor)
        triples[vendor] = evaluator.doc_triples(doc)
    assert triples[Vendor.AWS] == triples[Vendor.GCP] == triples[Vendor.AZURE]
    assert triples[Vendor.AWS] == pset.triples()
    assert evaluator.equivalent(triples[Vendor.AWS], pset.triples())


def test_policy_evaluator_round_trip_inversion():
    pset = _pset_for(FIG4_PY)
    evaluator = PolicyEvaluator()
    doc = emit_policy(pset, Vendor.AWS)
    triples = evaluator.doc_triples(doc)
    assert triples == {("s3", "${S3_NAME}/report.csv", "s3:PutObject")}
    assert permits(triples, "s3", "${S3_NAME}/report.csv", "s3:PutObject")
    assert not permits(triples, "s3", "other", "s3:PutObject")


def test_drift_round_trip_empty_over_corpus():
    evaluator = PolicyEvaluator()
    checked = 0
    for manifest_path in sorted(CORPUS.rglob("*.manifest.json")):
        manifest = json.loads(manifest_path.read_text())
        stem = manifest_path.name[: -len(".manifest.json")]
        source = next(p for p in manifest_path.parent.glob(stem + ".*")
                      if p.suffix in (".py", ".js", ".go"))
        vendor_name, language_name = manifest_path.parent.name.split("_")
        unit = SourceUnit.load(source)
        unit.language = Language(language_name)
        unit.vendor = Vendor(vendor_name)
        rules = load_rules(unit.language, unit.vendor)
        reg = build_semantic_registry(unit, rules)
        pset, _ = extract_permissions(reg, rules, ScopeLevel.ENTITY)
        allow = build_allowlist(pset, manifest["env"], strict=False)
        doc = emit_policy(pset, unit.vendor)
        report = diff_policy(doc, allow, evaluator)
        assert report.clean, (source, report.to_dict())
        checked += 1
    assert checked >= 60
