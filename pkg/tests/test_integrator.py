"""Hook injection: reversibility, guard completeness, idempotence."""

import json
from pathlib import Path

import pytest

from slsguard.allowlist import build_allowlist
from slsguard.errors import AlreadyInstrumented, AnchorNotFound
from slsguard.extractor import ScopeLevel, extract_permissions
from slsguard.integrator import (
    SENTINEL,
    InstrumentedSource,
    inject_hooks,
    validate_reconstruction,
)
from slsguard.model import Language, SourceUnit, Vendor
from slsguard.registry import build_semantic_registry
from slsguard.rules import load_rules

CORPUS = Path(__file__).parent / "corpus"


def corpus_units():
    out = []
    for manifest_path in sorted(CORPUS.rglob("*.manifest.json")):
        stem = manifest_path.name[: -len(".manifest.json")]
        source = next(p for p in manifest_path.parent.glob(stem + ".*")
                      if p.suffix in (".py", ".js", ".go"))
        vendor_name, language_name = manifest_path.parent.name.split("_")
        manifest = json.loads(manifest_path.read_text())
        out.append(pytest.param(source, Language(language_name), Vendor(vendor_name),
                                manifest["env"],
                                id=f"{manifest_path.parent.name}/{stem}"))
    return out


def _instrument(source, language, vendor, env, mode="inline"):
    unit = SourceUnit.load(source)
    unit.language = language
    unit.vendor = vendor
    rules = load_rules(language, vendor)
    reg = build_semantic_registry(unit, rules)
    pset, _ = extract_permissions(reg, rules, ScopeLevel.ENTITY)
    allow = build_allowlist(pset, env, strict=False)
    inst = inject_hooks(unit, allow, mode, rules, reg)
    return unit, rules, inst, allow


@pytest.mark.parametrize("source,language,vendor,env", corpus_units())
def test_reversibility_and_guards(source, language, vendor, env):
    unit, rules, inst, _ = _instrument(source, language, vendor, env)
    report = validate_reconstruction(unit, inst, rules)
    assert report.ok, report.to_dict()
    assert inst.strip() == unit.text  # byte-exact


@pytest.mark.parametrize("source,language,vendor,env", corpus_units())
def test_double_injection_rejected(source, language, vendor, env):
    unit, rules, inst, allow = _instrument(source, language, vendor, env)
    reinjected = SourceUnit(path=unit.path, text=inst.text,
                            language=language, vendor=vendor)
    with pytest.raises(AlreadyInstrumented):
        inject_hooks(reinjected, allow, "inline", rules)


@pytest.mark.parametrize("source,language,vendor,env", corpus_units())
def test_template_determinism(source, language, vendor, env):
    _, _, first, _ = _instrument(source, language, vendor, env)
    _, _, second, _ = _instrument(source, language, vendor, env)
    assert first.text == second.text
    assert first.injected_regions == second.injected_regions


def test_sidecar_mode_references_file():
    source = CORPUS / "aws_python" / "upload_report.py"
    _, _, inst, _ = _instrument(source, Language.PYTHON, Vendor.AWS,
                                {"S3_NAME": "user-bucket"}, mode="sidecar")
    assert inst.embedded_allowlist_ref == "upload_report.allowlist.json"
    assert "upload_report.allowlist.json" in inst.text


def test_zero_sdk_function_gets_noop_preamble(tmp_path):
    path = tmp_path / "plain.py"
    path.write_text("import json\n\n\ndef handler(event, context):\n    return event\n")
    unit = SourceUnit.load(path)
    unit.language = Language.PYTHON
    unit.vendor = Vendor.AWS
    rules = load_rules(Language.PYTHON, Vendor.AWS)
    reg = build_semantic_registry(unit, rules)
    pset, _ = extract_permissions(reg, rules, ScopeLevel.ENTITY)
    allow = build_allowlist(pset, {})
    inst = inject_hooks(unit, allow, "inline", rules, reg)
    assert SENTINEL in inst.text
    assert inst.strip() == unit.text
    report = validate_reconstruction(unit, inst, rules)
    assert report.ok


def test_go_without_package_has_no_anchor():
    unit = SourceUnit(path=Path("x.go"), text="// just a comment\n",
                      language=Language.GO, vendor=Vendor.AWS)
    rules = load_rules(Language.GO, Vendor.AWS)
    from slsguard.allowlist import AllowList
    with pytest.raises(AnchorNotFound):
        inject_hooks(unit, AllowList("x", "d", {}), "inline", rules)


def test_mutation_deleted_wrap_fails_guard_check():
    source = CORPUS / "aws_python" / "upload_report.py"
    unit, rules, inst, _ = _instrument(source, Language.PYTHON, Vendor.AWS,
                                       {"S3_NAME": "user-bucket"})
    mutated_text = inst.text.replace('_slsguard_wrap(boto3.client("s3"), "s3")',
                                     'boto3.client("s3")')
    assert mutated_text != inst.text
    mutated = InstrumentedSource(
        text=mutated_text,
        injected_regions=[],  # strip check will also fail; we inspect guards
        embedded_allowlist_ref=inst.embedded_allowlist_ref,
        original_digest=inst.original_digest,
        language=inst.language,
        path=inst.path,
    )
    report = validate_reconstruction(unit, mutated, rules)
    assert not report.checks["calls_guarded"]
    assert "put_object" in report.details["calls_guarded"]


def test_mutation_one_byte_strip_mismatch():
    source = CORPUS / "aws_python" / "fetch_config.py"
    unit, rules, inst, _ = _instrument(source, Language.PYTHON, Vendor.AWS, {})
    tampered = InstrumentedSource(
        text=inst.text.replace("app-config", "app-confiq"),
        injected_regions=inst.injected_regions,
        embedded_allowlist_ref=inst.embedded_allowlist_ref,
        original_digest=inst.original_digest,
        language=inst.language,
        path=inst.path,
    )
    report = validate_reconstruction(unit, tampered, rules)
    assert not report.checks["strip_reverses"]
    assert "mismatch" in report.details["strip_reverses"]


def test_go_mutation_deleted_verify_line_fails_guard_check():
    source = CORPUS / "aws_go" / "put_report.go"
    unit, rules, inst, _ = _instrument(source, Language.GO, Vendor.AWS,
                                       {"REPORT_BUCKET": "reports"})
    lines = [l for l in inst.text.split("\n")
             if '_slsguardVerify("s3", "s3:PutObject"' not in l]
    mutated = InstrumentedSource(
        text="\n".join(lines),
        injected_regions=[],
        embedded_allowlist_ref=inst.embedded_allowlist_ref,
        original_digest=inst.original_digest,
        language=inst.language,
        path=inst.path,
    )
    report = validate_reconstruction(unit, mutated, rules)
    assert not report.checks["calls_guarded"]
