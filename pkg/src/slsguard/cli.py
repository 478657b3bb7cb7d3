"""Command-line pipeline: analyze, emit, instrument, diff, reanalyze.

All machine artifacts are canonical JSON under the output directory, one
subdirectory per function plus a manifest index; two runs over an unchanged
corpus produce byte-identical trees. Exit codes: 0 success, 2 degraded
(service-level fallback, per-function errors, unusable inputs), 3 drift
excess detected, 64 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

import jsonschema
import yaml

from .allowlist import build_allowlist, diff_policy, load_allowlist
from .emitter import NamingConfig, emit_policy, load_policy, validate_policy
from .errors import SlsGuardError, UsageError
from .evaluator import PolicyEvaluator
from .extractor import ScopeLevel, extract_permissions, permission_set_from_dict
from .integrator import inject_hooks, validate_reconstruction
from .lang.detect import identify_language, identify_vendor
from .model import SourceUnit, Vendor
from .registry import build_semantic_registry
from .rules import DATA_DIR, load_rules

EXIT_OK = 0
EXIT_DEGRADED = 2
EXIT_DRIFT = 3
EXIT_USAGE = 64

_SOURCE_SUFFIXES = (".py", ".js", ".mjs", ".cjs", ".go")


class ToolConfig:
    """Declarative configuration (YAML file merged with CLI flags)."""

    def __init__(self, data: dict, base_dir: Path):
        schema = json.loads((DATA_DIR / "schemas" / "config.schema.json").read_text())
        try:
            jsonschema.validate(data, schema)
        except jsonschema.ValidationError as exc:
            raise UsageError(f"config: {exc.message}")
        self.base_dir = base_dir
        self.targets = [base_dir / t for t in data.get("targets", [])]
        self.vendor_override = data.get("vendor_override")
        self.scope = ScopeLevel(data.get("scope", ScopeLevel.ENTITY.value))
        # an explicit naming section is taken as-is so absent identifiers
        # surface as MissingNaming; defaults apply only when the section
        # is omitted entirely
        if "naming" in data:
            self.naming = NamingConfig(dict(data["naming"]))
        else:
            self.naming = NamingConfig.defaults()
        self.rules_dir = base_dir / data["rules_dir"] if data.get("rules_dir") else None
        self.output_dir = base_dir / data.get("output_dir", "slsguard-out")
        self.strict_env = data.get("strict_env", True)
        self.env = dict(data.get("env", {}))
        self.instrument_mode = data.get("instrument_mode", "inline")

    @classmethod
    def load(cls, path: str | None, overrides: dict) -> "ToolConfig":
        data: dict = {}
        base = Path.cwd()
        if path:
            p = Path(path)
            if not p.is_file():
                raise UsageError(f"config file not found: {path}")
            data = yaml.safe_load(p.read_text()) or {}
            base = p.parent.resolve()
        for key, value in overrides.items():
            if value is not None:
                data[key] = value
        if overrides.get("targets"):
            data["targets"] = overrides["targets"]
        data.setdefault("targets", [])
        return cls(data, base)


def _resolve_targets(config: ToolConfig) -> list[Path]:
    out: list[Path] = []
    for target in config.targets:
        if target.is_dir():
            out.extend(sorted(
                p for p in target.rglob("*")
                if p.is_file() and p.suffix in _SOURCE_SUFFIXES
            ))
        elif target.is_file():
            out.append(target)
        else:
            raise UsageError(f"target not found: {target}")
    if not out:
        raise UsageError("no targets given")
    return out


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if path.exists() and path.read_text(encoding="utf-8") == text:
        return  # keep unchanged artifacts byte-identical and untouched
    path.write_text(text, encoding="utf-8")


def _canonical(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Manifest:
    def __init__(self, output_dir: Path):
        self.path = output_dir / "manifest.json"
        self.functions: dict[str, dict] = {}
        if self.path.is_file():
            doc = json.loads(self.path.read_text())
            self.functions = doc.get("functions", {})

    def update(self, stem: str, record: dict):
        merged = self.functions.get(stem, {})
        merged.update(record)
        self.functions[stem] = merged

    def save(self):
        doc = {"schema": "slsguard-manifest/1",
               "functions": dict(sorted(self.functions.items()))}
        _write(self.path, _canonical(doc))


def _prepare_unit(path: Path, config: ToolConfig) -> SourceUnit:
    unit = SourceUnit.load(path)
    identify_language(unit)
    if config.vendor_override:
        unit.vendor = Vendor(config.vendor_override)
    else:
        identify_vendor(unit)
    unit.check_supported()
    return unit


def _function_dir(config: ToolConfig, stem: str) -> Path:
    return config.output_dir / stem


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_analyze(config: ToolConfig, targets: list[Path] | None = None) -> int:
    targets = targets or _resolve_targets(config)
    manifest = Manifest(config.output_dir)
    errors: list[str] = []
    any_fallback = False
    for path in targets:
        stem = path.stem
        fn_dir = _function_dir(config, stem)
        try:
            unit = _prepare_unit(path, config)
            rules = load_rules(unit.language, unit.vendor, config.rules_dir) \
                if unit.vendor is not Vendor.UNKNOWN else None
            reg = build_semantic_registry(unit, rules)
            if rules is None:
                from .registry import _empty_ruleset
                rules = _empty_ruleset(unit.language)
            pset, findings = extract_permissions(reg, rules, config.scope)
            allow = build_allowlist(pset, config.env, strict=config.strict_env)
            _write(fn_dir / "permissions.json", pset.canonical_json())
            _write(fn_dir / "findings.jsonl",
                   "".join(f.to_json() + "\n" for f in findings))
            _write(fn_dir / "allowlist.json", allow.canonical_json())
            manifest.update(stem, {
                "source_path": str(path),
                "source_digest": _digest_text(unit.text),
                "language": unit.language.value,
                "vendor": unit.vendor.value,
                "language_signal": unit.language_signal,
                "scope": config.scope.value,
                "fallbacks": len(pset.fallbacks),
                "findings": len(findings),
            })
            if pset.fallbacks:
                any_fallback = True
        except SlsGuardError as exc:
            errors.append(f"{path}: {exc}")
    manifest.save()
    for line in errors:
        print(f"error: {line}", file=sys.stderr)
    if errors or any_fallback:
        return EXIT_DEGRADED
    return EXIT_OK


def _load_pset(config: ToolConfig, stem: str):
    pset_path = _function_dir(config, stem) / "permissions.json"
    if not pset_path.is_file():
        raise UsageError(f"no analysis artifact for {stem}; run analyze first")
    return permission_set_from_dict(json.loads(pset_path.read_text()))


def cmd_emit(config: ToolConfig, targets: list[Path] | None = None,
             vendors: list[str] | None = None) -> int:
    targets = targets or _resolve_targets(config)
    manifest = Manifest(config.output_dir)
    errors: list[str] = []
    for path in targets:
        stem = path.stem
        record = manifest.functions.get(stem)
        if record is None:
            errors.append(f"{path}: not analyzed yet")
            continue
        try:
            pset = _load_pset(config, stem)
            emit_vendors = vendors or [record["vendor"]]
            emitted = {}
            for vendor_name in emit_vendors:
                if vendor_name == Vendor.UNKNOWN.value:
                    continue
                vendor = Vendor(vendor_name)
                doc = emit_policy(pset, vendor, config.naming)
                report = validate_policy(doc, pset)
                if not report.ok:
                    raise SlsGuardError(
                        f"emitted {vendor.value} policy failed validation: {report.errors}")
                out = _function_dir(config, stem) / f"{stem}.{vendor.value}.policy.json"
                _write(out, doc.canonical_json())
                emitted[vendor.value] = _digest_text(doc.canonical_json())
            manifest.update(stem, {"policies": emitted})
        except SlsGuardError as exc:
            errors.append(f"{path}: {exc}")
    manifest.save()
    for line in errors:
        print(f"error: {line}", file=sys.stderr)
    return EXIT_DEGRADED if errors else EXIT_OK


def cmd_instrument(config: ToolConfig, targets: list[Path] | None = None) -> int:
    targets = targets or _resolve_targets(config)
    manifest = Manifest(config.output_dir)
    errors: list[str] = []
    for path in targets:
        stem = path.stem
        fn_dir = _function_dir(config, stem)
        try:
            unit = _prepare_unit(path, config)
            rules = load_rules(unit.language, unit.vendor, config.rules_dir)
            reg = build_semantic_registry(unit, rules)
            pset, _ = extract_permissions(reg, rules, config.scope)
            allow = build_allowlist(pset, config.env, strict=config.strict_env)
            inst = inject_hooks(unit, allow, config.instrument_mode, rules, reg)
            report = validate_reconstruction(unit, inst, rules)
            if not report.ok:
                raise SlsGuardError(f"reconstruction checks failed: {report.to_dict()}")
            out = fn_dir / f"{stem}.instrumented{path.suffix}"
            _write(out, inst.text)
            _write(fn_dir / f"{stem}.allowlist.json", allow.canonical_json())
            _write(fn_dir / f"{stem}.instrumented.meta.json", _canonical({
                "embedded_allowlist_ref": inst.embedded_allowlist_ref,
                "injected_regions": [list(r) for r in inst.injected_regions],
                "original_digest": inst.original_digest,
                "reconstruction": report.to_dict(),
            }))
            manifest.update(stem, {
                "instrumented": _digest_text(inst.text),
                "instrument_mode": config.instrument_mode,
            })
        except SlsGuardError as exc:
            errors.append(f"{path}: {exc}")
    manifest.save()
    for line in errors:
        print(f"error: {line}", file=sys.stderr)
    return EXIT_DEGRADED if errors else EXIT_OK


def cmd_diff(config: ToolConfig, live_policy_path: str, function: str | None = None) -> int:
    try:
        live = load_policy(live_policy_path)
    except SlsGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGRADED
    stem = function or live.function_id
    allow_path = _function_dir(config, stem) / "allowlist.json"
    if not allow_path.is_file():
        print(f"error: no allowlist artifact for {stem}; run analyze first",
              file=sys.stderr)
        return EXIT_DEGRADED
    try:
        allow = load_allowlist(allow_path)
        evaluator = PolicyEvaluator(config.naming)
        report = diff_policy(live, allow, evaluator)
    except SlsGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGRADED
    print(json.dumps(report.to_dict(), sort_keys=True, indent=2))
    _write(_function_dir(config, stem) / "drift.json",
           _canonical(report.to_dict()))
    if report.excess:
        return EXIT_DRIFT
    return EXIT_OK


def cmd_reanalyze(config: ToolConfig, targets: list[Path] | None = None) -> int:
    targets = targets or _resolve_targets(config)
    manifest = Manifest(config.output_dir)
    changed: list[Path] = []
    for path in targets:
        record = manifest.functions.get(path.stem)
        if record is None:
            changed.append(path)
            continue
        if record.get("source_digest") != _digest_text(path.read_text(encoding="utf-8")):
            changed.append(path)
    if not changed:
        print("reanalyze: no source changes detected")
        return EXIT_OK
    for path in changed:
        print(f"reanalyze: {path}")
    code = cmd_analyze(config, changed)
    emit_code = cmd_emit(config, changed)
    for path in changed:
        pset = _load_pset(config, path.stem)
        if not pset.requirements:
            print(f"warning: {path.stem} now requires no permissions", file=sys.stderr)
    return max(code, emit_code)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slsguard",
        description="Least-privilege extraction, policy generation, and "
                    "runtime allowlist enforcement for serverless functions",
    )
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--scope", choices=[s.value for s in ScopeLevel])
    parser.add_argument("--vendor", choices=[v.value for v in Vendor if v is not Vendor.UNKNOWN],
                        dest="vendor_override")
    parser.add_argument("--strict-env", action="store_true", default=None,
                        dest="strict_env")
    parser.add_argument("--no-strict-env", action="store_false", default=None,
                        dest="strict_env")
    parser.add_argument("--output", dest="output_dir")
    parser.add_argument("--rules-dir", dest="rules_dir")
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="extract permission sets")
    p_analyze.add_argument("targets", nargs="*")

    p_emit = sub.add_parser("emit", help="emit vendor policy documents")
    p_emit.add_argument("targets", nargs="*")
    p_emit.add_argument("--vendors", help="comma-separated vendor list")

    p_inst = sub.add_parser("instrument", help="inject verification hooks")
    p_inst.add_argument("targets", nargs="*")
    p_inst.add_argument("--mode", choices=["inline", "sidecar"], dest="instrument_mode")

    p_diff = sub.add_parser("diff", help="compare a live policy against the allowlist")
    p_diff.add_argument("live_policy")
    p_diff.add_argument("--function", help="function id (defaults to the policy's)")

    p_re = sub.add_parser("reanalyze", help="refresh artifacts for changed sources")
    p_re.add_argument("targets", nargs="*")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    overrides = {
        "scope": args.scope,
        "vendor_override": args.vendor_override,
        "strict_env": args.strict_env,
        "output_dir": args.output_dir,
        "rules_dir": args.rules_dir,
        "targets": getattr(args, "targets", None) or None,
        "instrument_mode": getattr(args, "instrument_mode", None),
    }
    try:
        config = ToolConfig.load(args.config, overrides)
        if args.command == "analyze":
            return cmd_analyze(config)
        if args.command == "emit":
            vendors = args.vendors.split(",") if args.vendors else None
            return cmd_emit(config, vendors=vendors)
        if args.command == "instrument":
            return cmd_instrument(config)
        if args.command == "diff":
            return cmd_diff(config, args.live_policy, args.function)
        if args.command == "reanalyze":
            return cmd_reanalyze(config)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
