"""Rule data loading and validation.

All vendor/language knowledge lives in versioned JSON files under
rules_data/: one file per language-vendor pair (SDK imports, client
construction patterns, binder methods, method-to-action mapping rules),
plus shared service metadata (resource slots, per-vendor resource grammars)
and the unified action rendering table. Files are validated against the
schemas shipped next to them, then cross-checked for referential integrity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import jsonschema

from .errors import RuleError
from .model import Language, Vendor

DATA_DIR = Path(__file__).parent / "rules_data"

SUPPORTED_PAIRS = [
    (Language.JAVASCRIPT, Vendor.AWS),
    (Language.PYTHON, Vendor.AWS),
    (Language.GO, Vendor.AWS),
    (Language.JAVASCRIPT, Vendor.GCP),
    (Language.PYTHON, Vendor.GCP),
    (Language.GO, Vendor.GCP),
    (Language.JAVASCRIPT, Vendor.AZURE),
    (Language.PYTHON, Vendor.AZURE),
]


@dataclass(frozen=True)
class ClientPattern:
    """How one SDK client kind is constructed in a given language."""

    module: str
    member: str
    service: str | None = None
    service_from_arg: int | None = None
    service_canon: dict[str, str] = field(default_factory=dict)
    factories: tuple[str, ...] = ()


@dataclass(frozen=True)
class ActionMappingRule:
    """Translates one (vendor, service, method) call into IAM actions."""

    vendor: Vendor
    service: str
    method: str
    actions: tuple[str, ...]
    resource_params: tuple[str, ...]
    wildcard_required: bool = False
    positional: tuple[str, ...] = ()
    param_aliases: dict[str, str] = field(default_factory=dict)

    @property
    def key(self):
        return (self.service, self.method)


@dataclass(frozen=True)
class ServiceInfo:
    """Vendor-neutral service metadata shared by all rule files."""

    name: str
    slots: tuple[str, ...]
    aliases: dict[str, str]
    join: str
    requires_resource_extraction: bool
    render: dict[str, str]  # vendor -> resource path prefix grammar
    notes: str = ""

    def slot_of(self, param_name: str) -> str | None:
        """Map a raw parameter name to its resource slot, if any."""
        if param_name in self.slots:
            return param_name
        return self.aliases.get(param_name)


@dataclass(frozen=True)
class ActionRendering:
    canonical: str
    aws: str
    gcp: str
    azure: str
    azure_kind: str

    def for_vendor(self, vendor: Vendor) -> str:
        return {Vendor.AWS: self.aws, Vendor.GCP: self.gcp, Vendor.AZURE: self.azure}[vendor]


@dataclass
class RuleSet:
    """Loaded, validated rules for one language-vendor pair."""

    language: Language
    vendor: Vendor
    sdk_modules: tuple[str, ...]
    unwrap: tuple[str, ...]
    clients: tuple[ClientPattern, ...]
    binders: dict[str, dict[str, str]]  # service -> method -> slot
    rules: dict[tuple[str, str], ActionMappingRule]  # (service, method) -> rule
    services: dict[str, ServiceInfo]
    actions: dict[str, ActionRendering]

    def rule_for(self, service: str, method: str) -> ActionMappingRule | None:
        return self.rules.get((service, method))

    def binder_slot(self, service: str, method: str) -> str | None:
        return self.binders.get(service, {}).get(method)

    def module_is_sdk(self, module: str) -> bool:
        return any(module == m or module.startswith(m) for m in self.sdk_modules)


def _load_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise RuleError(f"rule file not found: {path}")
    except json.JSONDecodeError as exc:
        raise RuleError(f"rule file {path} is not valid JSON: {exc}")


@lru_cache(maxsize=None)
def _schema(name: str):
    return _load_json(DATA_DIR / "schemas" / name)


def _validate(doc, schema_name: str, path: Path):
    try:
        jsonschema.validate(doc, _schema(schema_name))
    except jsonschema.ValidationError as exc:
        raise RuleError(f"{path}: schema violation at {list(exc.absolute_path)}: {exc.message}")


_services_cache: dict[str, dict[str, ServiceInfo]] = {}
_actions_cache: dict[str, dict[str, "ActionRendering"]] = {}


def load_services(rules_dir: Path | None = None) -> dict[str, ServiceInfo]:
    base = Path(rules_dir) if rules_dir else DATA_DIR
    cached = _services_cache.get(str(base))
    if cached is not None:
        return cached
    path = base / "services.json"
    doc = _load_json(path)
    _validate(doc, "services.schema.json", path)
    out = {}
    for name, info in doc["services"].items():
        out[name] = ServiceInfo(
            name=name,
            slots=tuple(info["slots"]),
            aliases=dict(info["aliases"]),
            join=info["join"],
            requires_resource_extraction=info["requires_resource_extraction"],
            render=dict(info["render"]),
            notes=info["notes"],
        )
    _services_cache[str(base)] = out
    return out


def load_actions(rules_dir: Path | None = None) -> dict[str, ActionRendering]:
    base = Path(rules_dir) if rules_dir else DATA_DIR
    cached = _actions_cache.get(str(base))
    if cached is not None:
        return cached
    path = base / "actions.json"
    doc = _load_json(path)
    _validate(doc, "actions.schema.json", path)
    out = {}
    for canonical, r in doc["actions"].items():
        out[canonical] = ActionRendering(
            canonical=canonical, aws=r["aws"], gcp=r["gcp"], azure=r["azure"],
            azure_kind=r["azure_kind"],
        )
    for vendor in ("aws", "gcp", "azure"):
        seen: dict[str, str] = {}
        for canonical, r in out.items():
            rendered = getattr(r, vendor)
            if rendered in seen:
                raise RuleError(
                    f"{path}: {vendor} rendering {rendered!r} maps from both "
                    f"{seen[rendered]!r} and {canonical!r} (must be injective)"
                )
            seen[rendered] = canonical
    _actions_cache[str(base)] = out
    return out


_rules_cache: dict[tuple[str, str, str], RuleSet] = {}


def load_rules(language: Language, vendor: Vendor, rules_dir: Path | None = None) -> RuleSet:
    """Load and cross-validate the rule set for one language-vendor pair."""
    if (language, vendor) not in SUPPORTED_PAIRS:
        raise RuleError(f"no rule set for {language.value}+{vendor.value}")
    base = Path(rules_dir) if rules_dir else DATA_DIR
    cache_key = (language.value, vendor.value, str(base))
    cached = _rules_cache.get(cache_key)
    if cached is not None:
        return cached
    path = base / f"{vendor.value}.{language.value}.json"
    doc = _load_json(path)
    _validate(doc, "rules.schema.json", path)
    if doc["vendor"] != vendor.value or doc["language"] != language.value:
        raise RuleError(f"{path}: vendor/language fields do not match the file name")

    services = load_services(rules_dir)
    actions = load_actions(rules_dir)

    clients = tuple(
        ClientPattern(
            module=c["module"],
            member=c["member"],
            service=c.get("service"),
            service_from_arg=c.get("service_from_arg"),
            service_canon=dict(c.get("service_canon", {})),
            factories=tuple(c.get("factories", ())),
        )
        for c in doc["clients"]
    )
    rules: dict[tuple[str, str], ActionMappingRule] = {}
    for service, methods in doc["methods"].items():
        if service not in services:
            raise RuleError(f"{path}: unknown service {service!r} (not in services.json)")
        info = services[service]
        for method, spec in methods.items():
            rule = ActionMappingRule(
                vendor=vendor,
                service=service,
                method=method,
                actions=tuple(spec["actions"]),
                resource_params=tuple(spec["resource_params"]),
                wildcard_required=spec.get("wildcard_required", False),
                positional=tuple(spec.get("positional", ())),
                param_aliases=dict(spec.get("param_aliases", {})),
            )
            if rule.key in rules:
                raise RuleError(f"{path}: duplicate rule key {rule.key}")
            for action in rule.actions:
                if action not in actions:
                    raise RuleError(f"{path}: action {action!r} missing from actions.json")
            for p in rule.resource_params:
                if info.slot_of(p) is None:
                    raise RuleError(
                        f"{path}: resource param {p!r} of {service}.{method} maps to no "
                        f"slot of service {service!r}"
                    )
            rules[rule.key] = rule
    for service, methods in doc["binders"].items():
        if service not in services:
            raise RuleError(f"{path}: binder service {service!r} not in services.json")
    for cp in clients:
        if cp.service is not None and cp.service not in services:
            raise RuleError(f"{path}: client service {cp.service!r} not in services.json")
        for svc in cp.service_canon.values():
            if svc not in services:
                raise RuleError(f"{path}: canonical service {svc!r} not in services.json")

    ruleset = RuleSet(
        language=language,
        vendor=vendor,
        sdk_modules=tuple(doc["sdk_modules"]),
        unwrap=tuple(doc.get("unwrap", ())),
        clients=clients,
        binders={s: dict(m) for s, m in doc["binders"].items()},
        rules=rules,
        services=services,
        actions=actions,
    )
    _rules_cache[cache_key] = ruleset
    return ruleset


def rulesets_for_language(language: Language, rules_dir: Path | None = None) -> list[RuleSet]:
    """All vendor rule sets available for a language (vendor identification)."""
    out = []
    for lang, vendor in SUPPORTED_PAIRS:
        if lang is language:
            out.append(load_rules(language, vendor, rules_dir))
    return out
