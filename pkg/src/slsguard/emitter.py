"""Vendor policy emission and validation.

Translates a PermissionSet into a deployable vendor document: AWS IAM
policy JSON, a GCP custom-role document with resource bindings, or an Azure
custom-role definition whose permission entries carry a scope path. Bodies
are canonical (sorted statements, sorted keys) so regeneration from the
same set is byte-identical; env placeholders stay symbolic ${NAME} tokens
until allowlist build or deploy time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .errors import MissingNaming, UnmappableAction, UnparseablePolicy
from .extractor import PatternKind, PermissionSet, ScopeLevel
from .model import Vendor
from .rules import DATA_DIR, ActionRendering, ServiceInfo, load_actions, load_services

DEFAULT_NAMING = {
    "account": "123456789012",
    "region": "us-east-1",
    "project": "example-project",
    "subscription": "00000000-0000-0000-0000-000000000000",
    "resource_group": "serverless-rg",
}


@dataclass
class NamingConfig:
    """Account/project/subscription identifiers for resource grammars."""

    values: dict[str, str] = field(default_factory=dict)

    def render_prefix(self, template: str, vendor: Vendor) -> str:
        class _Strict(dict):
            def __missing__(inner, key):
                raise MissingNaming(key, vendor.value)

        return template.format_map(_Strict(self.values))

    @classmethod
    def defaults(cls) -> "NamingConfig":
        return cls(dict(DEFAULT_NAMING))


@dataclass
class PolicyDocument:
    vendor: Vendor
    scope: ScopeLevel
    function_id: str
    source_set_digest: str
    body: dict
    empty: bool = False

    def to_dict(self):
        out = {
            "schema": "slsguard-policy/1",
            "vendor": self.vendor.value,
            "scope": self.scope.value,
            "function_id": self.function_id,
            "source_set_digest": self.source_set_digest,
            "body": self.body,
        }
        if self.empty:
            out["note"] = "no permissions required"
        return out

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def policy_from_dict(doc: dict) -> PolicyDocument:
    try:
        return PolicyDocument(
            vendor=Vendor(doc["vendor"]),
            scope=ScopeLevel(doc["scope"]),
            function_id=doc["function_id"],
            source_set_digest=doc["source_set_digest"],
            body=doc["body"],
            empty=doc.get("note") == "no permissions required",
        )
    except (KeyError, ValueError) as exc:
        raise UnparseablePolicy(f"not a policy document: {exc}")


def load_policy(path) -> PolicyDocument:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UnparseablePolicy(f"{path}: {exc}")
    return policy_from_dict(doc)


def _resource_prefix(info: ServiceInfo, vendor: Vendor, naming: NamingConfig) -> str:
    return naming.render_prefix(info.render[vendor.value], vendor)


def _render_resource(info: ServiceInfo, vendor: Vendor, naming: NamingConfig,
                     pattern_kind: PatternKind, pattern_text: str) -> str:
    prefix = _resource_prefix(info, vendor, naming)
    if pattern_kind is PatternKind.SERVICE_WILDCARD:
        return prefix + "*"
    return prefix + pattern_text


def _rendering(actions: dict[str, ActionRendering], action: str, vendor: Vendor) -> str:
    r = actions.get(action)
    if r is None:
        raise UnmappableAction(action, vendor.value)
    return r.for_vendor(vendor)


def emit_policy(pset: PermissionSet, vendor: Vendor, naming: NamingConfig | None = None,
                services: dict[str, ServiceInfo] | None = None,
                actions: dict[str, ActionRendering] | None = None) -> PolicyDocument:
    """Render a PermissionSet as a vendor policy document (allow-only)."""
    naming = naming or NamingConfig.defaults()
    services = services or load_services()
    actions = actions or load_actions()

    # group requirements by rendered resource, actions sorted inside
    grouped: dict[str, list] = {}
    for req in pset.requirements:
        info = services[req.service]
        resource = _render_resource(info, vendor, naming, req.resource.kind,
                                    req.resource.text)
        grouped.setdefault(resource, []).append(req)

    if vendor is Vendor.AWS:
        statements = []
        for i, resource in enumerate(sorted(grouped)):
            reqs = grouped[resource]
            statements.append({
                "Sid": f"LeastPrivilege{i}",
                "Effect": "Allow",
                "Action": sorted({_rendering(actions, r.action, vendor) for r in reqs}),
                "Resource": [resource],
            })
        body = {"Version": "2012-10-17", "Statement": statements}
    elif vendor is Vendor.GCP:
        included = sorted({
            _rendering(actions, r.action, vendor) for r in pset.requirements
        })
        bindings = []
        for resource in sorted(grouped):
            reqs = grouped[resource]
            bindings.append({
                "resource": resource,
                "permissions": sorted({_rendering(actions, r.action, vendor) for r in reqs}),
            })
        body = {
            "title": f"{pset.function_id} least privilege",
            "description": "Generated from function source analysis",
            "stage": "GA",
            "includedPermissions": included,
            "resourceBindings": bindings,
        }
    elif vendor is Vendor.AZURE:
        entries = []
        for resource in sorted(grouped):
            reqs = grouped[resource]
            plain = sorted({
                _rendering(actions, r.action, vendor) for r in reqs
                if actions[r.action].azure_kind == "actions"
            })
            data = sorted({
                _rendering(actions, r.action, vendor) for r in reqs
                if actions[r.action].azure_kind == "dataActions"
            })
            entries.append({
                "scope": resource,
                "actions": plain,
                "notActions": [],
                "dataActions": data,
                "notDataActions": [],
            })
        scopes_prefix = naming.render_prefix(
            "/subscriptions/{subscription}/resourceGroups/{resource_group}", vendor)
        body = {
            "properties": {
                "roleName": f"{pset.function_id} least privilege",
                "type": "CustomRole",
                "description": "Generated from function source analysis",
                "assignableScopes": [scopes_prefix],
                "permissions": entries,
            }
        }
    else:
        raise UnmappableAction("*", vendor.value)

    return PolicyDocument(
        vendor=vendor,
        scope=pset.scope,
        function_id=pset.function_id,
        source_set_digest=pset.digest(),
        body=body,
        empty=pset.empty and not pset.requirements,
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self):
        return {"ok": self.ok, "errors": self.errors, "warnings": self.warnings}


def _body_schema(vendor: Vendor):
    path = DATA_DIR / "schemas" / f"policy.{vendor.value}.schema.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _statement_views(doc: PolicyDocument):
    """(actions, resource) pairs, vendor-agnostic, for linting."""
    if doc.vendor is Vendor.AWS:
        for st in doc.body.get("Statement", []):
            yield st.get("Action", []), st.get("Resource", [""])[0]
    elif doc.vendor is Vendor.GCP:
        for binding in doc.body.get("resourceBindings", []):
            yield binding.get("permissions", []), binding.get("resource", "")
    else:
        for entry in doc.body.get("properties", {}).get("permissions", []):
            yield (entry.get("actions", []) + entry.get("dataActions", []),
                   entry.get("scope", ""))


def validate_policy(doc: PolicyDocument, pset: PermissionSet | None = None) -> ValidationReport:
    """Structural schema check plus lints.

    Errors: wildcard action anywhere; bare '*' resource in an entity-level
    document. Warnings: duplicate statements; digest staleness when the
    current PermissionSet is supplied.
    """
    report = ValidationReport()
    try:
        jsonschema.validate(doc.body, _body_schema(doc.vendor))
    except jsonschema.ValidationError as exc:
        report.errors.append(
            f"schema: {'/'.join(str(p) for p in exc.absolute_path)}: {exc.message}")
        return report
    seen = set()
    for actions, resource in _statement_views(doc):
        for action in actions:
            if action == "*" or action.endswith(":*") or action.endswith("/*"):
                report.errors.append(f"wildcard action {action!r}")
        if resource == "*" and doc.scope is ScopeLevel.ENTITY:
            report.errors.append("bare wildcard resource in an entity-level document")
        key = (tuple(sorted(actions)), resource)
        if key in seen:
            report.warnings.append(f"duplicate statement for resource {resource!r}")
        seen.add(key)
    if pset is not None and pset.digest() != doc.source_set_digest:
        report.warnings.append(
            "stale document: source_set_digest no longer matches the permission set")
    return report
