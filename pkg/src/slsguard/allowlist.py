"""Runtime allowlist: construction, hierarchical verification, drift diff.

The allowlist nests service -> resource-pattern -> actions, mirroring the
verifier's lookup order. Verification is fail-closed: every failure mode
(unknown service, unmatched resource, missing action, resource resolution
error) is a Deny with a reason; the verifier itself never raises.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import jsonschema

from .emitter import PolicyDocument
from .errors import MissingEnvValue, UnparseablePolicy
from .evaluator import PolicyEvaluator, Triple, match_resource
from .extractor import PermissionSet
from .rules import DATA_DIR, ServiceInfo, load_services

_ENV_TOKEN_OPEN = "${"


@dataclass
class AllowList:
    """Per-function allowed-call structure consumed by Algorithm-style
    hierarchical verification and by injected hooks (exact file contract)."""

    function_id: str
    built_from: str  # digest of the PermissionSet
    entries: dict[str, dict[str, list[str]]]  # service -> resource -> actions
    env_snapshot: dict[str, str] = field(default_factory=dict)

    def to_dict(self):
        return {
            "schema": "slsguard-allowlist/1",
            "function_id": self.function_id,
            "built_from": self.built_from,
            "entries": {
                service: {resource: sorted(actions)
                          for resource, actions in sorted(resources.items())}
                for service, resources in sorted(self.entries.items())
            },
            "env_snapshot": dict(sorted(self.env_snapshot.items())),
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def digest(self) -> str:
        compact = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(compact.encode("utf-8")).hexdigest()

    def triples(self) -> set[Triple]:
        return {
            (service, resource, action)
            for service, resources in self.entries.items()
            for resource, actions in resources.items()
            for action in actions
        }


def allowlist_from_dict(doc: dict) -> AllowList:
    schema = json.loads((DATA_DIR / "schemas" / "allowlist.schema.json").read_text())
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise UnparseablePolicy(f"allowlist schema violation: {exc.message}")
    return AllowList(
        function_id=doc["function_id"],
        built_from=doc["built_from"],
        entries={s: {r: list(a) for r, a in rs.items()} for s, rs in doc["entries"].items()},
        env_snapshot=dict(doc["env_snapshot"]),
    )


def load_allowlist(path) -> AllowList:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UnparseablePolicy(f"{path}: {exc}")
    return allowlist_from_dict(doc)


def substitute_env(text: str, env: dict[str, str], strict: bool) -> str:
    """Replace ${NAME} tokens; strict mode raises on a missing value."""
    out = []
    i = 0
    while i < len(text):
        if text.startswith(_ENV_TOKEN_OPEN, i):
            close = text.find("}", i + 2)
            if close == -1:
                out.append(text[i:])
                break
            name = text[i + 2:close]
            if name in env:
                out.append(env[name])
            elif strict:
                raise MissingEnvValue(name)
            else:
                out.append(text[i:close + 1])  # deferred resolution keeps the token
            i = close + 1
        else:
            out.append(text[i])
            i += 1
    return "".join(out)


def build_allowlist(pset: PermissionSet, env: dict[str, str] | None = None,
                    strict: bool = True, deferred: bool = False) -> AllowList:
    """Build the nested allowlist from a PermissionSet.

    Placeholders are substituted from `env` (build-time snapshot) unless
    `deferred` is set, in which case ${NAME} tokens survive into the list
    and hooks resolve them per call. Strict mode raises MissingEnvValue for
    an unresolved placeholder.
    """
    env = dict(env or {})
    entries: dict[str, dict[str, set[str]]] = {}
    snapshot: dict[str, str] = {}
    for req in pset.requirements:
        resource = req.resource.match_text
        if not deferred:
            for name in pset.env_bindings:
                if f"${{{name}}}" in resource and name in env:
                    snapshot[name] = env[name]
            resource = substitute_env(resource, env, strict)
        entries.setdefault(req.service, {}).setdefault(resource, set()).add(req.action)
    return AllowList(
        function_id=pset.function_id,
        built_from=pset.digest(),
        entries={s: {r: sorted(a) for r, a in rs.items()} for s, rs in entries.items()},
        env_snapshot={} if deferred else snapshot,
    )


# ---------------------------------------------------------------------------
# Service call events and hierarchical verification
# ---------------------------------------------------------------------------

class Verdict(int, Enum):
    ALLOW = 0
    DENY = 1


class DenyReason(str, Enum):
    MATCHED = "Matched"
    SERVICE_MISS = "ServiceMiss"
    RESOURCE_MISS = "ResourceMiss"
    ACTION_MISS = "ActionMiss"
    RESOLUTION_FAILURE = "ResolutionFailure"


@dataclass
class ServiceCallEvent:
    service: str
    operation: str  # canonical action ("s3:PutObject") or bare method name
    params: dict = field(default_factory=dict)
    resolved_resource: str | None = None

    def to_dict(self):
        return {"service": self.service, "operation": self.operation,
                "params": self.params, "resolved_resource": self.resolved_resource}


@dataclass(frozen=True)
class VerificationDecision:
    verdict: Verdict
    reason: DenyReason
    matched_entry: tuple[str, str, str] | None = None

    @property
    def allowed(self) -> bool:
        return self.verdict is Verdict.ALLOW

    def to_dict(self):
        return {"verdict": int(self.verdict), "reason": self.reason.value,
                "matched_entry": list(self.matched_entry) if self.matched_entry else None}


def _event_value(value, env: dict[str, str]) -> str | None:
    """Resolve one event parameter: plain string, ${NAME} token, or
    {"$env": NAME} marker; env-typed values read the environment."""
    if isinstance(value, dict):
        name = value.get("$env")
        if not isinstance(name, str):
            return None
        return env.get(name)
    if not isinstance(value, str):
        return None
    if _ENV_TOKEN_OPEN in value:
        resolved = substitute_env(value, env, strict=False)
        if _ENV_TOKEN_OPEN in resolved:
            return None
        return resolved
    return value


def resolve_event_resource(event: ServiceCallEvent, env: dict[str, str] | None = None,
                           services: dict[str, ServiceInfo] | None = None) -> str | None:
    """Per-service resource extraction for an intercepted call.

    Joins the service's resource slots from the event parameters (accepting
    raw names or slot aliases); returns None on any missing or unresolvable
    slot - the caller records ResolutionFailure and denies.
    """
    env = env or {}
    services = services or load_services()
    info = services.get(event.service)
    if info is None or not info.slots:
        return None
    pieces = []
    for slot in info.slots:
        candidates = [slot] + [raw for raw, s in info.aliases.items() if s == slot]
        value = None
        for key in candidates:
            if key in event.params:
                value = _event_value(event.params[key], env)
                break
        if value is None:
            return None
        pieces.append(value)
    return info.join.join(pieces)


def verify_call(event: ServiceCallEvent, allow: AllowList,
                services: dict[str, ServiceInfo] | None = None) -> VerificationDecision:
    """Hierarchical verification: service, then resource, then action.

    The event's action is taken from `operation` when canonical, otherwise
    qualified as "<service>:<operation>". Resource comes from the event's
    resolved_resource when present; otherwise it is extracted per service
    rules (resource-addressed services) or defaults to "*" (account-scoped
    operations, which only a service-wide entry can authorize). Any failure
    is a Deny with a reason; this function never raises.
    """
    try:
        action = event.operation if ":" in event.operation else \
            f"{event.service}:{event.operation}"
        service = event.service
        services = services or load_services()
        info = services.get(service)
        needs_extraction = (
            info is not None and info.requires_resource_extraction
            and bool(info.slots) and bool(event.params)
        )
        if event.resolved_resource is not None:
            resource = event.resolved_resource
        elif not needs_extraction:
            resource = "*"  # account-scoped: only a service-wide entry matches
        else:
            resource = resolve_event_resource(event, allow.env_snapshot, services)
            if resource is None:
                return VerificationDecision(Verdict.DENY, DenyReason.RESOLUTION_FAILURE)

        allowed_resources = allow.entries.get(service)
        if allowed_resources is None:
            return VerificationDecision(Verdict.DENY, DenyReason.SERVICE_MISS)
        matched_any_resource = False
        for pattern in sorted(allowed_resources):
            if match_resource(pattern, resource):
                matched_any_resource = True
                if action in allowed_resources[pattern]:
                    return VerificationDecision(
                        Verdict.ALLOW, DenyReason.MATCHED,
                        matched_entry=(service, pattern, action),
                    )
        if matched_any_resource:
            return VerificationDecision(Verdict.DENY, DenyReason.ACTION_MISS)
        return VerificationDecision(Verdict.DENY, DenyReason.RESOURCE_MISS)
    except Exception:
        # fail closed on anything unforeseen; the verifier must never throw
        return VerificationDecision(Verdict.DENY, DenyReason.RESOLUTION_FAILURE)


def decision_log_line(event: ServiceCallEvent, decision: VerificationDecision,
                      timestamp: str | None = None) -> str:
    """One JSON line for the decision log: event, verdict, reason, timestamp."""
    stamp = timestamp or _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return json.dumps({
        "event": event.to_dict(),
        "verdict": int(decision.verdict),
        "reason": decision.reason.value,
        "timestamp": stamp,
    }, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Drift detection
# ---------------------------------------------------------------------------

@dataclass
class DriftReport:
    excess: list[Triple]
    missing: list[Triple]
    timestamp: str

    @property
    def clean(self) -> bool:
        return not self.excess and not self.missing

    def to_dict(self):
        return {
            "excess": [list(t) for t in self.excess],
            "missing": [list(t) for t in self.missing],
            "timestamp": self.timestamp,
        }


def diff_policy(live: PolicyDocument, allow: AllowList,
                evaluator: PolicyEvaluator | None = None) -> DriftReport:
    """Expand both sides to (service, resource, action) triples and diff.

    The live policy keeps symbolic ${ENV} tokens; they are normalized
    through the allowlist's env snapshot so a snapshot allowlist compares
    against the concrete resources it actually guards.
    """
    evaluator = evaluator or PolicyEvaluator()
    live_triples = evaluator.doc_triples(live)
    if allow.env_snapshot:
        live_triples = {
            (s, substitute_env(p, allow.env_snapshot, strict=False), a)
            for (s, p, a) in live_triples
        }
    allow_triples = allow.triples()
    excess = sorted(live_triples - allow_triples)
    missing = sorted(allow_triples - live_triples)
    timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return DriftReport(excess=excess, missing=missing, timestamp=timestamp)
