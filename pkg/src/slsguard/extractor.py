"""Least-privilege permission extraction.

Runs the three query stages over a semantic registry: call detection
(direct calls plus depth-1 wrappers), value tracing (dataflow from call
parameters back through assignments, environment reads, concatenations,
and helper-call bindings), and action mapping (rule table lookup). The
composed output is a PermissionSet at one of three scope levels:

  service-level  actions only, service-wide resources
  object-level   actions plus the primary resource identifier
  entity-level   every resource slot on every execution path

Dynamic resources and wildcard-required operations degrade to service-wide
grants and are recorded in the set's fallbacks with a reason.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass
from enum import Enum

from .errors import MissingRule
from .model import (
    Finding,
    Location,
    Resolvability,
    SemanticRegistry,
    ServiceCallSite,
    ValueExpr,
    ValueKind,
    concat,
    placeholder_text,
    resolvability,
)
from .rules import ActionMappingRule, RuleSet, ServiceInfo


class ScopeLevel(str, Enum):
    SERVICE = "service-level"
    OBJECT = "object-level"
    ENTITY = "entity-level"


class PatternKind(str, Enum):
    EXACT = "exact"
    PREFIX = "prefix"
    SERVICE_WILDCARD = "service-wildcard"


@dataclass(frozen=True)
class ResourcePattern:
    """A resource pattern as it appears in permission sets and policies.

    `text` may contain ${ENV} placeholder tokens; prefix patterns end in a
    single trailing '*'. Service wildcards render as '<service>:*'.
    """

    kind: PatternKind
    text: str

    @classmethod
    def service_wildcard(cls, service: str) -> "ResourcePattern":
        return cls(PatternKind.SERVICE_WILDCARD, f"{service}:*")

    @property
    def match_text(self) -> str:
        """The pattern as consumed by allowlist matching ('*' for wildcard)."""
        return "*" if self.kind is PatternKind.SERVICE_WILDCARD else self.text

    def to_dict(self):
        return {"kind": self.kind.value, "text": self.text}


@dataclass(frozen=True)
class PermissionRequirement:
    action: str
    service: str
    resource: ResourcePattern
    resolvability: Resolvability
    provenance: Location
    provenance_path: str = ""

    def sort_key(self):
        return (self.action, self.resource.kind.value, self.resource.text)

    def to_dict(self):
        return {
            "action": self.action,
            "service": self.service,
            "resource": self.resource.to_dict(),
            "resolvability": self.resolvability.value,
            "provenance": {"path": self.provenance_path,
                           "line": self.provenance.line,
                           "column": self.provenance.column},
        }


@dataclass(frozen=True)
class FallbackEntry:
    service: str
    method: str
    reason: str  # wildcard-required | dynamic-resource
    location: Location

    def to_dict(self):
        return {"service": self.service, "method": self.method, "reason": self.reason,
                "location": self.location.to_dict()}


@dataclass
class PermissionSet:
    function_id: str
    scope: ScopeLevel
    requirements: list[PermissionRequirement]
    env_bindings: dict[str, str]  # env name -> resource slot it fills
    fallbacks: list[FallbackEntry]
    empty: bool = False

    def to_dict(self):
        return {
            "schema": "slsguard-pset/1",
            "function_id": self.function_id,
            "scope": self.scope.value,
            "empty": self.empty,
            "requirements": [r.to_dict() for r in self.requirements],
            "env_bindings": dict(sorted(self.env_bindings.items())),
            "fallbacks": [f.to_dict() for f in self.fallbacks],
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def digest(self) -> str:
        compact = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(compact.encode("utf-8")).hexdigest()

    def triples(self) -> set[tuple[str, str, str]]:
        """(service, resource-pattern, action) triples under allowlist
        semantics; the shared authority currency across modules."""
        return {(r.service, r.resource.match_text, r.action) for r in self.requirements}


def permission_set_from_dict(doc: dict) -> PermissionSet:
    reqs = [
        PermissionRequirement(
            action=r["action"],
            service=r["service"],
            resource=ResourcePattern(PatternKind(r["resource"]["kind"]), r["resource"]["text"]),
            resolvability=Resolvability(r["resolvability"]),
            provenance=Location(r["provenance"]["line"], r["provenance"]["column"]),
            provenance_path=r["provenance"].get("path", ""),
        )
        for r in doc.get("requirements", [])
    ]
    fallbacks = [
        FallbackEntry(service=f["service"], method=f["method"], reason=f["reason"],
                      location=Location(f["location"]["line"], f["location"]["column"]))
        for f in doc.get("fallbacks", [])
    ]
    return PermissionSet(
        function_id=doc["function_id"],
        scope=ScopeLevel(doc["scope"]),
        requirements=reqs,
        env_bindings=dict(doc.get("env_bindings", {})),
        fallbacks=fallbacks,
        empty=doc.get("empty", False),
    )


# ---------------------------------------------------------------------------
# Call detection
# ---------------------------------------------------------------------------

def detect_calls(
    reg: SemanticRegistry, rules: RuleSet
) -> tuple[list[tuple[ServiceCallSite, ActionMappingRule]], list[Finding]]:
    """Match registry call sites against the action-mapping rules.

    Unmatched SDK-looking calls become findings, never silent drops.
    """
    matched: list[tuple[ServiceCallSite, ActionMappingRule]] = []
    findings: list[Finding] = []
    path = str(reg.unit.path)
    for site in reg.call_sites:
        if site.provenance == "unresolved":
            findings.append(Finding(
                kind="unresolved-client",
                message=f"call {site.method!r} on a client whose construction could not be traced",
                path=path, line=site.location.line, column=site.location.column,
            ))
            continue
        if site.method_is_computed:
            findings.append(Finding(
                kind="unknown-method",
                message=f"computed method name on {site.service} client; "
                        "call cannot be mapped statically",
                path=path, line=site.location.line, column=site.location.column,
                detail="computed",
            ))
            continue
        rule = rules.rule_for(site.service, site.method)
        if rule is None:
            findings.append(Finding(
                kind="unknown-method",
                message=f"no action mapping for {site.service}.{site.method}",
                path=path, line=site.location.line, column=site.location.column,
            ))
            continue
        matched.append((site, rule))
    return matched, findings


# ---------------------------------------------------------------------------
# Value tracing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResolvedValue:
    text: str
    resolvability: Resolvability
    env_names: tuple[str, ...] = ()


@dataclass(frozen=True)
class SlotResolution:
    param: str
    slot: str
    candidates: tuple[ResolvedValue, ...]


def _substitute_helper_params(
    reg: SemanticRegistry, expr: ValueExpr
) -> list[ValueExpr]:
    """Depth-1 wrapper tracing: bind helper-function parameters from the
    helper's intra-file call sites; the union of bindings is returned."""
    contains_helper_param = any(
        leaf.kind is ValueKind.PARAM
        and leaf.scope_function in reg.local_functions
        and any(h.callee == leaf.scope_function for h in reg.helper_calls)
        for leaf in expr.leaves()
    )
    if not contains_helper_param:
        return [expr]

    def bind(e: ValueExpr, binding: dict[tuple[str, str], ValueExpr]) -> ValueExpr:
        if e.kind is ValueKind.CONCAT:
            return concat([bind(p, binding) for p in e.parts])
        if e.kind is ValueKind.PARAM:
            return binding.get((e.scope_function, e.param_name), e)
        return e

    helper_names = {
        leaf.scope_function
        for leaf in expr.leaves()
        if leaf.kind is ValueKind.PARAM and leaf.scope_function in reg.local_functions
    }
    out: list[ValueExpr] = []
    call_groups: list[list[dict[tuple[str, str], ValueExpr]]] = []
    for name in sorted(helper_names):
        fn = reg.local_functions[name]
        bindings: list[dict[tuple[str, str], ValueExpr]] = []
        for call in reg.helper_calls:
            if call.callee != name:
                continue
            one: dict[tuple[str, str], ValueExpr] = {}
            for i, p in enumerate(fn.params):
                if i < len(call.args):
                    one[(name, p)] = call.args[i]
                elif p in call.kwargs:
                    one[(name, p)] = call.kwargs[p]
            bindings.append(one)
        if bindings:
            call_groups.append(bindings)
    if not call_groups:
        return [expr]
    for combo in itertools.product(*call_groups):
        merged: dict[tuple[str, str], ValueExpr] = {}
        for b in combo:
            merged.update(b)
        out.append(bind(expr, merged))
    return out or [expr]


def _resolve_value(reg: SemanticRegistry, expr: ValueExpr | None) -> tuple[ResolvedValue, ...]:
    if expr is None:
        return (ResolvedValue("*", Resolvability.DYNAMIC),)
    results = []
    for candidate in _substitute_helper_params(reg, expr):
        res = resolvability(candidate)
        text = placeholder_text(candidate)
        envs = tuple(sorted({
            leaf.env_name for leaf in candidate.leaves() if leaf.kind is ValueKind.ENV
        }))
        results.append(ResolvedValue(text, res, envs))
    seen = set()
    unique = []
    for r in results:
        key = (r.text, r.resolvability)
        if key not in seen:
            seen.add(key)
            unique.append(r)
    return tuple(unique)


def _effective_params(site: ServiceCallSite, rule: ActionMappingRule) -> dict[str, ValueExpr]:
    params = dict(site.params)
    for i, name in enumerate(rule.positional):
        key = f"_arg{i}"
        if key in params and name not in params:
            params[name] = params[key]
    for raw, slot in rule.param_aliases.items():
        if raw in params and slot not in params:
            params[slot] = params[raw]
    return params


def trace_values(
    reg: SemanticRegistry, site: ServiceCallSite, rule: ActionMappingRule,
    services: dict[str, ServiceInfo] | None = None,
) -> list[SlotResolution]:
    """Resolve each resource parameter of a matched call site."""
    info = (services or {}).get(rule.service)
    params = _effective_params(site, rule)
    out: list[SlotResolution] = []
    for key in rule.resource_params:
        slot = info.slot_of(key) if info is not None else key
        expr = params.get(key)
        out.append(SlotResolution(
            param=key,
            slot=slot or key,
            candidates=_resolve_value(reg, expr),
        ))
    return out


def compose_resource(
    resolutions: list[SlotResolution], scope: ScopeLevel, info: ServiceInfo,
) -> list[ResolvedValue]:
    """Join slot resolutions into resource pattern candidates for a scope.

    Object level keeps the primary (first) identifier; a multi-slot service
    gets a '/*' tail so finer-grained events stay covered. The first dynamic
    slot truncates the pattern with '*'; a dynamic leading slot makes the
    whole resource dynamic (service-level fallback).
    """
    if scope is ScopeLevel.OBJECT:
        slots = resolutions[:1]
        synthetic_tail = len(resolutions) > 1
    else:
        slots = resolutions
        synthetic_tail = False
    if not slots:
        return [ResolvedValue("*", Resolvability.DYNAMIC)]
    out: list[ResolvedValue] = []
    for combo in itertools.product(*[s.candidates for s in slots]):
        pieces: list[str] = []
        envs: list[str] = []
        overall = Resolvability.STATIC
        for idx, value in enumerate(combo):
            envs.extend(value.env_names)
            if value.resolvability is Resolvability.STATIC:
                pieces.append(value.text)
                continue
            if value.resolvability is Resolvability.PREFIX:
                # prefix text always carries its static head before the '*'
                pieces.append(value.text)
                overall = Resolvability.PREFIX
                break
            # dynamic slot
            if idx == 0:
                overall = Resolvability.DYNAMIC
            else:
                pieces.append("*")
                overall = Resolvability.PREFIX
            break
        else:
            if synthetic_tail:
                pieces.append("*")
                overall = Resolvability.PREFIX
        if overall is Resolvability.DYNAMIC:
            out.append(ResolvedValue("*", Resolvability.DYNAMIC, tuple(sorted(set(envs)))))
        else:
            out.append(ResolvedValue(
                info.join.join(pieces), overall, tuple(sorted(set(envs)))
            ))
    seen = set()
    unique = []
    for r in out:
        key = (r.text, r.resolvability)
        if key not in seen:
            seen.add(key)
            unique.append(r)
    return unique


# ---------------------------------------------------------------------------
# Action mapping
# ---------------------------------------------------------------------------

def map_actions(site: ServiceCallSite, rules: RuleSet) -> list[str]:
    """Return the rule's IAM actions for a matched site, verbatim."""
    rule = rules.rule_for(site.service, site.method)
    if rule is None:
        raise MissingRule(f"no rule for ({rules.vendor.value}, {site.service}, {site.method})")
    return list(rule.actions)


# ---------------------------------------------------------------------------
# Permission set extraction
# ---------------------------------------------------------------------------

def extract_permissions(
    reg: SemanticRegistry, rules: RuleSet, scope: ScopeLevel = ScopeLevel.ENTITY,
) -> tuple[PermissionSet, list[Finding]]:
    """Compose detection, tracing, and mapping into a PermissionSet."""
    matched, findings = detect_calls(reg, rules)
    path = str(reg.unit.path)
    function_id = reg.unit.path.stem
    requirements: dict[tuple, PermissionRequirement] = {}
    fallbacks: list[FallbackEntry] = []
    env_bindings: dict[str, str] = {}

    def add_requirement(req: PermissionRequirement):
        key = (req.action, req.resource.kind, req.resource.text)
        if key not in requirements:
            requirements[key] = req

    def bind_envs(resolutions: list[SlotResolution]):
        for res in resolutions:
            for cand in res.candidates:
                for env in cand.env_names:
                    env_bindings.setdefault(env, res.slot)

    for site, rule in matched:
        info = rules.services[rule.service]
        resolutions = trace_values(reg, site, rule, rules.services)
        bind_envs(resolutions)
        if rule.wildcard_required:
            fallbacks.append(FallbackEntry(
                service=rule.service, method=rule.method,
                reason="wildcard-required", location=site.location,
            ))
            for action in rule.actions:
                add_requirement(PermissionRequirement(
                    action=action, service=rule.service,
                    resource=ResourcePattern.service_wildcard(rule.service),
                    resolvability=Resolvability.DYNAMIC,
                    provenance=site.location, provenance_path=path,
                ))
            continue
        if scope is ScopeLevel.SERVICE:
            for action in rule.actions:
                add_requirement(PermissionRequirement(
                    action=action, service=rule.service,
                    resource=ResourcePattern.service_wildcard(rule.service),
                    resolvability=Resolvability.DYNAMIC,
                    provenance=site.location, provenance_path=path,
                ))
            continue
        for value in compose_resource(resolutions, scope, info):
            if value.resolvability is Resolvability.DYNAMIC:
                fallbacks.append(FallbackEntry(
                    service=rule.service, method=rule.method,
                    reason="dynamic-resource", location=site.location,
                ))
                pattern = ResourcePattern.service_wildcard(rule.service)
            elif value.resolvability is Resolvability.PREFIX:
                pattern = ResourcePattern(PatternKind.PREFIX, value.text)
            else:
                pattern = ResourcePattern(PatternKind.EXACT, value.text)
            for action in rule.actions:
                add_requirement(PermissionRequirement(
                    action=action, service=rule.service, resource=pattern,
                    resolvability=value.resolvability,
                    provenance=site.location, provenance_path=path,
                ))

    pset = PermissionSet(
        function_id=function_id,
        scope=scope,
        requirements=sorted(requirements.values(), key=lambda r: r.sort_key()),
        env_bindings=env_bindings,
        fallbacks=sorted(fallbacks, key=lambda f: (f.location.line, f.location.column,
                                                   f.service, f.method)),
        empty=len(reg.call_sites) == 0,
    )
    return pset, findings


# ---------------------------------------------------------------------------
# Environment bindings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EnvBinding:
    env_name: str
    role: str
    use_sites: tuple[Location, ...]

    def to_dict(self):
        return {"env": self.env_name, "role": self.role,
                "use_sites": [u.to_dict() for u in self.use_sites]}


def resolve_env_bindings(reg: SemanticRegistry, rules: RuleSet | None = None) -> list[EnvBinding]:
    """Every env name feeding a resource slot, with its role, duplicates
    merged across call sites."""
    if rules is None:
        from .rules import load_rules
        rules = load_rules(reg.unit.language, reg.unit.vendor)
    merged: dict[str, tuple[str, list[Location]]] = {}
    for site in reg.call_sites:
        rule = rules.rule_for(site.service, site.method)
        if rule is None:
            continue
        info = rules.services[rule.service]
        params = _effective_params(site, rule)
        for key in rule.resource_params:
            expr = params.get(key)
            if expr is None:
                continue
            slot = info.slot_of(key) or key
            for leaf in expr.leaves():
                if leaf.kind is ValueKind.ENV:
                    role, sites = merged.setdefault(leaf.env_name, (slot, []))
                    sites.append(site.location)
    env_refs = {e.env_name: e.use_sites for e in reg.env_refs}
    out = []
    for name in sorted(merged):
        role, sites = merged[name]
        uses = env_refs.get(name, tuple(sites))
        out.append(EnvBinding(env_name=name, role=role,
                              use_sites=tuple(sorted(set(uses), key=lambda l: (l.line, l.column)))))
    return out
