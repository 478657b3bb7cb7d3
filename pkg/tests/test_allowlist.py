"""Hierarchical verification against the independent flat-set oracle."""

import random

import pytest

from oracle import expand_allowlist
from slsguard.allowlist import (
    AllowList,
    DenyReason,
    ServiceCallEvent,
    Verdict,
    build_allowlist,
    resolve_event_resource,
    substitute_env,
    verify_call,
)
from slsguard.errors import MissingEnvValue
from slsguard.extractor import (
    PatternKind,
    PermissionRequirement,
    PermissionSet,
    ResourcePattern,
    ScopeLevel,
)
from slsguard.model import Location, Resolvability

SERVICES = ["svc0", "svc1", "svc2"]
RESOURCES = ["alpha/a", "alpha/b", "beta/c"]
ACTIONS = ["svc:Read", "svc:Write", "svc:Delete"]
PATTERN_POOL = ["alpha/a", "alpha/b", "beta/c", "alpha/*", "beta/*", "*"]


def _mk_allow(entries) -> AllowList:
    return AllowList(function_id="f", built_from="x", entries=entries)


def random_allowlist(rng: random.Random) -> AllowList:
    entries = {}
    for s in SERVICES:
        if rng.random() < 0.25:
            continue
        patterns = {}
        for pattern in rng.sample(PATTERN_POOL, k=rng.randint(1, 3)):
            actions = rng.sample(ACTIONS, k=rng.randint(1, len(ACTIONS)))
            patterns[pattern] = sorted(actions)
        entries[s] = patterns
    return _mk_allow(entries)


def test_direct_membership_allow():
    allow = _mk_allow({"s3": {"user-bucket/*": ["s3:PutObject"]}})
    event = ServiceCallEvent(service="s3", operation="s3:PutObject",
                             resolved_resource="user-bucket/report.csv")
    decision = verify_call(event, allow)
    assert decision.verdict is Verdict.ALLOW
    assert decision.reason is DenyReason.MATCHED
    assert decision.matched_entry == ("s3", "user-bucket/*", "s3:PutObject")


def test_resource_miss_denies():
    allow = _mk_allow({"s3": {"user-bucket/*": ["s3:PutObject"]}})
    event = ServiceCallEvent(service="s3", operation="s3:PutObject",
                             resolved_resource="other-bucket/x")
    decision = verify_call(event, allow)
    assert decision.verdict is Verdict.DENY
    assert decision.reason is DenyReason.RESOURCE_MISS


def test_service_and_action_misses():
    allow = _mk_allow({"s3": {"b/k": ["s3:GetObject"]}})
    d1 = verify_call(ServiceCallEvent("lambda", "lambda:InvokeFunction",
                                      resolved_resource="fn"), allow)
    assert (d1.verdict, d1.reason) == (Verdict.DENY, DenyReason.SERVICE_MISS)
    d2 = verify_call(ServiceCallEvent("s3", "s3:PutObject", resolved_resource="b/k"), allow)
    assert (d2.verdict, d2.reason) == (Verdict.DENY, DenyReason.ACTION_MISS)


def test_oracle_equivalence_randomized():
    # acceptance-grade randomized agreement: >=10,000 (allowlist, event) pairs
    rng = random.Random(20260810)
    pairs = 0
    for _ in range(400):
        allow = random_allowlist(rng)
        permitted = expand_allowlist(allow.entries, SERVICES, RESOURCES, ACTIONS)
        for s in SERVICES:
            for r in RESOURCES:
                for a in ACTIONS:
                    event = ServiceCallEvent(service=s, operation=a, resolved_resource=r)
                    got = verify_call(event, allow).verdict is Verdict.ALLOW
                    want = (s, r, a) in permitted
                    assert got == want, (allow.entries, s, r, a)
                    pairs += 1
    assert pairs >= 10000


def test_deny_by_default_exhaustive():
    rng = random.Random(7)
    for _ in range(200):
        allow = random_allowlist(rng)
        permitted = expand_allowlist(allow.entries, SERVICES, RESOURCES, ACTIONS)
        for s in SERVICES:
            for r in RESOURCES:
                for a in ACTIONS:
                    if (s, r, a) not in permitted:
                        event = ServiceCallEvent(service=s, operation=a,
                                                 resolved_resource=r)
                        assert verify_call(event, allow).verdict is Verdict.DENY


def test_monotonicity_adding_entries_never_revokes():
    rng = random.Random(99)
    for _ in range(50):
        allow = random_allowlist(rng)
        allowed_events = [
            (s, r, a)
            for s in SERVICES for r in RESOURCES for a in ACTIONS
            if verify_call(ServiceCallEvent(s, a, resolved_resource=r), allow).allowed
        ]
        grown = {s: {p: list(acts) for p, acts in ps.items()}
                 for s, ps in allow.entries.items()}
        grown.setdefault("svc0", {}).setdefault("extra", []).append("svc:Extra")
        bigger = _mk_allow(grown)
        for s, r, a in allowed_events:
            assert verify_call(ServiceCallEvent(s, a, resolved_resource=r), bigger).allowed


def test_malformed_events_fail_closed():
    allow = _mk_allow({"s3": {"*": ["s3:GetObject"]}})
    weird = ServiceCallEvent(service="s3", operation="s3:GetObject",
                             params={"Bucket": object()})
    decision = verify_call(weird, allow)
    assert decision.verdict is Verdict.DENY
    assert decision.reason is DenyReason.RESOLUTION_FAILURE


# -- resource extraction -----------------------------------------------------------


def test_object_store_event_resource():
    event = ServiceCallEvent("s3", "s3:PutObject", params={"Bucket": "b", "Key": "k"})
    assert resolve_event_resource(event) == "b/k"


def test_document_store_env_resolution():
    event = ServiceCallEvent("cosmos", "cosmos:CreateItem",
                             params={"database": {"$env": "DB"}, "container": "users"})
    assert resolve_event_resource(event, {"DB": "prod"}) == "prod/users"


def test_missing_param_is_resolution_failure_not_crash():
    allow = _mk_allow({"s3": {"b/*": ["s3:PutObject"]}})
    event = ServiceCallEvent("s3", "s3:PutObject", params={"Key": "k"})
    decision = verify_call(event, allow)
    assert decision.verdict is Verdict.DENY
    assert decision.reason is DenyReason.RESOLUTION_FAILURE


def test_account_scoped_event_uses_default_identifier():
    allow = _mk_allow({"s3": {"*": ["s3:ListAllMyBuckets"]}})
    event = ServiceCallEvent("s3", "s3:ListAllMyBuckets", params={})
    assert verify_call(event, allow).allowed


# -- allowlist construction ---------------------------------------------------------


def _pset(reqs, env_bindings=None) -> PermissionSet:
    return PermissionSet(
        function_id="fixture",
        scope=ScopeLevel.ENTITY,
        requirements=reqs,
        env_bindings=env_bindings or {},
        fallbacks=[],
    )


def _req(action, kind, text, res=Resolvability.STATIC):
    return PermissionRequirement(
        action=action, service=action.split(":")[0],
        resource=ResourcePattern(kind, text),
        resolvability=res, provenance=Location(1, 1), provenance_path="f.py",
    )


def test_build_substitutes_env_snapshot():
    pset = _pset([_req("s3:PutObject", PatternKind.PREFIX, "${S3_NAME}/*")],
                 {"S3_NAME": "bucket"})
    allow = build_allowlist(pset, {"S3_NAME": "user-bucket"})
    assert allow.entries == {"s3": {"user-bucket/*": ["s3:PutObject"]}}
    assert allow.env_snapshot == {"S3_NAME": "user-bucket"}


def test_empty_pset_denies_everything():
    allow = build_allowlist(_pset([]), {})
    assert allow.entries == {}
    event = ServiceCallEvent("s3", "s3:GetObject", resolved_resource="b/k")
    assert verify_call(event, allow).verdict is Verdict.DENY


def test_missing_env_strict_raises():
    pset = _pset([_req("dynamodb:GetItem", PatternKind.EXACT, "${TABLE}")],
                 {"TABLE": "table"})
    with pytest.raises(MissingEnvValue) as exc:
        build_allowlist(pset, {}, strict=True)
    assert exc.value.name == "TABLE"


def test_deferred_mode_keeps_placeholders():
    pset = _pset([_req("dynamodb:GetItem", PatternKind.EXACT, "${TABLE}")],
                 {"TABLE": "table"})
    allow = build_allowlist(pset, {}, deferred=True)
    assert allow.entries == {"dynamodb": {"${TABLE}": ["dynamodb:GetItem"]}}
    assert allow.env_snapshot == {}


def test_service_fallback_becomes_star_under_service():
    pset = _pset([_req("lambda:ListFunctions", PatternKind.SERVICE_WILDCARD,
                       "lambda:*", Resolvability.DYNAMIC)])
    allow = build_allowlist(pset, {})
    assert allow.entries == {"lambda": {"*": ["lambda:ListFunctions"]}}


def test_substitute_env_forms():
    assert substitute_env("${A}/x", {"A": "a"}, strict=True) == "a/x"
    assert substitute_env("${A}/${B}", {"A": "a"}, strict=False) == "a/${B}"
    with pytest.raises(MissingEnvValue):
        substitute_env("${MISSING}", {}, strict=True)


def test_canonical_serialization_round_trip():
    from slsguard.allowlist import allowlist_from_dict
    import json

    allow = _mk_allow({"s3": {"b/*": ["s3:PutObject", "s3:GetObject"]}})
    doc = json.loads(allow.canonical_json())
    again = allowlist_from_dict(doc)
    assert again.canonical_json() == allow.canonical_json()
