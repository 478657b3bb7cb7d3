"""In-repo policy evaluator.

The desk-scale stand-in for cloud policy engines: converts any emitted
vendor document back into unified (service, resource-pattern, action)
triples by inverting the rendering tables, and answers whether a triple set
permits an abstract event. Allow-only; resource matching is exact, prefix
('p*'), or full '*', mirroring allowlist semantics so policy-vs-allowlist
comparisons are meaningful.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .emitter import NamingConfig, PolicyDocument
from .errors import UnparseablePolicy
from .model import Vendor
from .rules import ActionRendering, ServiceInfo, load_actions, load_services

Triple = tuple[str, str, str]  # (service, resource pattern, action)


def match_resource(pattern: str, resource: str) -> bool:
    """Exact > prefix-wildcard > full wildcard; no mid-string globs."""
    if pattern == "*":
        return True
    if pattern.endswith("*"):
        return resource.startswith(pattern[:-1])
    return pattern == resource


def permits(triples: set[Triple], service: str, resource: str, action: str) -> bool:
    return any(
        s == service and a == action and match_resource(p, resource)
        for (s, p, a) in triples
    )


@dataclass
class _ServiceMatcher:
    service: str
    regex: re.Pattern
    literal_len: int


class PolicyEvaluator:
    """Inverts vendor documents to unified triples."""

    def __init__(self, naming: NamingConfig | None = None,
                 services: dict[str, ServiceInfo] | None = None,
                 actions: dict[str, ActionRendering] | None = None):
        self.naming = naming or NamingConfig.defaults()
        self.services = services or load_services()
        self.actions = actions or load_actions()
        self._inverse: dict[Vendor, dict[str, str]] = {}
        for vendor in (Vendor.AWS, Vendor.GCP, Vendor.AZURE):
            self._inverse[vendor] = {
                r.for_vendor(vendor): canonical for canonical, r in self.actions.items()
            }
        self._matchers: dict[Vendor, list[_ServiceMatcher]] = {}
        for vendor in (Vendor.AWS, Vendor.GCP, Vendor.AZURE):
            matchers = []
            for name, info in self.services.items():
                prefix = self.naming.render_prefix(info.render[vendor.value], vendor)
                matchers.append(_ServiceMatcher(
                    service=name,
                    regex=re.compile("^" + re.escape(prefix)),
                    literal_len=len(prefix),
                ))
            # longest prefix wins so nested grammars resolve deterministically
            matchers.sort(key=lambda m: -m.literal_len)
            self._matchers[vendor] = matchers

    # -- inversion -----------------------------------------------------------

    def _invert_action(self, vendor: Vendor, rendered: str) -> str:
        canonical = self._inverse[vendor].get(rendered)
        if canonical is None:
            raise UnparseablePolicy(f"unknown {vendor.value} action string {rendered!r}")
        return canonical

    def _invert_resource(self, vendor: Vendor, rendered: str) -> tuple[str, str]:
        for m in self._matchers[vendor]:
            if m.regex.match(rendered):
                return m.service, rendered[m.literal_len:]
        raise UnparseablePolicy(f"unrecognized {vendor.value} resource {rendered!r}")

    def doc_triples(self, doc: PolicyDocument) -> set[Triple]:
        """Expand a policy document to unified triples."""
        triples: set[Triple] = set()
        vendor = doc.vendor
        if vendor is Vendor.AWS:
            for st in doc.body.get("Statement", []):
                if st.get("Effect") != "Allow":
                    raise UnparseablePolicy("only Allow statements are supported")
                for resource in st.get("Resource", []):
                    service, pattern = self._invert_resource(vendor, resource)
                    for rendered in st.get("Action", []):
                        action = self._invert_action(vendor, rendered)
                        triples.add((service, pattern, action))
        elif vendor is Vendor.GCP:
            for binding in doc.body.get("resourceBindings", []):
                service, pattern = self._invert_resource(vendor, binding["resource"])
                for rendered in binding.get("permissions", []):
                    action = self._invert_action(vendor, rendered)
                    triples.add((service, pattern, action))
        elif vendor is Vendor.AZURE:
            for entry in doc.body.get("properties", {}).get("permissions", []):
                service, pattern = self._invert_resource(vendor, entry["scope"])
                for rendered in entry.get("actions", []) + entry.get("dataActions", []):
                    action = self._invert_action(vendor, rendered)
                    triples.add((service, pattern, action))
        else:
            raise UnparseablePolicy(f"unsupported vendor {vendor!r}")
        return triples

    # -- authority comparison ---------------------------------------------------

    def event_alphabet(self, *triple_sets: set[Triple]) -> list[Triple]:
        """A finite probe alphabet covering and perturbing the given sets."""
        services = sorted({t[0] for ts in triple_sets for t in ts}) or ["s3"]
        actions = sorted({t[2] for ts in triple_sets for t in ts}) or ["s3:GetObject"]
        resources: set[str] = set()
        for ts in triple_sets:
            for _, pattern, _ in ts:
                if pattern == "*":
                    resources.add("anything/at-all")
                elif pattern.endswith("*"):
                    resources.add(pattern[:-1] + "probe")
                    resources.add(pattern[:-1].rstrip("/"))
                else:
                    resources.add(pattern)
                    resources.add(pattern + "/deeper")
        resources.add("unrelated/resource")
        events = []
        for s in services + ["no-such-service"]:
            for r in sorted(resources):
                for a in actions + ["s3:NoSuchAction"]:
                    events.append((s, r, a))
        return events

    def equivalent(self, left: set[Triple], right: set[Triple]) -> bool:
        """Authority equivalence by exhaustive enumeration over a probe
        alphabet derived from both sides."""
        for service, resource, action in self.event_alphabet(left, right):
            if permits(left, service, resource, action) != permits(right, service, resource, action):
                return False
        return True
