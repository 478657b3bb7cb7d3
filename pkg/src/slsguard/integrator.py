"""Deterministic source rewriting: allowlist embedding and hook injection.

Per-language patterns: Python wraps SDK clients in a verification proxy
class, JavaScript redefines SDK methods at runtime (prototype and handle
method redefinition), Go gets explicit verification calls inserted before
each SDK call statement. The injected preamble is self-contained (verifier
plus allowlist, no toolkit import) so instrumented functions run anywhere.

Every insertion is tracked as an (start, end) span in the output; removing
all spans reproduces the input byte-for-byte.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

from .allowlist import AllowList
from .errors import AlreadyInstrumented, AnchorNotFound
from .model import Language, SemanticRegistry, SourceUnit
from .registry import build_semantic_registry
from .rules import RuleSet, load_rules

SENTINEL = "slsguard:instrumented:v1"


@dataclass
class InstrumentedSource:
    """Rewritten source plus the bookkeeping needed to verify and reverse it."""

    text: str
    injected_regions: list[tuple[int, int]]
    embedded_allowlist_ref: str  # "inline" or the sidecar file name
    original_digest: str
    language: Language
    path: str

    def strip(self) -> str:
        """Remove every injected region, reproducing the original source."""
        out = []
        pos = 0
        for start, end in sorted(self.injected_regions):
            out.append(self.text[pos:start])
            pos = end
        out.append(self.text[pos:])
        return "".join(out)


@dataclass
class ReconstructionReport:
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self):
        return {"ok": self.ok, "checks": self.checks, "details": self.details}


class _PatchSet:
    """Ordered text insertions with exact injected-region tracking."""

    def __init__(self, text: str):
        self.text = text
        self.inserts: list[tuple[int, str]] = []

    def insert(self, pos: int, fragment: str):
        self.inserts.append((pos, fragment))

    def apply(self) -> tuple[str, list[tuple[int, int]]]:
        pieces = []
        regions = []
        pos = 0
        shifted = 0
        for at, fragment in sorted(self.inserts, key=lambda x: x[0]):
            pieces.append(self.text[pos:at])
            start = at + shifted
            pieces.append(fragment)
            regions.append((start, start + len(fragment)))
            shifted += len(fragment)
            pos = at
        pieces.append(self.text[pos:])
        return "".join(pieces), regions


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _methods_map(reg: SemanticRegistry, rules: RuleSet) -> dict:
    """Compact per-service method metadata embedded into hooks."""
    services = sorted({
        s for _, s in reg.constructions
    } | {site.service for site in reg.call_sites if site.provenance == "resolved"})
    out = {}
    for service in services:
        info = rules.services.get(service)
        if info is None:
            continue
        ops = {}
        for (svc, method), rule in sorted(rules.rules.items()):
            if svc != service:
                continue
            ops[method] = {
                "actions": list(rule.actions),
                "positional": list(rule.positional),
                "aliases": dict(rule.param_aliases),
                "wildcard": rule.wildcard_required,
            }
        out[service] = {
            "slots": list(info.slots),
            "aliases": dict(info.aliases),
            "join": info.join,
            "binders": dict(sorted(rules.binders.get(service, {}).items())),
            "ops": ops,
        }
    return out


def _compact(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# Anchors
# ---------------------------------------------------------------------------

def _line_end_offset(text: str, offset: int) -> int:
    nl = text.find("\n", offset)
    return len(text) if nl == -1 else nl + 1


def _python_anchor(unit: SourceUnit, reg: SemanticRegistry) -> int:
    if reg.imports:
        last = max(reg.imports, key=lambda i: i.location.line)
        return unit.line_index[last.location.line - 1 + 1] if last.location.line < len(unit.line_index) \
            else _line_end_offset(unit.text, unit.line_index[last.location.line - 1])
    # after a module docstring when present, else the top
    m = re.match(r'\s*("""(?:.|\n)*?"""|\'\'\'(?:.|\n)*?\'\'\')\s*?\n', unit.text)
    if m:
        return m.end()
    return 0


def _js_anchor(unit: SourceUnit, reg: SemanticRegistry) -> int:
    offset = 0
    for m in re.finditer(r"^.*(\brequire\s*\(|^import\s).*$", unit.text, re.M):
        offset = max(offset, _line_end_offset(unit.text, m.start()))
    return offset


def _go_anchor(unit: SourceUnit, reg: SemanticRegistry) -> int:
    package = re.search(r"^package\s+\w+.*$", unit.text, re.M)
    if package is None:
        raise AnchorNotFound(f"{unit.path}: no package declaration to anchor on")
    anchor = _line_end_offset(unit.text, package.start())
    block = re.search(r"^import\s*\(", unit.text, re.M)
    if block is not None:
        close = unit.text.find(")", block.end())
        if close == -1:
            raise AnchorNotFound(f"{unit.path}: unterminated import block")
        anchor = _line_end_offset(unit.text, close)
    else:
        for m in re.finditer(r'^import\s+(?:\w+\s+)?"[^"]+".*$', unit.text, re.M):
            anchor = max(anchor, _line_end_offset(unit.text, m.start()))
    return anchor


# ---------------------------------------------------------------------------
# Preamble templates
# ---------------------------------------------------------------------------

def _python_preamble(allow_json: str, methods_json: str, ref: str) -> str:
    if ref == "inline":
        loader = f"_SLSGUARD_ALLOWLIST = _slsguard_json.loads({allow_json!r})\n"
    else:
        loader = (
            "with open(_slsguard_os.path.join(_slsguard_os.path.dirname("
            f"_slsguard_os.path.abspath(__file__)), {ref!r})) as _slsguard_fh:\n"
            "    _SLSGUARD_ALLOWLIST = _slsguard_json.load(_slsguard_fh)\n"
        )
    return (
        f"\n# >>> slsguard hooks ({SENTINEL}) - generated, do not edit\n"
        "import json as _slsguard_json\n"
        "import os as _slsguard_os\n"
        + loader +
        f"_SLSGUARD_METHODS = _slsguard_json.loads({methods_json!r})\n"
        '''

class SlsGuardPermissionError(Exception):
    def __init__(self, payload):
        self.payload = payload
        super().__init__("permission denied: " + _slsguard_json.dumps(payload, sort_keys=True))


def _slsguard_deny(service, resource, action, reason):
    raise SlsGuardPermissionError(
        {"service": service, "resource": resource, "action": action, "reason": reason})


def _slsguard_resolve_pattern(pattern):
    if "${" not in pattern:
        return pattern
    out = []
    i = 0
    while i < len(pattern):
        if pattern.startswith("${", i):
            close = pattern.find("}", i + 2)
            if close < 0:
                return None
            value = _slsguard_os.environ.get(pattern[i + 2:close])
            if value is None:
                return None
            out.append(value)
            i = close + 1
        else:
            out.append(pattern[i])
            i += 1
    return "".join(out)


def _slsguard_match(pattern, resource):
    if pattern == "*":
        return True
    if pattern.endswith("*"):
        return resource.startswith(pattern[:-1])
    return pattern == resource


def _slsguard_verify(service, action, resource):
    if resource is None:
        _slsguard_deny(service, None, action, "ResolutionFailure")
    entries = _SLSGUARD_ALLOWLIST.get("entries", {}).get(service)
    if entries is None:
        _slsguard_deny(service, resource, action, "ServiceMiss")
    matched = False
    for pattern in sorted(entries):
        resolved = _slsguard_resolve_pattern(pattern)
        if resolved is None:
            continue
        if _slsguard_match(resolved, resource):
            matched = True
            if action in entries[pattern]:
                return
    _slsguard_deny(service, resource, action, "ActionMiss" if matched else "ResourceMiss")


def _slsguard_resource(service, op, context, args, kwargs):
    if op.get("wildcard"):
        return "*"
    spec = _SLSGUARD_METHODS[service]
    values = dict(context)
    for i, name in enumerate(op.get("positional", [])):
        if i < len(args):
            values[name] = args[i]
    values.update(kwargs)
    slots = {}
    for key, value in values.items():
        slot = key if key in spec["slots"] else \\
            spec["aliases"].get(key, op.get("aliases", {}).get(key))
        if slot is not None and slot not in slots:
            slots[slot] = value
    pieces = []
    for slot in spec["slots"]:
        value = slots.get(slot)
        if not isinstance(value, str):
            return None
        pieces.append(value)
    return spec["join"].join(pieces)


class _SlsGuardProxy(object):
    def __init__(self, target, service, context):
        object.__setattr__(self, "_slsguard_target", target)
        object.__setattr__(self, "_slsguard_service", service)
        object.__setattr__(self, "_slsguard_context", context)

    def __getattr__(self, name):
        target = getattr(object.__getattribute__(self, "_slsguard_target"), name)
        service = object.__getattribute__(self, "_slsguard_service")
        context = object.__getattribute__(self, "_slsguard_context")
        spec = _SLSGUARD_METHODS.get(service, {})
        binders = spec.get("binders", {})
        ops = spec.get("ops", {})
        if name in binders:
            def _slsguard_bind(*args, **kwargs):
                derived = dict(context)
                if args:
                    derived[binders[name]] = args[0]
                elif kwargs:
                    derived[binders[name]] = next(iter(kwargs.values()))
                return _SlsGuardProxy(target(*args, **kwargs), service, derived)
            return _slsguard_bind
        if name in ops:
            op = ops[name]
            def _slsguard_guarded(*args, **kwargs):
                resource = _slsguard_resource(service, op, context, args, kwargs)
                for action in op["actions"]:
                    _slsguard_verify(service, action, resource)
                return target(*args, **kwargs)
            return _slsguard_guarded
        if callable(target):
            def _slsguard_blocked(*args, **kwargs):
                _slsguard_deny(service, None, service + ":" + name, "ResolutionFailure")
            return _slsguard_blocked
        return target


def _slsguard_wrap(client, service):
    return _SlsGuardProxy(client, service, {})
# <<< slsguard hooks
'''
    )


def _js_preamble(allow_json: str, methods_json: str, ref: str,
                 redefinitions: list[str]) -> str:
    if ref == "inline":
        loader = f"const _SLSGUARD_ALLOWLIST = JSON.parse({allow_json!r});\n"
    else:
        loader = (
            "const _SLSGUARD_ALLOWLIST = JSON.parse(require('fs').readFileSync("
            f"require('path').join(__dirname, {ref!r}), 'utf8'));\n"
        )
    body = (
        f"\n// >>> slsguard hooks ({SENTINEL}) - generated, do not edit\n"
        + loader +
        f"const _SLSGUARD_METHODS = JSON.parse({methods_json!r});\n"
        + '''
class SlsGuardPermissionError extends Error {
  constructor(payload) {
    super("permission denied: " + JSON.stringify(payload));
    this.payload = payload;
  }
}

function _slsguardDeny(service, resource, action, reason) {
  throw new SlsGuardPermissionError({service: service, resource: resource, action: action, reason: reason});
}

function _slsguardResolvePattern(pattern) {
  if (pattern.indexOf("${") < 0) return pattern;
  let out = "";
  let i = 0;
  while (i < pattern.length) {
    if (pattern.startsWith("${", i)) {
      const close = pattern.indexOf("}", i + 2);
      if (close < 0) return null;
      const value = process.env[pattern.slice(i + 2, close)];
      if (value === undefined) return null;
      out += value;
      i = close + 1;
    } else {
      out += pattern[i];
      i += 1;
    }
  }
  return out;
}

function _slsguardMatch(pattern, resource) {
  if (pattern === "*") return true;
  if (pattern.endsWith("*")) return resource.startsWith(pattern.slice(0, -1));
  return pattern === resource;
}

function _slsguardVerify(service, action, resource) {
  if (resource === null || resource === undefined) {
    _slsguardDeny(service, null, action, "ResolutionFailure");
  }
  const entries = (_SLSGUARD_ALLOWLIST.entries || {})[service];
  if (entries === undefined) {
    _slsguardDeny(service, resource, action, "ServiceMiss");
  }
  let matched = false;
  for (const pattern of Object.keys(entries).sort()) {
    const resolved = _slsguardResolvePattern(pattern);
    if (resolved === null) continue;
    if (_slsguardMatch(resolved, resource)) {
      matched = true;
      if (entries[pattern].indexOf(action) >= 0) return;
    }
  }
  _slsguardDeny(service, resource, action, matched ? "ActionMiss" : "ResourceMiss");
}

function _slsguardResource(service, op, context, args) {
  if (op.wildcard) return "*";
  const spec = _SLSGUARD_METHODS[service];
  const values = Object.assign({}, context);
  (op.positional || []).forEach(function (name, i) {
    if (i < args.length) values[name] = args[i];
  });
  if (!(op.positional || []).length && args.length > 0 &&
      typeof args[0] === "object" && args[0] !== null) {
    Object.assign(values, args[0]);
  }
  const slots = {};
  for (const key of Object.keys(values)) {
    const slot = spec.slots.indexOf(key) >= 0 ? key :
      (spec.aliases[key] || (op.aliases || {})[key]);
    if (slot && slots[slot] === undefined) slots[slot] = values[key];
  }
  const pieces = [];
  for (const slot of spec.slots) {
    const value = slots[slot];
    if (typeof value !== "string") return null;
    pieces.push(value);
  }
  return pieces.join(spec.join);
}

function _slsguardGuardHandle(obj, service, context) {
  if (!obj) return obj;
  const spec = _SLSGUARD_METHODS[service];
  for (const name of Object.keys(spec.ops)) {
    const path = name.split(".");
    let holder = obj;
    for (let i = 0; i < path.length - 1; i += 1) {
      holder = holder ? holder[path[i]] : undefined;
    }
    const leaf = path[path.length - 1];
    if (!holder || typeof holder[leaf] !== "function") continue;
    const original = holder[leaf];
    const op = spec.ops[name];
    holder[leaf] = function () {
      const args = Array.prototype.slice.call(arguments);
      const resource = _slsguardResource(service, op, context, args);
      for (const action of op.actions) _slsguardVerify(service, action, resource);
      return original.apply(this, args);
    };
  }
  for (const name of Object.keys(spec.binders)) {
    if (typeof obj[name] !== "function") continue;
    const original = obj[name];
    const slot = spec.binders[name];
    obj[name] = function () {
      const args = Array.prototype.slice.call(arguments);
      const child = original.apply(this, args);
      const derived = Object.assign({}, context);
      if (args.length > 0) derived[slot] = args[0];
      return _slsguardGuardHandle(child, service, derived);
    };
  }
  return obj;
}

function _slsguardRedefine(ctor, service) {
  if (!ctor) return ctor;
  if (ctor.prototype) _slsguardGuardHandle(ctor.prototype, service, {});
  return ctor;
}
'''
    )
    for line in redefinitions:
        body += line + "\n"
    body += "// <<< slsguard hooks\n"
    return body


def _go_preamble(entries_literal: str, ref: str) -> str:
    body = f"\n// >>> slsguard hooks ({SENTINEL}) - generated, do not edit\n"
    body += '''
type SlsGuardPermissionError struct {
	Service  string
	Resource string
	Action   string
	Reason   string
}

func (e *SlsGuardPermissionError) Error() string {
	return "permission denied: {\\"service\\":\\"" + e.Service + "\\",\\"resource\\":\\"" +
		e.Resource + "\\",\\"action\\":\\"" + e.Action + "\\",\\"reason\\":\\"" + e.Reason + "\\"}"
}

'''
    if ref == "inline":
        body += "var _slsguardAllowlist = " + entries_literal + "\n"
    else:
        body += (
            "var _slsguardAllowlist = func() map[string]map[string][]string {\n"
            "\tvar doc struct {\n"
            "\t\tEntries map[string]map[string][]string `json:\"entries\"`\n"
            "\t}\n"
            f"\tdata, err := _slsguard_os.ReadFile({json.dumps(ref)})\n"
            "\tif err != nil {\n"
            "\t\tpanic(&SlsGuardPermissionError{\"\", \"\", \"\", \"ResolutionFailure\"})\n"
            "\t}\n"
            "\tif err := _slsguard_json.Unmarshal(data, &doc); err != nil {\n"
            "\t\tpanic(&SlsGuardPermissionError{\"\", \"\", \"\", \"ResolutionFailure\"})\n"
            "\t}\n"
            "\treturn doc.Entries\n"
            "}()\n"
        )
    body += '''
func _slsguardMatch(pattern string, resource string) bool {
	if pattern == "*" {
		return true
	}
	n := len(pattern)
	if n > 0 && pattern[n-1] == '*' {
		prefix := pattern[:n-1]
		return len(resource) >= len(prefix) && resource[:len(prefix)] == prefix
	}
	return pattern == resource
}

func _slsguardJoin(parts []string) string {
	out := ""
	for i, p := range parts {
		if i > 0 {
			out += "/"
		}
		out += p
	}
	return out
}

func _slsguardVerify(service string, action string, resource string) {
	entries, ok := _slsguardAllowlist[service]
	if !ok {
		panic(&SlsGuardPermissionError{service, resource, action, "ServiceMiss"})
	}
	matched := false
	for pattern, actions := range entries {
		if _slsguardMatch(pattern, resource) {
			matched = true
			for _, a := range actions {
				if a == action {
					return
				}
			}
		}
	}
	reason := "ResourceMiss"
	if matched {
		reason = "ActionMiss"
	}
	panic(&SlsGuardPermissionError{service, resource, action, reason})
}
// <<< slsguard hooks
'''
    return body


def _go_entries_literal(allow: AllowList) -> str:
    lines = ["map[string]map[string][]string{"]
    for service in sorted(allow.entries):
        lines.append(f"\t{json.dumps(service)}: {{")
        for pattern in sorted(allow.entries[service]):
            actions = ", ".join(json.dumps(a) for a in sorted(allow.entries[service][pattern]))
            lines.append(f"\t\t{json.dumps(pattern)}: {{{actions}}},")
        lines.append("\t},")
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Injection
# ---------------------------------------------------------------------------

def _js_ctor_expr(unit: SourceUnit, span: tuple[int, int], rules: RuleSet) -> str:
    text = unit.text[span[0]:span[1]]
    if text.startswith("new "):
        text = text[4:]
    head = text.split("(", 1)[0].strip()
    for pattern in rules.clients:
        for factory in pattern.factories:
            suffix = "." + factory
            if head.endswith(suffix):
                return head[: -len(suffix)]
    return head


def _go_unwrap_text(text: str, rules: RuleSet) -> str:
    stripped = text.strip()
    for wrapper in rules.unwrap:
        prefix = wrapper + "("
        if stripped.startswith(prefix) and stripped.endswith(")"):
            return stripped[len(prefix):-1].strip()
    return stripped


def inject_hooks(unit: SourceUnit, allow: AllowList, mode: str = "inline",
                 rules: RuleSet | None = None,
                 reg: SemanticRegistry | None = None) -> InstrumentedSource:
    """Embed the allowlist and install verification hooks.

    mode is "inline" (allowlist literal in the source) or "sidecar"
    (hooks read `<stem>.allowlist.json` next to the file). Raises
    AlreadyInstrumented on a sentinel hit, ParseError on invalid input, and
    AnchorNotFound when no insertion point exists.
    """
    if SENTINEL in unit.text:
        raise AlreadyInstrumented(f"{unit.path}: sentinel marker already present")
    unit.check_supported()
    if rules is None:
        rules = load_rules(unit.language, unit.vendor)
    if reg is None:
        reg = build_semantic_registry(unit, rules)
    ref = "inline" if mode == "inline" else f"{unit.path.stem}.allowlist.json"
    allow_json = _compact(allow.to_dict())
    methods_json = _compact(_methods_map(reg, rules))
    patches = _PatchSet(unit.text)

    if unit.language is Language.PYTHON:
        anchor = _python_anchor(unit, reg)
        patches.insert(anchor, _python_preamble(allow_json, methods_json, ref))
        for span, service in reg.constructions:
            patches.insert(span[0], "_slsguard_wrap(")
            patches.insert(span[1], f', "{service}")')
    elif unit.language is Language.JAVASCRIPT:
        anchor = _js_anchor(unit, reg)
        redefs = []
        seen = set()
        for span, service in reg.constructions:
            ctor = _js_ctor_expr(unit, span, rules)
            key = (ctor, service)
            if key not in seen:
                seen.add(key)
                redefs.append(f'_slsguardRedefine({ctor}, "{service}");')
        patches.insert(anchor, _js_preamble(allow_json, methods_json, ref, sorted(redefs)))
    else:  # Go
        anchor = _go_anchor(unit, reg)
        if ref != "inline":
            block = re.search(r"^import\s*\(", unit.text, re.M)
            alias_lines = ('\t_slsguard_json "encoding/json"\n'
                           '\t_slsguard_os "os"\n')
            if block is not None:
                patches.insert(_line_end_offset(unit.text, block.start()), alias_lines)
            else:
                package = re.search(r"^package\s+\w+.*$", unit.text, re.M)
                patches.insert(
                    _line_end_offset(unit.text, package.start()),
                    "\nimport (\n" + alias_lines + ")\n",
                )
        patches.insert(anchor, _go_preamble(_go_entries_literal(allow), ref))
        for site in reg.call_sites:
            if site.provenance != "resolved" or site.method_is_computed:
                continue
            rule = rules.rule_for(site.service, site.method)
            if rule is None:
                continue
            stmt_start = site.statement_span[0]
            line_start = unit.text.rfind("\n", 0, stmt_start) + 1
            indent = unit.text[line_start:stmt_start]
            if rule.wildcard_required:
                resource_expr = '"*"'
            elif rule.resource_params:
                parts = []
                for key in rule.resource_params:
                    text = site.param_texts.get(key)
                    if text is None:
                        parts.append('"\\x00unresolved"')
                    else:
                        parts.append(_go_unwrap_text(text, rules))
                resource_expr = "_slsguardJoin([]string{" + ", ".join(parts) + "})"
            else:
                resource_expr = '"*"'
            lines = "".join(
                f'_slsguardVerify("{site.service}", "{action}", {resource_expr})\n{indent}'
                for action in rule.actions
            )
            patches.insert(line_start + len(indent), lines)

    text, regions = patches.apply()
    return InstrumentedSource(
        text=text,
        injected_regions=regions,
        embedded_allowlist_ref=ref,
        original_digest=_digest(unit.text),
        language=unit.language,
        path=str(unit.path),
    )


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _site_keys(reg: SemanticRegistry):
    keys = []
    for site in reg.call_sites:
        keys.append((site.service, site.method, site.provenance))
    return sorted(keys)


def validate_reconstruction(original: SourceUnit, inst: InstrumentedSource,
                            rules: RuleSet | None = None) -> ReconstructionReport:
    """Four checks: parses, strip-reverses, call sites preserved, and every
    detected call site guarded by a hook."""
    report = ReconstructionReport()
    if rules is None:
        rules = load_rules(original.language, original.vendor)

    inst_unit = SourceUnit(path=original.path, text=inst.text,
                           language=original.language, vendor=original.vendor)
    inst_reg = None
    try:
        inst_reg = build_semantic_registry(inst_unit, rules)
        report.checks["parses"] = True
    except Exception as exc:
        report.checks["parses"] = False
        report.details["parses"] = str(exc)

    stripped = inst.strip()
    if stripped == original.text:
        report.checks["strip_reverses"] = True
    else:
        report.checks["strip_reverses"] = False
        for i, (a, b) in enumerate(zip(stripped, original.text)):
            if a != b:
                report.details["strip_reverses"] = \
                    f"first mismatch at offset {i}: {a!r} != {b!r}"
                break
        else:
            report.details["strip_reverses"] = (
                f"length mismatch: {len(stripped)} != {len(original.text)}")

    orig_reg = build_semantic_registry(original, rules)
    if inst_reg is not None:
        orig_keys = _site_keys(orig_reg)
        inst_keys = _site_keys(inst_reg)
        report.checks["call_sites_preserved"] = orig_keys == inst_keys
        if orig_keys != inst_keys:
            report.details["call_sites_preserved"] = \
                f"original={orig_keys} instrumented={inst_keys}"
    else:
        report.checks["call_sites_preserved"] = False

    unguarded = []
    if original.language is Language.PYTHON:
        for span, service in orig_reg.constructions:
            needle = "_slsguard_wrap(" + original.text[span[0]:span[1]] + f', "{service}")'
            if needle not in inst.text:
                for site in orig_reg.call_sites:
                    if site.client_construction_span == span:
                        unguarded.append(
                            f"{site.service}.{site.method}@{site.location.line}")
    elif original.language is Language.JAVASCRIPT:
        guarded_services = set(re.findall(r'_slsguardRedefine\([^,]+, "([^"]+)"\)', inst.text))
        try:
            methods_doc = json.loads(re.search(
                r"_SLSGUARD_METHODS = JSON\.parse\('(.*)'\)", inst.text).group(1))
        except Exception:
            methods_doc = {}
        for site in orig_reg.call_sites:
            if site.provenance != "resolved" or site.method_is_computed:
                continue
            ops = methods_doc.get(site.service, {}).get("ops", {})
            if site.service not in guarded_services or \
                    (rules.rule_for(site.service, site.method) and site.method not in ops):
                unguarded.append(f"{site.service}.{site.method}@{site.location.line}")
    else:
        for site in orig_reg.call_sites:
            if site.provenance != "resolved" or site.method_is_computed:
                continue
            rule = rules.rule_for(site.service, site.method)
            if rule is None:
                continue
            stmt_first = original.text[site.statement_span[0]:site.statement_span[1]] \
                .split("\n")[0].strip()
            guarded = False
            idx = inst.text.find(stmt_first)
            while idx != -1 and not guarded:
                preceding = inst.text[:idx].split("\n")
                # one inserted line per action, immediately above the call
                needed = [f'_slsguardVerify("{site.service}", "{a}"' for a in rule.actions]
                window = preceding[-(len(needed) + 1):-1] if len(preceding) > 1 else []
                guarded = all(
                    any(n in line for line in window) for n in needed
                )
                idx = inst.text.find(stmt_first, idx + 1)
            if not guarded:
                unguarded.append(f"{site.service}.{site.method}@{site.location.line}")
    report.checks["calls_guarded"] = not unguarded
    if unguarded:
        report.details["calls_guarded"] = "unguarded: " + ", ".join(sorted(unguarded))
    return report


def strip_instrumentation(inst: InstrumentedSource) -> str:
    return inst.strip()
