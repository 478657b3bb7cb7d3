"""Core domain model: source units, value expressions, and the semantic registry.

The semantic registry is the normalized intermediate representation every
downstream stage consumes: SDK call sites, environment references, folded
value flows, and imports, all ordered by source position so identical input
bytes always produce an identical registry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import UnsupportedCombination


class Language(str, Enum):
    JAVASCRIPT = "javascript"
    PYTHON = "python"
    GO = "go"


class Vendor(str, Enum):
    AWS = "aws"
    GCP = "gcp"
    AZURE = "azure"
    UNKNOWN = "unknown"


class ValueKind(str, Enum):
    LITERAL = "literal"
    ENV = "env"
    CONCAT = "concat"
    PARAM = "param"
    UNKNOWN = "unknown"


class Resolvability(str, Enum):
    STATIC = "static"
    PREFIX = "prefix"
    DYNAMIC = "dynamic"


_EXT_LANGUAGE = {
    ".js": Language.JAVASCRIPT,
    ".mjs": Language.JAVASCRIPT,
    ".cjs": Language.JAVASCRIPT,
    ".py": Language.PYTHON,
    ".go": Language.GO,
}


@dataclass(frozen=True)
class ValueExpr:
    """Folded value of an expression feeding an SDK call parameter.

    CONCAT holds >=2 parts; LITERAL carries text; ENV carries the variable
    name; PARAM marks data arriving through a function parameter (the
    enclosing local function's name in scope_function when it is a depth-1
    wrapper candidate, "" for the externally-invoked handler).
    """

    kind: ValueKind
    literal: str = ""
    env_name: str = ""
    parts: tuple["ValueExpr", ...] = ()
    param_name: str = ""
    scope_function: str = ""

    def leaves(self):
        if self.kind is ValueKind.CONCAT:
            for part in self.parts:
                yield from part.leaves()
        else:
            yield self

    def to_dict(self):
        out = {"kind": self.kind.value}
        if self.kind is ValueKind.LITERAL:
            out["literal"] = self.literal
        elif self.kind is ValueKind.ENV:
            out["env"] = self.env_name
        elif self.kind is ValueKind.CONCAT:
            out["parts"] = [p.to_dict() for p in self.parts]
        elif self.kind is ValueKind.PARAM:
            out["param"] = self.param_name
            if self.scope_function:
                out["scope"] = self.scope_function
        return out


def literal(text: str) -> ValueExpr:
    return ValueExpr(ValueKind.LITERAL, literal=text)


def env_ref(name: str) -> ValueExpr:
    return ValueExpr(ValueKind.ENV, env_name=name)


def param(name: str = "", scope_function: str = "") -> ValueExpr:
    return ValueExpr(ValueKind.PARAM, param_name=name, scope_function=scope_function)


def unknown() -> ValueExpr:
    return ValueExpr(ValueKind.UNKNOWN)


def concat(parts) -> ValueExpr:
    """Build a concatenation, flattening nested concats and merging literals."""
    flat: list[ValueExpr] = []
    for part in parts:
        if part.kind is ValueKind.CONCAT:
            flat.extend(part.parts)
        else:
            flat.append(part)
    merged: list[ValueExpr] = []
    for part in flat:
        if (
            merged
            and part.kind is ValueKind.LITERAL
            and merged[-1].kind is ValueKind.LITERAL
        ):
            merged[-1] = literal(merged[-1].literal + part.literal)
        else:
            merged.append(part)
    merged = [p for p in merged if not (p.kind is ValueKind.LITERAL and p.literal == "")] or merged[:1]
    if len(merged) == 1:
        return merged[0]
    return ValueExpr(ValueKind.CONCAT, parts=tuple(merged))


def resolvability(expr: ValueExpr) -> Resolvability:
    """Static iff every leaf is a literal or env ref; prefix iff the leading
    leaf is static but a later one is not; dynamic otherwise."""
    leaves = list(expr.leaves())
    static = [leaf.kind in (ValueKind.LITERAL, ValueKind.ENV) for leaf in leaves]
    if all(static):
        return Resolvability.STATIC
    if static[0]:
        return Resolvability.PREFIX
    return Resolvability.DYNAMIC


def placeholder_text(expr: ValueExpr) -> str:
    """Render an expression as resource-pattern text.

    Static leaves render verbatim (env refs as ${NAME} tokens); the first
    dynamic leaf and everything after it collapse into a trailing "*".
    """
    out: list[str] = []
    for leaf in expr.leaves():
        if leaf.kind is ValueKind.LITERAL:
            out.append(leaf.literal)
        elif leaf.kind is ValueKind.ENV:
            out.append("${" + leaf.env_name + "}")
        else:
            out.append("*")
            break
    return "".join(out)


@dataclass(frozen=True)
class Location:
    line: int
    column: int

    def to_dict(self):
        return {"line": self.line, "column": self.column}


@dataclass(frozen=True)
class SdkImport:
    module: str
    alias: str
    vendor: Vendor
    location: Location


@dataclass(frozen=True)
class ServiceCallSite:
    """One syntactic method call on an SDK client (or derived handle)."""

    client: str
    service: str
    method: str
    params: dict[str, ValueExpr]
    location: Location
    provenance: str = "resolved"  # resolved | unresolved
    enclosing_function: str = ""  # "" = module level or entry handler
    method_is_computed: bool = False
    param_texts: dict[str, str] = field(default_factory=dict)
    statement_span: tuple[int, int] = (0, 0)  # byte offsets of the call statement
    client_construction_span: tuple[int, int] = (0, 0)

    def key(self):
        return (self.service, self.method)

    def to_dict(self):
        return {
            "client": self.client,
            "service": self.service,
            "method": self.method,
            "params": {k: v.to_dict() for k, v in sorted(self.params.items())},
            "location": self.location.to_dict(),
            "provenance": self.provenance,
        }


@dataclass(frozen=True)
class EnvRefUse:
    env_name: str
    use_sites: tuple[Location, ...]


@dataclass(frozen=True)
class LocalFunction:
    """A file-local function definition; used for depth-1 wrapper tracing."""

    name: str
    params: tuple[str, ...]
    location: Location


@dataclass(frozen=True)
class HelperCall:
    """A call to a file-local function, with folded argument values."""

    callee: str
    args: tuple[ValueExpr, ...]
    kwargs: dict[str, ValueExpr]
    location: Location


@dataclass
class SemanticRegistry:
    """Normalized per-function index of SDK interactions.

    Immutable by convention after construction; ordering of every list is
    source position so construction is deterministic.
    """

    unit: "SourceUnit"
    call_sites: list[ServiceCallSite] = field(default_factory=list)
    env_refs: list[EnvRefUse] = field(default_factory=list)
    assignments: dict[str, ValueExpr] = field(default_factory=dict)
    imports: list[SdkImport] = field(default_factory=list)
    local_functions: dict[str, LocalFunction] = field(default_factory=dict)
    helper_calls: list[HelperCall] = field(default_factory=list)
    constructions: list[tuple[tuple[int, int], str]] = field(default_factory=list)

    def to_dict(self):
        return {
            "path": str(self.unit.path),
            "language": self.unit.language.value,
            "vendor": self.unit.vendor.value,
            "imports": [
                {"module": i.module, "alias": i.alias, "vendor": i.vendor.value,
                 "location": i.location.to_dict()}
                for i in self.imports
            ],
            "call_sites": [s.to_dict() for s in self.call_sites],
            "env_refs": [
                {"env": e.env_name, "use_sites": [u.to_dict() for u in e.use_sites]}
                for e in self.env_refs
            ],
            "assignments": {k: v.to_dict() for k, v in sorted(self.assignments.items())},
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


@dataclass
class SourceUnit:
    """A single function source file plus its identification results."""

    path: Path
    text: str
    language: Language | None = None
    vendor: Vendor | None = None
    language_signal: str = ""
    line_index: tuple[int, ...] = ()

    def __post_init__(self):
        self.path = Path(self.path)
        if not self.line_index:
            offsets = [0]
            for i, ch in enumerate(self.text):
                if ch == "\n":
                    offsets.append(i + 1)
            self.line_index = tuple(offsets)

    @classmethod
    def load(cls, path) -> "SourceUnit":
        p = Path(path)
        return cls(path=p, text=p.read_text(encoding="utf-8"))

    def location_of(self, offset: int) -> Location:
        """Map a byte offset to a 1-based (line, column)."""
        lo, hi = 0, len(self.line_index) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.line_index[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return Location(line=lo + 1, column=offset - self.line_index[lo] + 1)

    def check_supported(self):
        if self.language is Language.GO and self.vendor is Vendor.AZURE:
            raise UnsupportedCombination(
                f"{self.path}: Go + Azure is not a supported combination"
            )


def language_from_extension(path) -> Language | None:
    return _EXT_LANGUAGE.get(Path(path).suffix.lower())


@dataclass(frozen=True)
class Finding:
    """One structured diagnostic (emitted as a JSON line)."""

    kind: str
    message: str
    path: str
    line: int = 0
    column: int = 0
    detail: str = ""

    def to_dict(self):
        out = {"kind": self.kind, "message": self.message, "path": self.path,
               "line": self.line, "column": self.column}
        if self.detail:
            out["detail"] = self.detail
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
