"""Semantic registry construction.

Language frontends lower source code to a tiny expression IR (EIR); the
RegistryBuilder does the language-independent semantic work: folding value
flows, resolving SDK client constructions and binder chains, assembling
service call sites, and recording environment references. The result is a
SemanticRegistry ordered by source position, so identical input bytes give
identical registries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import RuleError
from .model import (
    EnvRefUse,
    HelperCall,
    Language,
    LocalFunction,
    Location,
    SdkImport,
    SemanticRegistry,
    ServiceCallSite,
    SourceUnit,
    ValueExpr,
    ValueKind,
    Vendor,
    concat,
    env_ref,
    literal,
    param,
    unknown,
)
from .rules import RuleSet, load_rules


# ---------------------------------------------------------------------------
# Expression IR produced by the language frontends
# ---------------------------------------------------------------------------

@dataclass
class EIR:
    line: int = 0
    col: int = 0
    span: tuple[int, int] = (0, 0)

    def loc(self) -> Location:
        return Location(self.line, self.col)


@dataclass
class EStr(EIR):
    value: str = ""


@dataclass
class EEnv(EIR):
    name: str = ""


@dataclass
class EName(EIR):
    id: str = ""


@dataclass
class EMember(EIR):
    base: EIR | None = None
    attr: str | None = None  # None = computed member (x[expr], getattr(x, e))
    attr_line: int = 0
    attr_col: int = 0


@dataclass
class ECall(EIR):
    callee: EIR | None = None
    args: list[EIR] = field(default_factory=list)
    kwargs: dict[str, EIR] = field(default_factory=dict)
    is_new: bool = False


@dataclass
class EObject(EIR):
    props: dict[str, EIR] = field(default_factory=dict)
    has_dynamic: bool = False  # spread / computed keys present


@dataclass
class EConcat(EIR):
    parts: list[EIR] = field(default_factory=list)


@dataclass
class EUnknown(EIR):
    inner: list[EIR] = field(default_factory=list)  # still walked for calls


def path_text(e: EIR) -> str | None:
    """Dotted path of a Name/Member chain, or None if not a plain path."""
    if isinstance(e, EName):
        return e.id
    if isinstance(e, EMember) and e.attr is not None:
        base = path_text(e.base) if e.base is not None else None
        return f"{base}.{e.attr}" if base else None
    return None


# ---------------------------------------------------------------------------
# Builder
# ---------------------------------------------------------------------------

@dataclass
class Handle:
    """An SDK client or a handle derived from one through binder methods."""

    service: str | None
    client_id: str
    context: dict[str, ValueExpr] = field(default_factory=dict)
    context_texts: dict[str, str] = field(default_factory=dict)
    pending: tuple[str, ...] = ()  # property path accumulated before the call
    construction_span: tuple[int, int] = (0, 0)


@dataclass
class _Assign:
    block: tuple[str, ...]
    seq: int
    value: ValueExpr


class RegistryBuilder:
    """Accumulates registry facts as a frontend walks one source unit."""

    def __init__(self, unit: SourceUnit, ruleset: RuleSet):
        self.unit = unit
        self.rs = ruleset
        self.imports: list[SdkImport] = []
        self.bindings: dict[str, tuple[str, str]] = {}  # name -> (module, member prefix)
        self.handles: dict[str, Handle] = {}
        self.construction_spans: dict[tuple[int, int], str | None] = {}
        self.assigns: dict[str, list[_Assign]] = {}
        self.props: dict[str, dict[str, list[_Assign]]] = {}
        self.env_uses: dict[str, list[Location]] = {}
        self.call_sites: list[ServiceCallSite] = []
        self.local_functions: dict[str, LocalFunction] = {}
        self.helper_calls: list[HelperCall] = []
        self._fn_stack: list[tuple[str, tuple[str, ...]]] = []
        self._block: list[str] = []
        self._seq = 0
        self._block_counter = 0
        self._stmt_span: tuple[int, int] = (0, 0)

    # -- structural events ---------------------------------------------------

    def next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def declare_function(self, name: str, params: tuple[str, ...], loc: Location):
        if name and name not in self.local_functions:
            self.local_functions[name] = LocalFunction(name=name, params=params, location=loc)

    def begin_function(self, name: str, params: tuple[str, ...]):
        self._fn_stack.append((name, params))
        self._block.append(f"fn:{name}")

    def end_function(self):
        self._fn_stack.pop()
        self._block.pop()

    def begin_block(self):
        self._block_counter += 1
        self._block.append(f"b{self._block_counter}")

    def end_block(self):
        self._block.pop()

    def set_statement_span(self, span: tuple[int, int]):
        self._stmt_span = span

    def add_import(self, module: str, alias: str, member: str, loc: Location,
                   bind_module: str | None = None):
        """Record an import; `bind_module` overrides what the alias resolves
        to (dotted `import a.b` binds `a`, not `a.b`)."""
        vendor = self.rs.vendor if self.rs.module_is_sdk(module) else Vendor.UNKNOWN
        self.imports.append(SdkImport(module=module, alias=alias, vendor=vendor, location=loc))
        self.bindings[alias] = (bind_module if bind_module is not None else module, member)

    # -- value folding ---------------------------------------------------------

    def _current_fn(self) -> tuple[str, tuple[str, ...]]:
        return self._fn_stack[-1] if self._fn_stack else ("", ())

    @staticmethod
    def _fn_scope(block: tuple[str, ...]) -> str:
        return block[0] if block and block[0].startswith("fn:") else ""

    def _lookup_assign(self, name: str) -> ValueExpr | None:
        versions = self.assigns.get(name)
        if not versions:
            return None
        here = tuple(self._block)
        visible = [a for a in versions if here[: len(a.block)] == a.block]
        if not visible:
            return None
        last = max(visible, key=lambda a: a.seq)
        # A later assignment in a branch of the same function (or at module
        # level) may or may not have run: no longer straight-line, degrade.
        here_scope = self._fn_scope(here)
        if any(
            a.seq > last.seq and self._fn_scope(a.block) in ("", here_scope)
            for a in versions
        ):
            return unknown()
        return last.value

    def fold(self, e: EIR) -> ValueExpr:
        """Fold an expression to its ValueExpr, recording env uses."""
        if isinstance(e, EStr):
            return literal(e.value)
        if isinstance(e, EEnv):
            self.env_uses.setdefault(e.name, []).append(e.loc())
            return env_ref(e.name)
        if isinstance(e, EConcat):
            return concat([self.fold(p) for p in e.parts])
        if isinstance(e, EName):
            value = self._lookup_assign(e.id)
            if value is not None:
                return value
            fn_name, fn_params = self._current_fn()
            if e.id in fn_params:
                return param(e.id, scope_function=fn_name)
            return unknown()
        if isinstance(e, EMember):
            root = e
            while isinstance(root, EMember):
                root = root.base
            if isinstance(root, EName):
                fn_name, fn_params = self._current_fn()
                if root.id in fn_params and self._lookup_assign(root.id) is None:
                    return param(root.id, scope_function=fn_name)
            return unknown()
        if isinstance(e, ECall):
            callee = path_text(e.callee) if e.callee is not None else None
            if callee is not None and callee in self.rs.unwrap and e.args:
                return self.fold(e.args[0])
            return unknown()
        return unknown()

    # -- receiver / client resolution ------------------------------------------

    def _full_path(self, e: EIR) -> tuple[str, str] | None:
        """Resolve a Name/Member chain through import bindings to
        (module, member path)."""
        parts: list[str] = []
        node = e
        while isinstance(node, EMember) and node.attr is not None:
            parts.append(node.attr)
            node = node.base
        if not isinstance(node, EName):
            return None
        binding = self.bindings.get(node.id)
        if binding is None:
            return None
        module, prefix = binding
        member = ".".join(([prefix] if prefix else []) + list(reversed(parts)))
        return module, member

    def _match_client(self, call: ECall) -> Handle | None:
        """Match a call/new expression against the client construction table."""
        if call.callee is None:
            return None
        resolved = self._full_path(call.callee)
        if resolved is None:
            return None
        module, member = resolved
        full = f"{module}.{member}" if member else module
        for pattern in self.rs.clients:
            pattern_full = f"{pattern.module}.{pattern.member}"
            candidates = [pattern_full] + [f"{pattern_full}.{f}" for f in pattern.factories]
            if full not in candidates:
                continue
            service = pattern.service
            if pattern.service_from_arg is not None:
                if pattern.service_from_arg < len(call.args):
                    arg = self.fold(call.args[pattern.service_from_arg])
                    if arg.kind is ValueKind.LITERAL:
                        service = pattern.service_canon.get(arg.literal)
                    else:
                        service = None
                else:
                    service = None
            self.construction_spans[call.span] = service
            return Handle(service=service, client_id="", construction_span=call.span)
        if self.rs.module_is_sdk(module):
            # SDK module call that matches no pattern: an untraceable client
            return Handle(service=None, client_id="")
        return None

    def resolve_receiver(self, e: EIR) -> Handle | None:
        """Resolve an expression to the SDK handle it denotes, if any."""
        if isinstance(e, EName):
            return self.handles.get(e.id)
        if isinstance(e, EMember):
            if e.attr is None or e.base is None:
                return None
            base = self.resolve_receiver(e.base)
            if base is not None:
                return Handle(
                    service=base.service,
                    client_id=base.client_id,
                    context=dict(base.context),
                    context_texts=dict(base.context_texts),
                    pending=base.pending + (e.attr,),
                    construction_span=base.construction_span,
                )
            return None
        if isinstance(e, ECall):
            # instrumented output marker: wrapped construction stays analyzable
            if isinstance(e.callee, EName) and e.callee.id == "_slsguard_wrap" and e.args:
                return self.resolve_receiver(e.args[0])
            direct = self._match_client(e)
            if direct is not None:
                return direct
            if not isinstance(e.callee, EMember) or e.callee.attr is None:
                return None
            base = self.resolve_receiver(e.callee.base)
            if base is None or base.service is None or base.pending:
                return None
            slot = self.rs.binder_slot(base.service, e.callee.attr)
            if slot is None:
                return None
            context = dict(base.context)
            texts = dict(base.context_texts)
            if e.args:
                context[slot] = self.fold(e.args[0])
                start, end = e.args[0].span
                if end > start:
                    texts[slot] = self.unit.text[start:end]
            return Handle(service=base.service, client_id=base.client_id,
                          context=context, context_texts=texts,
                          construction_span=base.construction_span)
        return None

    # -- statements -------------------------------------------------------------

    def assign(self, name: str, value_expr: EIR, loc: Location):
        """Record `name = expr`, threading clients, handles, and values."""
        self.walk_expression(value_expr)
        if isinstance(value_expr, ECall):
            handle = self.resolve_receiver(value_expr)
            if handle is not None:
                self.handles[name] = Handle(
                    service=handle.service,
                    client_id=handle.client_id or name,
                    context=dict(handle.context),
                    context_texts=dict(handle.context_texts),
                    construction_span=handle.construction_span,
                )
                return
        if isinstance(value_expr, EName) and value_expr.id in self.handles:
            self.handles[name] = self.handles[value_expr.id]
            return
        if isinstance(value_expr, EObject):
            bucket = self.props.setdefault(name, {})
            for key, prop_value in value_expr.props.items():
                bucket.setdefault(key, []).append(
                    _Assign(tuple(self._block), self.next_seq(), self.fold(prop_value))
                )
            if value_expr.has_dynamic:
                bucket.setdefault("*dynamic*", []).append(
                    _Assign(tuple(self._block), self.next_seq(), unknown())
                )
            return
        self.assigns.setdefault(name, []).append(
            _Assign(tuple(self._block), self.next_seq(), self.fold(value_expr))
        )

    def assign_prop(self, name: str, prop: str, value_expr: EIR, loc: Location):
        """Record `name.prop = expr` (parameter-object mutation)."""
        self.walk_expression(value_expr)
        self.props.setdefault(name, {}).setdefault(prop, []).append(
            _Assign(tuple(self._block), self.next_seq(), self.fold(value_expr))
        )

    def _lookup_props(self, name: str) -> dict[str, ValueExpr] | None:
        bucket = self.props.get(name)
        if bucket is None:
            return None
        out: dict[str, ValueExpr] = {}
        here = tuple(self._block)
        here_scope = self._fn_scope(here)
        for key, versions in bucket.items():
            visible = [a for a in versions if here[: len(a.block)] == a.block]
            if not visible:
                continue
            last = max(visible, key=lambda a: a.seq)
            if any(
                a.seq > last.seq and self._fn_scope(a.block) in ("", here_scope)
                for a in versions
            ):
                out[key] = unknown()
            else:
                out[key] = last.value
        if "*dynamic*" in out:
            out.pop("*dynamic*")
        return out

    def expression(self, e: EIR):
        self.walk_expression(e)

    # -- call walking ------------------------------------------------------------

    def walk_expression(self, e: EIR):
        """Find and record every call site in an expression tree."""
        if isinstance(e, ECall):
            self._record_call(e)
            if e.callee is not None:
                self.walk_expression(e.callee)
            for a in e.args:
                self.walk_expression(a)
            for a in e.kwargs.values():
                self.walk_expression(a)
        elif isinstance(e, EMember):
            if e.base is not None:
                self.walk_expression(e.base)
        elif isinstance(e, EConcat):
            for p in e.parts:
                self.walk_expression(p)
        elif isinstance(e, EObject):
            for p in e.props.values():
                self.walk_expression(p)
        elif isinstance(e, EUnknown):
            for p in e.inner:
                self.walk_expression(p)

    def _call_params(self, call: ECall, handle: Handle) -> tuple[dict[str, ValueExpr], dict[str, str]]:
        params: dict[str, ValueExpr] = dict(handle.context)
        texts: dict[str, str] = dict(handle.context_texts)

        def put(key: str, e: EIR):
            params[key] = self.fold(e)
            start, end = e.span
            if end > start:
                texts[key] = self.unit.text[start:end]

        if len(call.args) == 1 and isinstance(call.args[0], EObject):
            obj = call.args[0]
            for key, value in obj.props.items():
                put(key, value)
        elif len(call.args) == 1 and isinstance(call.args[0], EName):
            props = self._lookup_props(call.args[0].id)
            if props is not None:
                params.update(props)
            else:
                put("_arg0", call.args[0])
        else:
            for i, a in enumerate(call.args):
                put(f"_arg{i}", a)
        for key, value in call.kwargs.items():
            put(key, value)
        return params, texts

    def _record_call(self, call: ECall):
        # Helper (depth-1 wrapper) invocation
        if isinstance(call.callee, EName) and call.callee.id in self.local_functions:
            self.helper_calls.append(
                HelperCall(
                    callee=call.callee.id,
                    args=tuple(self.fold(a) for a in call.args),
                    kwargs={k: self.fold(v) for k, v in call.kwargs.items()},
                    location=call.loc(),
                )
            )
            return
        if not isinstance(call.callee, EMember):
            return
        member = call.callee
        if member.base is None:
            return
        handle = self.resolve_receiver(member.base)
        if handle is None:
            return
        if member.attr is not None and handle.service is not None and not handle.pending:
            if self.rs.binder_slot(handle.service, member.attr) is not None:
                return  # binder invocation, handled when the chain resolves
        method = ".".join(handle.pending + ((member.attr,) if member.attr else ()))
        computed = member.attr is None
        params, texts = self._call_params(call, handle)
        fn_name, _ = self._current_fn()
        loc = Location(member.attr_line, member.attr_col) if member.attr is not None else call.loc()
        self.call_sites.append(
            ServiceCallSite(
                client=handle.client_id or "(inline)",
                service=handle.service if handle.service is not None else "",
                method=method if method else "<computed>",
                params=params,
                location=loc,
                provenance="resolved" if handle.service is not None else "unresolved",
                enclosing_function=fn_name,
                method_is_computed=computed,
                param_texts=texts,
                statement_span=self._stmt_span,
                client_construction_span=handle.construction_span,
            )
        )

    # -- finalize ------------------------------------------------------------------

    def finalize(self) -> SemanticRegistry:
        sites = sorted(self.call_sites, key=lambda s: (s.location.line, s.location.column))
        env_refs = [
            EnvRefUse(env_name=name, use_sites=tuple(sorted(set(locs), key=lambda l: (l.line, l.column))))
            for name, locs in sorted(self.env_uses.items())
        ]
        flat_assigns: dict[str, ValueExpr] = {}
        for name, versions in sorted(self.assigns.items()):
            flat_assigns[name] = max(versions, key=lambda a: a.seq).value
        return SemanticRegistry(
            unit=self.unit,
            call_sites=sites,
            env_refs=env_refs,
            assignments=flat_assigns,
            imports=sorted(self.imports, key=lambda i: (i.location.line, i.location.column)),
            local_functions=dict(sorted(self.local_functions.items())),
            helper_calls=sorted(self.helper_calls, key=lambda h: (h.location.line, h.location.column)),
            constructions=sorted(
                (span, service) for span, service in self.construction_spans.items()
                if service is not None
            ),
        )


def build_semantic_registry(unit: SourceUnit, ruleset: RuleSet | None = None) -> SemanticRegistry:
    """Build the registry for an identified source unit.

    Raises ParseError on syntactically invalid input; requires language and
    vendor to be identified (Unknown vendor gets an empty rule view, so
    imports and nothing else are recorded).
    """
    from .lang import gofront, jsfront, pyfront  # local import to avoid cycles

    if unit.language is None or unit.vendor is None:
        raise RuleError(f"{unit.path}: identify language and vendor before building the registry")
    unit.check_supported()
    if ruleset is None:
        if unit.vendor is Vendor.UNKNOWN:
            ruleset = _empty_ruleset(unit.language)
        else:
            ruleset = load_rules(unit.language, unit.vendor)
    frontend = {
        Language.PYTHON: pyfront.walk,
        Language.JAVASCRIPT: jsfront.walk,
        Language.GO: gofront.walk,
    }[unit.language]
    builder = RegistryBuilder(unit, ruleset)
    frontend(unit, builder)
    return builder.finalize()


def _empty_ruleset(language: Language) -> RuleSet:
    from .rules import load_actions, load_services

    return RuleSet(
        language=language,
        vendor=Vendor.UNKNOWN,
        sdk_modules=(),
        unwrap=(),
        clients=(),
        binders={},
        rules={},
        services=load_services(),
        actions=load_actions(),
    )
